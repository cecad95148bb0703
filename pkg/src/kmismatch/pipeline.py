"""End-to-end analysis of one source tree."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field

from .cpp import ConditionTranslator, UnreliableVarSet, combine_presence, extract_blocks_text, scan_unreliable
from .effects import Caps, EffectAnalysis, PresenceCondition, analyze_effects
from .errors import Diagnostic, UnbalancedDirectiveError
from .kbuild import FilePresence, compose_file_presence
from .kconfig import KconfigModel, parse_kconfig
from .report import AnalysisReport
from .sat import DEFAULT_VAR_CAP, SolverBudget
from .triage import DEFAULT_VENDOR_PATTERNS, classify, summarize
from .vm import PropositionalVM, compile_vm

__all__ = ["RunConfig", "PipelineResult", "run_analysis", "run_pipeline", "read_sources"]

_CONFIG_TOKEN = re.compile(r"\bCONFIG_(\w+)")


@dataclass(frozen=True)
class RunConfig:
    source_root: str
    kconfig_entry: str = "Kconfig"
    var_cap: int = DEFAULT_VAR_CAP
    witness_limit: int = 32
    max_conflicts: int = 1_000_000
    max_seconds: float = 10.0
    vendor_patterns: tuple[str, ...] = DEFAULT_VENDOR_PATTERNS
    output_format: str = "json"

    def __post_init__(self):
        if not os.path.isdir(self.source_root):
            raise ValueError(f"source root {self.source_root!r} is not a directory")
        if not os.path.isfile(self.entry_path):
            raise ValueError(f"Kconfig entry {self.entry_path!r} does not exist")
        for name in ("var_cap", "witness_limit", "max_conflicts"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")
        if self.output_format not in ("json", "text"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    @property
    def entry_path(self) -> str:
        if os.path.isabs(self.kconfig_entry):
            return self.kconfig_entry
        return os.path.join(self.source_root, self.kconfig_entry)

    @property
    def caps(self) -> Caps:
        return Caps(self.var_cap, self.witness_limit,
                    SolverBudget(self.max_conflicts, self.max_seconds))

    def to_dict(self) -> dict:
        return {"var_cap": self.var_cap, "witness_limit": self.witness_limit,
                "max_conflicts": self.max_conflicts, "max_seconds": self.max_seconds,
                "vendor_patterns": list(self.vendor_patterns)}


@dataclass
class PipelineResult:
    model: KconfigModel
    vm: PropositionalVM
    file_presence: list[FilePresence]
    pcs: list[PresenceCondition]
    unreliable: UnreliableVarSet
    analysis: EffectAnalysis
    report: AnalysisReport
    diagnostics: list[Diagnostic] = field(default_factory=list)


def read_sources(root: str) -> dict[str, str]:
    """Relative path to text for every .c and .h file, in sorted order."""
    out = {}
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for fn in sorted(filenames):
            if fn.endswith((".c", ".h")):
                full = os.path.join(dirpath, fn)
                rel = os.path.relpath(full, root).replace(os.sep, "/")
                with open(full, encoding="utf-8", errors="replace") as fh:
                    out[rel] = fh.read()
    return dict(sorted(out.items()))


def run_analysis(cfg: RunConfig) -> PipelineResult:
    root = cfg.source_root
    model = parse_kconfig(cfg.entry_path, root=root)
    vm = compile_vm(model)
    diagnostics = list(model.diagnostics) + list(vm.diagnostics)

    kb: dict = {}
    presence = compose_file_presence(root, vm, kb)
    diagnostics += kb["diagnostics"]

    translator = ConditionTranslator(vm)
    sources = read_sources(root)
    blocks = []
    broken = UnreliableVarSet()
    for path, text in sources.items():
        if not path.endswith(".c"):
            continue
        try:
            blocks += extract_blocks_text(text, path, translator)
        except UnbalancedDirectiveError as exc:
            # keep going without this file's blocks; its variables become unreliable
            diagnostics.append(Diagnostic("cpp", "unbalanced-directive", str(exc), path, exc.line))
            for sym in sorted(set(_CONFIG_TOKEN.findall(text))):
                broken.add(translator.resolve("CONFIG_" + sym), "unparsed-expression")

    unreliable = scan_unreliable(sources, vm, translator).merge(broken)
    for sym, reason in kb["unreliable"].items():
        unreliable.add(translator.resolve("CONFIG_" + sym), reason)

    pcs = combine_presence(presence, blocks, diagnostics)
    analysis = analyze_effects(vm, pcs, unreliable, cfg.caps)

    triaged = [classify(m, model, vm, cfg.vendor_patterns)
               for m in analysis.mismatches if m.reported]
    excluded = [m for m in analysis.mismatches if not m.reported]
    entry = os.path.relpath(cfg.entry_path, root).replace(os.sep, "/")
    report = AnalysisReport(
        corpus={"kconfig_entry": entry, "source_files": len(sources),
                "presence_conditions": len(pcs)},
        config=cfg.to_dict(),
        mismatches=triaged, excluded=excluded,
        covered=sorted(analysis.covered), unused=sorted(analysis.unused),
        stats=summarize(triaged, vm), diagnostics=diagnostics,
    )
    return PipelineResult(model, vm, presence, pcs, unreliable, analysis, report, diagnostics)


def run_pipeline(cfg: RunConfig) -> AnalysisReport:
    return run_analysis(cfg).report
