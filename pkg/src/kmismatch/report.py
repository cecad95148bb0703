"""The analysis report and its JSON and text renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__
from .effects import Mismatch
from .errors import Diagnostic
from .triage import CATEGORIES, SEVERITIES, SPACE_LABELS, StatsSummary, TriagedMismatch

__all__ = ["SCHEMA_VERSION", "AUDIT_NOTES", "AnalysisReport", "emit_report", "read_report"]

SCHEMA_VERSION = 1

AUDIT_NOTES = (
    "Tristate guards of obj-/lib- rules and directory descents expand to X_y || X_m; "
    "composite parts count only when their guard is y.",
    "CONFIG_X maps to X (bool) or X_y (tristate); CONFIG_X_MODULE maps to X_m.",
    "Options with a prompt are left free within their dependencies; "
    "options without one are pinned to their defaults and selects.",
    "Categories follow a fixed heuristic order: vendor submenu, capability, "
    "then visible (ineffective option) versus invisible (ignored invisible option).",
)


@dataclass
class AnalysisReport:
    corpus: dict
    config: dict
    mismatches: list[TriagedMismatch] = field(default_factory=list)
    excluded: list[Mismatch] = field(default_factory=list)
    covered: list[str] = field(default_factory=list)
    unused: list[str] = field(default_factory=list)
    stats: StatsSummary = field(default_factory=StatsSummary)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    tool: dict = field(default_factory=lambda: {"name": "kmismatch", "version": __version__})
    notes: tuple[str, ...] = AUDIT_NOTES

    @property
    def problematic(self) -> list[TriagedMismatch]:
        return [t for t in self.mismatches if t.severity == "Problematic"]

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "tool": dict(self.tool),
            "corpus": dict(self.corpus),
            "config": dict(self.config),
            "mismatches": [t.to_dict() for t in self.mismatches],
            "excluded": [m.to_dict() for m in self.excluded],
            "covered": list(self.covered),
            "unused": list(self.unused),
            "stats": self.stats.to_dict(),
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        if d.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(
            corpus=dict(d["corpus"]), config=dict(d["config"]),
            mismatches=[TriagedMismatch.from_dict(x) for x in d["mismatches"]],
            excluded=[Mismatch.from_dict(x) for x in d["excluded"]],
            covered=list(d["covered"]), unused=list(d["unused"]),
            stats=StatsSummary.from_dict(d["stats"]),
            diagnostics=[Diagnostic.from_dict(x) for x in d["diagnostics"]],
            tool=dict(d["tool"]), notes=tuple(d["notes"]),
        )


def _json(report: AnalysisReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def _witness_table(witnesses) -> list[str]:
    if not witnesses:
        return ["    witnesses: none"]
    atoms = sorted({a for w in witnesses for a in w})
    width = max(len(a) for a in atoms)
    head = "    " + "atom".ljust(width) + "  " + " ".join(f"#{i + 1}".ljust(5) for i in range(len(witnesses)))
    lines = ["    minimal partial configurations:", head.rstrip()]
    for a in atoms:
        cells = []
        for w in witnesses:
            v = w.get(a)
            cells.append(("-" if v is None else ("true" if v else "false")).ljust(5))
        lines.append("    " + a.ljust(width) + "  " + " ".join(cells).rstrip())
    return lines


def _text(report: AnalysisReport) -> str:
    out = [f"kmismatch {report.tool.get('version', '')} report (schema {SCHEMA_VERSION})",
           f"Kconfig entry: {report.corpus.get('kconfig_entry', '')}", ""]
    out.append(f"Mismatches: {len(report.mismatches)} "
               f"(problematic: {len(report.problematic)})")
    for i, t in enumerate(report.mismatches, 1):
        m = t.mismatch
        out.append("")
        out.append(f"[{i}] {m.variable} = {m.assignment}  ({m.atom})")
        out.append(f"    category: {t.category}, {t.severity}, {t.spaces}")
        out.append(f"    evidence: {'; '.join(t.evidence)}")
        if m.effect is not None:
            out.append(f"    feature effect: {m.effect.effect}")
            out.append(f"    used in: {', '.join(m.effect.contributing_pcs)}")
        out += _witness_table(m.witnesses)
    out.append("")
    out.append(f"Excluded: {len(report.excluded)}")
    for m in report.excluded:
        detail = f" ({m.detail})" if m.detail else ""
        out.append(f"  {m.variable} = {m.assignment}: {m.excluded}{detail}")
    out.append("")
    out.append(f"Covered atoms: {len(report.covered)}")
    out.append(f"Unused in solution space: {', '.join(report.unused) or 'none'}")
    s = report.stats
    out.append("")
    out.append("Statistics")
    out.append("  reports by category: " + ", ".join(f"{c} {s.categories.get(c, 0)}" for c in CATEGORIES))
    for sev in SEVERITIES:
        cats = s.severity_categories.get(sev, {})
        out.append(f"  {sev}: " + ", ".join(f"{c} {cats[c]}" for c in CATEGORIES if c in cats))
    out.append("  severity by space:")
    for sev in SEVERITIES:
        row = s.severity_space.get(sev, {})
        out.append(f"    {sev}: " + ", ".join(f"{sp} {row.get(sp, 0)}" for sp in SPACE_LABELS))
    out.append("  variables by type and visibility:")
    for typ, row in sorted(s.type_visibility.items()):
        out.append(f"    {typ}: visible {row['visible']}, invisible {row['invisible']}")
    out.append(f"  total reports {s.total_reports}, distinct variables {s.total_variables}")
    out.append("")
    out.append(f"Diagnostics: {len(report.diagnostics)}")
    out += [f"  {d}" for d in report.diagnostics]
    out.append("")
    out.append("Notes")
    out += [f"  - {n}" for n in report.notes]
    return "\n".join(out) + "\n"


def emit_report(report: AnalysisReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return _json(report).encode("utf-8")
    if fmt == "text":
        return _text(report).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def read_report(data: bytes | str) -> AnalysisReport:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return AnalysisReport.from_dict(json.loads(data))
