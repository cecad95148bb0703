"""Heuristic categorization of reported mismatches and summary statistics."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from collections.abc import Iterable, Sequence

from .effects import Mismatch

__all__ = [
    "CATEGORIES", "PROBLEMATIC", "SEVERITY_OF", "VENDOR_HELP_PHRASE", "DEFAULT_VENDOR_PATTERNS",
    "CAPABILITY_PATTERN", "TriagedMismatch", "StatsSummary", "classify", "summarize",
    "normalize_text", "space_label", "SEVERITIES", "SPACE_LABELS",
]

CATEGORIES = ("IneffectiveOption", "VendorSubmenu", "IgnoredInvisible", "Capability")
PROBLEMATIC = frozenset({"IneffectiveOption", "IgnoredInvisible"})
SEVERITY_OF = {c: "Problematic" if c in PROBLEMATIC else "Unproblematic" for c in CATEGORIES}
SEVERITIES = ("Problematic", "Unproblematic")
SPACE_LABELS = ("code-only", "build-only", "both")

# Boilerplate the kernel uses in help texts of vendor grouping options.
VENDOR_HELP_PHRASE = "doesn't directly affect the kernel"
DEFAULT_VENDOR_PATTERNS = (r".*_VENDOR_.*",)
CAPABILITY_PATTERN = r".*_(HAVE|HAS|SUPPORTS|WANTS)_.*"


def normalize_text(text: str) -> str:
    text = text.replace("’", "'").replace("‘", "'")
    return " ".join(text.lower().split())


def space_label(spaces: Iterable[str]) -> str:
    s = set(spaces)
    if s == {"code"}:
        return "code-only"
    if s == {"code", "build"}:
        return "both"
    return "build-only"


@dataclass(frozen=True)
class TriagedMismatch:
    mismatch: Mismatch
    category: str
    severity: str
    spaces: str
    evidence: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = self.mismatch.to_dict()
        d.update(category=self.category, severity=self.severity, spaces=self.spaces,
                 evidence=list(self.evidence))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TriagedMismatch":
        return cls(Mismatch.from_dict(d), d["category"], d["severity"], d["spaces"],
                   tuple(d["evidence"]))


def classify(m: Mismatch, model, vm, vendor_patterns: Sequence[str] | None = None
             ) -> TriagedMismatch:
    """Assign one of the four categories.

    Checked in order: vendor grouping option, capability flag, then
    visible (ineffective option) versus invisible (ignored invisible option).
    """
    patterns = DEFAULT_VENDOR_PATTERNS if vendor_patterns is None else tuple(vendor_patterns)
    name = m.variable
    visible = bool(vm.visibility.get(name, False))
    opt = model.options.get(name) if model is not None else None
    help_text = normalize_text(opt.help_text) if opt is not None else ""
    evidence = ["visible" if visible else "invisible"]
    category = None
    if visible:
        if VENDOR_HELP_PHRASE in help_text:
            evidence.append("help-text phrase")
        for pat in patterns:
            if re.fullmatch(pat, name):
                evidence.append(f"name matches {pat}")
                break
        if len(evidence) > 1:
            category = "VendorSubmenu"
    elif re.fullmatch(CAPABILITY_PATTERN, name):
        evidence.append(f"name matches {CAPABILITY_PATTERN}")
        category = "Capability"
    if category is None:
        category = "IneffectiveOption" if visible else "IgnoredInvisible"
    spaces = space_label(m.effect.spaces) if m.effect else "build-only"
    return TriagedMismatch(m, category, SEVERITY_OF[category], spaces, tuple(evidence))


@dataclass
class StatsSummary:
    categories: dict[str, int] = field(default_factory=lambda: {c: 0 for c in CATEGORIES})
    type_visibility: dict[str, dict[str, int]] = field(default_factory=dict)
    severity_space: dict[str, dict[str, int]] = field(
        default_factory=lambda: {s: {sp: 0 for sp in SPACE_LABELS} for s in SEVERITIES})
    distinct_by_type: dict[str, int] = field(default_factory=dict)
    severity_categories: dict[str, dict[str, int]] = field(default_factory=dict)
    total_reports: int = 0
    total_variables: int = 0

    def to_dict(self) -> dict:
        return {
            "categories": dict(self.categories),
            "type_visibility": {k: dict(v) for k, v in sorted(self.type_visibility.items())},
            "severity_space": {k: dict(v) for k, v in self.severity_space.items()},
            "distinct_by_type": dict(sorted(self.distinct_by_type.items())),
            "severity_categories": {k: dict(v) for k, v in self.severity_categories.items()},
            "total_reports": self.total_reports,
            "total_variables": self.total_variables,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StatsSummary":
        return cls(dict(d["categories"]), {k: dict(v) for k, v in d["type_visibility"].items()},
                   {k: dict(v) for k, v in d["severity_space"].items()},
                   dict(d["distinct_by_type"]),
                   {k: dict(v) for k, v in d["severity_categories"].items()},
                   d["total_reports"], d["total_variables"])


def summarize(triaged: Sequence[TriagedMismatch], vm) -> StatsSummary:
    """Category counts, type by visibility per distinct variable, severity by space per report."""
    s = StatsSummary()
    s.severity_categories = {
        sev: {c: 0 for c in CATEGORIES if SEVERITY_OF[c] == sev} for sev in SEVERITIES}
    seen: set[str] = set()
    for t in triaged:
        s.categories[t.category] += 1
        s.severity_space[t.severity][t.spaces] += 1
        s.severity_categories[t.severity][t.category] += 1
        s.total_reports += 1
        name = t.mismatch.variable
        if name in seen:
            continue
        seen.add(name)
        typ = vm.type_map.get(name, "unknown")
        vis = "visible" if vm.visibility.get(name) else "invisible"
        row = s.type_visibility.setdefault(typ, {"visible": 0, "invisible": 0})
        row[vis] += 1
        s.distinct_by_type[typ] = s.distinct_by_type.get(typ, 0) + 1
    s.total_variables = len(seen)
    return s
