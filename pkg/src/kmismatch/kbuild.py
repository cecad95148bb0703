"""Textual mining of Kbuild makefiles into file presence conditions.

Nothing is evaluated with make. Lines are matched against the handful of
forms Kbuild uses for variability; anything else that mentions a CONFIG_
symbol produces a bail-out diagnostic, and the symbols on that line are
reported as unreliable.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field

from .errors import DescentCycleError, Diagnostic
from .logic import FALSE, TRUE, Formula, Var, conj, disj, simplify, to_text
from .vm import PropositionalVM

__all__ = [
    "BuildRule", "FilePresence", "BuildExtraction", "extract_build_rules",
    "extract_build_rules_text", "compose_file_presence", "file_presence_json",
    "MAKEFILE_NAMES",
]

MAKEFILE_NAMES = ("Kbuild", "Makefile")

_CONFIG_REF = re.compile(r"\$[({]CONFIG_(\w+)[)}]")
_CONFIG_ANY = re.compile(r"CONFIG_(\w+)")
_ASSIGN = re.compile(r"^(?P<lhs>[^\s:+?=]+)\s*(?P<op>\+=|:=|\?=|=)\s*(?P<rhs>.*)$")
_SUFFIX = re.compile(r"^(?P<stem>.+?)-(?P<sel>\$\(CONFIG_\w+\)|\$\{CONFIG_\w+\}|y|m|objs|n)$")
_FLAG_PREFIXES = (
    "ccflags", "asflags", "ldflags", "subdir-ccflags", "subdir-asflags", "hostprogs",
    "always", "targets", "clean-files", "clean-dirs", "extra", "host", "CFLAGS_",
    "AFLAGS_", "LDFLAGS_", "KBUILD_", "OBJECT_FILES_", "GCOV_", "KASAN_", "UBSAN_",
    "KCOV_", "CPPFLAGS_", "EXTRA_",
)
_CONDITIONALS = ("ifeq", "ifneq", "ifdef", "ifndef", "else", "endif")


@dataclass(frozen=True)
class BuildRule:
    kind: str                 # object-list / composite-object / subdir-descent
    guard: str | None         # bare option name, None for unconditional
    aspect: str               # "ym" or "y"
    targets: tuple[str, ...]
    file: str
    line: int
    composite: str | None = None   # composite name for composite-object rules

    @property
    def location(self) -> str:
        return f"{self.file}:{self.line}"


@dataclass(frozen=True)
class FilePresence:
    source_file: str
    condition: Formula
    provenance: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"file": self.source_file, "condition": to_text(self.condition),
                "provenance": list(self.provenance)}


@dataclass
class BuildExtraction:
    rules: list[BuildRule] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    unreliable: dict[str, str] = field(default_factory=dict)   # name -> reason


def _logical_lines(text: str):
    """Yield (line number, text) with continuations joined and comments removed."""
    buf, start = "", 0
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw
        if "#" in line:
            line = line[: line.index("#")]
        if not buf:
            start = i
        if line.rstrip().endswith("\\"):
            buf += line.rstrip()[:-1] + " "
            continue
        buf += line
        if buf.strip():
            yield start, buf.strip()
        buf = ""
    if buf.strip():
        yield start, buf.strip()


def _selector(sel: str) -> tuple[str | None, str] | None:
    """Guard for a ``-<sel>`` suffix: (option name or None, aspect); None means never."""
    m = _CONFIG_REF.fullmatch(sel)
    if m:
        return m.group(1), "ym"
    if sel in ("y", "m", "objs"):
        return None, "ym"
    return None


def extract_build_rules_text(text: str, file: str = "Makefile") -> BuildExtraction:
    """Recognize Kbuild rules in makefile ``text`` (see module docstring)."""
    out = BuildExtraction()

    def bail(line, content, msg):
        syms = tuple(sorted(set(_CONFIG_ANY.findall(content))))
        out.diagnostics.append(Diagnostic("kbuild", "bail-out", msg, file, line, syms))
        for s in syms:
            out.unreliable.setdefault(s, "unparsed-expression")

    for lineno, text_line in _logical_lines(text):
        head = text_line.split()[0]
        if head in _CONDITIONALS:
            bail(lineno, text_line, f"make conditional {head!r} is outside the supported subset")
            continue
        if "$(eval" in text_line or "$(call" in text_line or "$(foreach" in text_line:
            bail(lineno, text_line, "computed make construct is outside the supported subset")
            continue
        m = _ASSIGN.match(text_line)
        if not m:
            if _CONFIG_ANY.search(text_line):
                bail(lineno, text_line, "unrecognized line mentions a configuration symbol")
            continue
        lhs, rhs = m.group("lhs"), m.group("rhs")
        if lhs.startswith(_FLAG_PREFIXES):
            if _CONFIG_ANY.search(text_line):
                out.diagnostics.append(Diagnostic(
                    "kbuild", "compiler-settings", "compiler or housekeeping setting ignored",
                    file, lineno, tuple(sorted(set(_CONFIG_ANY.findall(text_line))))))
            continue
        sm = _SUFFIX.match(lhs)
        if not sm or "$" in sm.group("stem"):
            if "$" in lhs or _CONFIG_ANY.search(text_line):
                bail(lineno, text_line, f"computed or unrecognized variable {lhs!r}")
            continue
        if "$" in rhs:
            bail(lineno, text_line, "computed right-hand side is outside the supported subset")
            continue
        stem, sel = sm.group("stem"), sm.group("sel")
        guard = _selector(sel)
        if guard is None:
            continue
        name, aspect = guard
        targets = tuple(rhs.split())
        if not targets:
            continue
        if stem in ("obj", "lib"):
            objs = tuple(t for t in targets if not t.endswith("/"))
            dirs = tuple(t for t in targets if t.endswith("/"))
            if objs:
                out.rules.append(BuildRule("object-list", name, aspect, objs, file, lineno))
            if dirs and stem == "obj":
                out.rules.append(BuildRule("subdir-descent", name, aspect, dirs, file, lineno))
        elif stem == "subdir":
            dirs = tuple(t.rstrip("/") + "/" for t in targets)
            out.rules.append(BuildRule("subdir-descent", name, aspect, dirs, file, lineno))
        else:
            # Kbuild only collects <name>-y and <name>-objs into a composite,
            # so a tristate part guard contributes when it is y.
            out.rules.append(BuildRule("composite-object", name, "y", targets, file, lineno,
                                       composite=stem))
    return out


def extract_build_rules(makefile: str, root: str | None = None) -> BuildExtraction:
    with open(makefile, encoding="utf-8", errors="replace") as fh:
        text = fh.read()
    label = os.path.relpath(makefile, root).replace(os.sep, "/") if root else makefile
    return extract_build_rules_text(text, label)


def _find_makefile(directory: str) -> str | None:
    for name in MAKEFILE_NAMES:
        path = os.path.join(directory, name)
        if os.path.isfile(path):
            return path
    return None


@dataclass
class _Composer:
    root: str
    vm: PropositionalVM | None
    diagnostics: list[Diagnostic] = field(default_factory=list)
    unreliable: dict[str, str] = field(default_factory=dict)
    rules: dict[str, list[BuildRule]] = field(default_factory=dict)
    fresh: set[str] = field(default_factory=set)

    def guard(self, rule: BuildRule) -> Formula:
        if rule.guard is None:
            return TRUE
        if self.vm is not None:
            f = self.vm.guard(rule.guard, rule.aspect)
            if f is not None:
                return f
        if self.vm is not None and rule.guard not in self.fresh:
            self.diagnostics.append(Diagnostic(
                "kbuild", "unknown-symbol", f"CONFIG_{rule.guard} is not declared in the model",
                rule.file, rule.line, (rule.guard,)))
        self.fresh.add(rule.guard)
        return Var(rule.guard)

    def load(self, rel_dir: str) -> list[BuildRule]:
        if rel_dir not in self.rules:
            path = _find_makefile(os.path.join(self.root, rel_dir))
            if path is None:
                self.rules[rel_dir] = []
            else:
                ext = extract_build_rules(path, self.root)
                self.rules[rel_dir] = ext.rules
                self.diagnostics.extend(ext.diagnostics)
                for k, v in ext.unreliable.items():
                    self.unreliable.setdefault(k, v)
        return self.rules[rel_dir]


def _join(d: str, name: str) -> str:
    return os.path.normpath(os.path.join(d, name)).replace(os.sep, "/")


def compose_file_presence(root: str, vm: PropositionalVM | None = None,
                          composer_out: dict | None = None) -> list[FilePresence]:
    """Presence condition of every .c file under ``root``.

    Starts at the makefile in ``root`` and follows subdirectory descent.
    A file's condition is the disjunction, over every rule naming it, of the
    rule guard, the composite parent's guard, and the guards of all descents
    leading to its directory. Files no rule reaches get ``false``.
    """
    comp = _Composer(root, vm)
    edges: dict[str, list[tuple[str, BuildRule]]] = {}
    order: list[str] = []
    state: dict[str, int] = {}

    def visit(d: str, path: list[str]):
        state[d] = 1
        for rule in comp.load(d):
            if rule.kind != "subdir-descent":
                continue
            for t in rule.targets:
                child = _join(d, t.rstrip("/"))
                if not os.path.isdir(os.path.join(root, child)):
                    comp.diagnostics.append(Diagnostic(
                        "kbuild", "missing-directory", f"descent into missing {child}/",
                        rule.file, rule.line, (rule.guard,) if rule.guard else ()))
                    continue
                edges.setdefault(child, []).append((d, rule))
                if state.get(child) == 1:
                    cyc = path[path.index(child):] + [child] if child in path else [d, child]
                    raise DescentCycleError(cyc)
                if child not in state:
                    visit(child, path + [child])
        state[d] = 2
        order.append(d)

    visit("", [""])
    dir_cond: dict[str, Formula] = {"": TRUE}
    dir_prov: dict[str, list[str]] = {"": []}
    for d in reversed(order):
        if d == "":
            continue
        parts, prov = [], []
        for parent, rule in edges.get(d, []):
            parts.append(conj(dir_cond[parent], comp.guard(rule)))
            prov += dir_prov[parent] + [rule.location]
        dir_cond[d] = simplify(disj(parts))
        dir_prov[d] = prov

    file_parts: dict[str, list[Formula]] = {}
    file_prov: dict[str, list[str]] = {}

    def add(path, cond, prov):
        file_parts.setdefault(path, []).append(cond)
        file_prov.setdefault(path, []).extend(prov)

    for d in sorted(order):
        rules = comp.rules[d]
        composites: dict[str, list[BuildRule]] = {}
        for rule in rules:
            if rule.kind == "composite-object":
                composites.setdefault(rule.composite, []).append(rule)
        for rule in rules:
            if rule.kind != "object-list":
                continue
            base = conj(dir_cond[d], comp.guard(rule))
            for target in rule.targets:
                stem = target[:-2] if target.endswith(".o") else None
                if stem is None:
                    comp.diagnostics.append(Diagnostic(
                        "kbuild", "unrecognized-target", f"target {target!r} ignored",
                        rule.file, rule.line))
                    continue
                parts = composites.get(stem)
                if parts:
                    for part in parts:
                        pcond = conj(base, comp.guard(part))
                        for obj in part.targets:
                            if obj.endswith(".o"):
                                add(_join(d, obj[:-2] + ".c"), pcond,
                                    dir_prov[d] + [rule.location, part.location])
                else:
                    add(_join(d, stem + ".c"), base, dir_prov[d] + [rule.location])

    result = []
    all_c = set()
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for fn in filenames:
            if fn.endswith(".c"):
                rel = os.path.relpath(os.path.join(dirpath, fn), root).replace(os.sep, "/")
                all_c.add(rel)
    for path in sorted(set(file_parts) - all_c):
        base = os.path.join(root, path[:-2] + ".S")
        if not os.path.exists(base):
            comp.diagnostics.append(Diagnostic("kbuild", "missing-source",
                                               f"{path} is referenced but absent", path))
    for path in sorted(all_c):
        cond = simplify(disj(file_parts.get(path, [FALSE])))
        prov = tuple(dict.fromkeys(file_prov.get(path, [])))
        result.append(FilePresence(path, cond, prov))
    if composer_out is not None:
        composer_out["diagnostics"] = comp.diagnostics
        composer_out["unreliable"] = comp.unreliable
        composer_out["rules"] = comp.rules
        composer_out["fresh_atoms"] = sorted(comp.fresh)
    return result


def file_presence_json(presences: list[FilePresence]) -> str:
    return json.dumps([p.to_dict() for p in presences], indent=2, sort_keys=True) + "\n"
