"""Seeded synthetic corpora: random trees plus planted, labeled mismatches.

A corpus is a directory with ``Kconfig`` at the root, a ``Makefile`` per
directory and C sources alongside. ``labels.json`` maps every planted
variable to its expected category; ``corpus.json`` records the seed, the
dimensions and the variables planted to be filtered out.

Random parts use variables ``V0``, ``V1``, ...; planted parts use the
prefix ``P<k>_`` and never reference random variables, so their verdicts
do not depend on the random part.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field

from .triage import CATEGORIES, VENDOR_HELP_PHRASE

__all__ = ["CorpusDims", "GeneratedCorpus", "generate_corpus", "MAX_RANDOM_ATOMS"]

MAX_RANDOM_ATOMS = 15
COMPLEXITY_FANOUT = 13


@dataclass(frozen=True)
class CorpusDims:
    """Dimensions of a corpus; ranges are checked on construction."""
    n_vars: int = 6
    n_files: int = 4
    nesting_depth: int = 2
    category_mix: dict[str, int] = field(default_factory=dict)
    header_usage: int = 0
    complexity: int = 0

    def __post_init__(self):
        if not 0 <= self.n_vars <= 14:
            raise ValueError("n_vars must be in 0..14")
        if not 0 <= self.n_files <= 10:
            raise ValueError("n_files must be in 0..10")
        if not 0 <= self.nesting_depth <= 4:
            raise ValueError("nesting_depth must be in 0..4")
        for cat, n in self.category_mix.items():
            if cat not in CATEGORIES:
                raise ValueError(f"unknown category {cat!r}")
            if n < 0:
                raise ValueError("category counts must be non-negative")
        if self.header_usage < 0 or self.complexity < 0:
            raise ValueError("planted filter counts must be non-negative")

    def to_dict(self) -> dict:
        return {"n_vars": self.n_vars, "n_files": self.n_files,
                "nesting_depth": self.nesting_depth,
                "category_mix": dict(sorted(self.category_mix.items())),
                "header_usage": self.header_usage, "complexity": self.complexity}


@dataclass
class GeneratedCorpus:
    root: str
    seed: int
    dims: CorpusDims
    labels: dict[str, str]
    excluded: dict[str, str]
    files: dict[str, str]


class _Tree:
    """Files under construction; makefile lines accumulate per directory."""

    def __init__(self):
        self.kconfig: list[str] = []
        self.make: dict[str, list[str]] = {"": []}
        self.files: dict[str, str] = {}

    def rule(self, d: str, line: str):
        self.make.setdefault(d, []).append(line)

    def descend(self, parent: str, child: str, guard: str | None):
        lhs = f"obj-$(CONFIG_{guard})" if guard else "obj-y"
        name = child[len(parent) + 1:] if parent else child
        self.rule(parent, f"{lhs} += {name}/")
        self.make.setdefault(child, [])

    def render(self) -> dict[str, str]:
        out = dict(self.files)
        out["Kconfig"] = "\n".join(self.kconfig) + "\n"
        for d, lines in self.make.items():
            out[os.path.join(d, "Makefile") if d else "Makefile"] = "".join(ln + "\n" for ln in lines)
        return dict(sorted(out.items()))


# -- random part ------------------------------------------------------------

def _kexpr(rng: random.Random, names: list[str], types: dict[str, str], depth: int = 0) -> str:
    r = rng.random()
    if depth >= 2 or r < 0.5:
        n = rng.choice(names)
        if types[n] == "tristate" and rng.random() < 0.2:
            return f"{n} = {rng.choice('ym')}"
        return ("!" if rng.random() < 0.25 else "") + n
    op = "&&" if r < 0.75 else "||"
    return f"({_kexpr(rng, names, types, depth + 1)} {op} {_kexpr(rng, names, types, depth + 1)})"


def _random_kconfig(rng: random.Random, tree: _Tree, n_vars: int) -> tuple[list[str], dict[str, str]]:
    names = [f"V{i}" for i in range(n_vars)]
    types: dict[str, str] = {}
    spare = MAX_RANDOM_ATOMS - n_vars - 1   # one atom reserved for MODULES
    for n in names:
        if spare > 0 and rng.random() < 0.3:
            types[n] = "tristate"
            spare -= 1
        else:
            types[n] = "bool"
    if "tristate" in types.values():
        tree.kconfig += ["config MODULES", '\tbool "Enable loadable module support"', ""]

    # an optional bool choice over a run of consecutive visible bools
    choice: list[str] = []
    bools = [n for n in names if types[n] == "bool"]
    if len(bools) >= 2 and rng.random() < 0.3:
        start = rng.randrange(len(bools) - 1)
        choice = bools[start:start + rng.randint(2, 3)]
    selectable = [n for n in names if n not in choice]

    emitted_choice = False
    for i, n in enumerate(names):
        if n in choice:
            if emitted_choice:
                continue
            emitted_choice = True
            tree.kconfig += ["choice", f'\tprompt "Choice {n}"']
            if rng.random() < 0.4:
                tree.kconfig.append("\toptional")
            if i and rng.random() < 0.4:
                tree.kconfig.append(f"\tdepends on {_kexpr(rng, names[:i], types)}")
            tree.kconfig.append("")
            for m in choice:
                tree.kconfig += [f"config {m}", f'\tbool "Option {m}"', ""]
            tree.kconfig += ["endchoice", ""]
            continue
        earlier = [m for m in names[:i] if m not in choice or emitted_choice]
        lines = [f"config {n}"]
        visible = rng.random() < 0.7
        lines.append(f'\t{types[n]} "Option {n}"' if visible else f"\t{types[n]}")
        if earlier and rng.random() < 0.35:
            lines.append(f"\tdepends on {_kexpr(rng, earlier, types)}")
        if earlier and rng.random() < 0.4:
            value = rng.choice(["y", "n", rng.choice(earlier)])
            cond = f" if {_kexpr(rng, earlier, types)}" if rng.random() < 0.4 else ""
            lines.append(f"\tdefault {value}{cond}")
        elif rng.random() < 0.2:
            lines.append("\tdefault y")
        others = [m for m in selectable if m != n]
        if others and rng.random() < 0.2:
            cond = f" if {_kexpr(rng, earlier, types)}" if earlier and rng.random() < 0.3 else ""
            lines.append(f"\tselect {rng.choice(others)}{cond}")
        tree.kconfig += lines + [""]
    return names, types


def _cexpr(rng: random.Random, names: list[str], depth: int = 0) -> str:
    r = rng.random()
    if depth >= 2 or r < 0.55:
        n = rng.choice(names)
        form = rng.random()
        if form < 0.45:
            atom = f"defined(CONFIG_{n})"
        elif form < 0.65:
            atom = f"IS_ENABLED(CONFIG_{n})"
        elif form < 0.75:
            atom = f"IS_BUILTIN(CONFIG_{n})"
        elif form < 0.85:
            atom = f"IS_MODULE(CONFIG_{n})"
        else:
            atom = f"defined(CONFIG_{n}_MODULE)"
        return ("!" if rng.random() < 0.2 else "") + atom
    op = "&&" if r < 0.8 else "||"
    return f"({_cexpr(rng, names, depth + 1)} {op} {_cexpr(rng, names, depth + 1)})"


def _cbody(rng: random.Random, names: list[str], depth: int, max_depth: int, out: list[str]):
    for _ in range(rng.randint(0, 2) if depth else rng.randint(1, 3)):
        out.append(f"\tcount += {rng.randint(1, 9)};")
        if depth >= max_depth or not names:
            continue
        kind = rng.random()
        if kind < 0.3:
            out.append(f"#ifdef CONFIG_{rng.choice(names)}")
        elif kind < 0.4:
            out.append(f"#ifndef CONFIG_{rng.choice(names)}")
        else:
            out.append(f"#if {_cexpr(rng, names)}")
        _cbody(rng, names, depth + 1, max_depth, out)
        if rng.random() < 0.25:
            out.append(f"#elif {_cexpr(rng, names)}")
            _cbody(rng, names, depth + 1, max_depth, out)
        if rng.random() < 0.3:
            out.append("#else")
            _cbody(rng, names, depth + 1, max_depth, out)
        out.append("#endif")


def _random_sources(rng: random.Random, tree: _Tree, names: list[str], dims: CorpusDims):
    dirs = [""]
    depth = {"": 0}
    if dims.nesting_depth:
        for i in range(rng.randint(0, 3)):
            parent = rng.choice([d for d in dirs if depth[d] < dims.nesting_depth])
            child = f"{parent}/r{i}" if parent else f"r{i}"
            tree.descend(parent, child, rng.choice(names) if names and rng.random() < 0.6 else None)
            dirs.append(child)
            depth[child] = depth[parent] + 1

    def guard():
        return f"$(CONFIG_{rng.choice(names)})" if names and rng.random() < 0.75 else "y"

    for i in range(dims.n_files):
        d = rng.choice(dirs)
        stem = f"f{i}"
        r = rng.random()
        if r < 0.15:
            tree.rule(d, f"obj-{guard()} += m{i}.o")
            tree.rule(d, f"m{i}-{guard()} += {stem}.o")
        elif r < 0.22:
            tree.rule(d, f"lib-{guard()} += {stem}.o")
        elif r < 0.27:
            pass    # never built
        else:
            tree.rule(d, f"obj-{guard()} += {stem}.o")
        body = ["#include <linux/kernel.h>", "", f"int {stem}_count(void)", "{", "\tint count = 0;"]
        _cbody(rng, names, 0, dims.nesting_depth, body)
        body += ["\treturn count;", "}"]
        path = f"{d}/{stem}.c" if d else f"{stem}.c"
        tree.files[path] = "\n".join(body) + "\n"


# -- planted parts ------------------------------------------------------------

def _plant_ineffective(tree: _Tree, p: str) -> str:
    tree.kconfig += [
        f"config {p}_BUS", f'\tbool "{p} bus support"', "",
        f"config {p}_DRIVER", f'\ttristate "{p} device driver"', f"\tdepends on {p}_BUS", "",
        f"config {p}_OFFLOAD", f'\tbool "{p} hardware offload"',
        "\thelp", f"\t  Offload support for the {p} driver.", "",
    ]
    d = f"{p.lower()}drv"
    tree.descend("", d, None)
    tree.rule(d, f"obj-$(CONFIG_{p}_DRIVER) += {p.lower()}.o")
    tree.rule(d, f"{p.lower()}-y += main.o")
    tree.rule(d, f"{p.lower()}-$(CONFIG_{p}_OFFLOAD) += offload.o")
    tree.files[f"{d}/main.c"] = "int main_probe(void)\n{\n\treturn 0;\n}\n"
    tree.files[f"{d}/offload.c"] = "int offload_probe(void)\n{\n\treturn 0;\n}\n"
    return f"{p}_OFFLOAD"


def _plant_ignored(tree: _Tree, p: str) -> str:
    tree.kconfig += [
        f"config {p}_CORE", "\tbool", "",
        f"config {p}_HELPER", "\tbool", f"\tdepends on {p}_CORE", "",
        f"config {p}_BOARD", f'\tbool "{p} board support"', f"\tselect {p}_HELPER", "",
    ]
    d = f"{p.lower()}core"
    tree.descend("", d, f"{p}_CORE")
    tree.rule(d, f"obj-$(CONFIG_{p}_CORE) += core.o")
    tree.rule(d, f"obj-$(CONFIG_{p}_HELPER) += helper.o")
    tree.files[f"{d}/core.c"] = "int core_init(void)\n{\n\treturn 0;\n}\n"
    tree.files[f"{d}/helper.c"] = "int helper_init(void)\n{\n\treturn 0;\n}\n"
    return f"{p}_HELPER"


def _plant_vendor(tree: _Tree, p: str) -> str:
    vendor = f"{p}_VENDOR_ACME"
    tree.kconfig += [
        f"config {vendor}", '\tbool "Acme devices"', "\tdefault y", "\thelp",
        "\t  If you have a network card belonging to this class, say Y.", "",
        f"\t  Note that the answer to this question {VENDOR_HELP_PHRASE}:",
        "\t  saying N will just cause the configurator to skip all",
        "\t  the questions about Acme cards.", "",
        f"config {p}_SPI", f'\tbool "{p} SPI master"', "",
        f"if {vendor}", "",
        f"config {p}_NIC", f'\ttristate "Acme {p} network card"', f"\tdepends on {p}_SPI", "",
        "endif", "",
    ]
    d = f"{p.lower()}acme"
    tree.descend("", d, vendor)
    tree.rule(d, f"obj-$(CONFIG_{p}_NIC) += nic.o")
    tree.files[f"{d}/nic.c"] = "int nic_probe(void)\n{\n\treturn 0;\n}\n"
    return vendor


def _plant_capability(tree: _Tree, p: str) -> str:
    cap = f"{p}_HAVE_PMU"
    tree.kconfig += [
        f"config {p}_PLATFORM", f'\tbool "{p} platform support"', f"\tselect {cap}", "",
        f"config {p}_MONITOR", f'\tbool "{p} monitoring driver"', "",
        f"config {cap}", "\tbool", "",
    ]
    d = f"{p.lower()}mon"
    tree.rule("", f"obj-$(CONFIG_{p}_MONITOR) += {d}/")
    tree.make.setdefault(d, []).append("obj-y += monitor.o")
    tree.files[f"{d}/monitor.c"] = (
        "int monitor_init(void)\n{\n\tint ret = 0;\n"
        f"#ifdef CONFIG_{cap}\n\tret = 1;\n#endif\n\treturn ret;\n}}\n")
    return cap


def _plant_header(tree: _Tree, p: str) -> str:
    name = f"{p}_TRACE"
    tree.kconfig += [f"config {name}", f'\tbool "{p} tracing"', ""]
    d = f"{p.lower()}trace"
    tree.descend("", d, None)
    tree.rule(d, f"obj-$(CONFIG_{name}) += trace.o")
    tree.files[f"{d}/trace.c"] = '#include "trace.h"\n\nint trace_init(void)\n{\n\treturn 0;\n}\n'
    tree.files[f"{d}/trace.h"] = (
        f"#ifdef CONFIG_{name}\nint trace_init(void);\n#else\n"
        "static inline int trace_init(void) { return 0; }\n#endif\n")
    return name


def _plant_complex(tree: _Tree, p: str) -> str:
    name = f"{p}_TUNING"
    flags = [f"{p}_F{i}" for i in range(COMPLEXITY_FANOUT)]
    tree.kconfig += [f"config {name}", f'\tbool "{p} tuning"', ""]
    for f in flags:
        tree.kconfig += [f"config {f}", f'\tbool "{p} flag {f}"', ""]
    d = f"{p.lower()}tune"
    tree.descend("", d, None)
    tree.rule(d, "obj-y += tune.o")
    cond = " || \\\n\t".join(f"defined(CONFIG_{f})" for f in flags)
    tree.files[f"{d}/tune.c"] = (
        f"int tune(void)\n{{\n\tint t = 0;\n#if defined(CONFIG_{name}) && (\\\n\t{cond})\n"
        "\tt = 1;\n#endif\n\treturn t;\n}\n")
    return name


_PLANTERS = {
    "IneffectiveOption": _plant_ineffective,
    "IgnoredInvisible": _plant_ignored,
    "VendorSubmenu": _plant_vendor,
    "Capability": _plant_capability,
}


def generate_corpus(seed: int, out_dir: str, n_vars: int = 6, n_files: int = 4,
                    nesting_depth: int = 2, category_mix: dict[str, int] | None = None,
                    header_usage: int = 0, complexity: int = 0) -> GeneratedCorpus:
    """Write a reproducible corpus under ``out_dir``.

    The random part has ``n_vars`` options (at most 15 atoms including
    MODULES) and ``n_files`` C files nested up to ``nesting_depth``
    directories deep with conditional blocks up to the same depth.
    ``category_mix`` plants that many mismatches of each category;
    ``header_usage`` and ``complexity`` plant variables that the analysis
    must exclude with the reasons header-usage and complexity-cap.
    """
    dims = CorpusDims(n_vars, n_files, nesting_depth, dict(category_mix or {}),
                      header_usage, complexity)
    rng = random.Random(seed)
    tree = _Tree()
    tree.kconfig += ['mainmenu "Synthetic corpus"', ""]
    names, _ = _random_kconfig(rng, tree, n_vars)
    _random_sources(rng, tree, names, dims)

    labels: dict[str, str] = {}
    excluded: dict[str, str] = {}
    k = 0
    for cat in CATEGORIES:
        for _ in range(dims.category_mix.get(cat, 0)):
            labels[_PLANTERS[cat](tree, f"P{k}")] = cat
            k += 1
    for _ in range(header_usage):
        excluded[_plant_header(tree, f"P{k}")] = "unreliable-variable"
        k += 1
    for _ in range(complexity):
        excluded[_plant_complex(tree, f"P{k}")] = "complexity-cap"
        k += 1

    files = tree.render()
    files["labels.json"] = json.dumps(dict(sorted(labels.items())), indent=2, sort_keys=True) + "\n"
    files["corpus.json"] = json.dumps({"seed": seed, "dims": dims.to_dict(),
                                       "labels": dict(sorted(labels.items())),
                                       "excluded": dict(sorted(excluded.items()))},
                                      indent=2, sort_keys=True) + "\n"
    for path, text in files.items():
        full = os.path.join(out_dir, path)
        os.makedirs(os.path.dirname(full), exist_ok=True)
        with open(full, "w", encoding="utf-8") as fh:
            fh.write(text)
    return GeneratedCorpus(out_dir, seed, dims, labels, excluded, files)
