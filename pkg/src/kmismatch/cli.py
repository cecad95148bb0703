"""Command-line entry point.

Exit codes: 0 when no problematic mismatch is found (or the oracle agrees),
1 when problematic mismatches are found (or the oracle disagrees), 2 on a
fatal error.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from . import __version__
from .cnf import to_cnf
from .corpus import generate_corpus
from .errors import KmismatchError
from .logic import to_text
from .oracle import oracle_disagreements
from .pipeline import RunConfig, run_analysis
from .report import emit_report
from .sat import DEFAULT_VAR_CAP
from .triage import CATEGORIES, DEFAULT_VENDOR_PATTERNS

__all__ = ["main", "build_parser"]


def _run_flags(p: argparse.ArgumentParser):
    p.add_argument("--source-root", default=".", help="corpus root (default: current directory)")
    p.add_argument("--kconfig-entry", default="Kconfig", help="entry Kconfig, relative to the root")
    p.add_argument("--output-format", choices=("json", "text"), default="text")
    p.add_argument("--var-cap", type=int, default=DEFAULT_VAR_CAP,
                   help="largest feature effect (in atoms) still analyzed")
    p.add_argument("--witness-limit", type=int, default=32)
    p.add_argument("--max-conflicts", type=int, default=1_000_000, help="solver conflicts per query")
    p.add_argument("--max-seconds", type=float, default=10.0, help="solver seconds per query")
    p.add_argument("--vendor-pattern", "--vendor-patterns", action="append", dest="vendor_patterns",
                   help="regex for vendor grouping options; repeatable")


def _config(args) -> RunConfig:
    patterns = tuple(args.vendor_patterns) if args.vendor_patterns else DEFAULT_VENDOR_PATTERNS
    return RunConfig(source_root=args.source_root, kconfig_entry=args.kconfig_entry,
                     var_cap=args.var_cap, witness_limit=args.witness_limit,
                     max_conflicts=args.max_conflicts, max_seconds=args.max_seconds,
                     vendor_patterns=patterns, output_format=args.output_format)


def _write(data: bytes, path: str | None):
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def cmd_analyze(args) -> int:
    result = run_analysis(_config(args))
    _write(emit_report(result.report, args.output_format), args.output)
    if args.dimacs:
        with open(args.dimacs, "w", encoding="utf-8") as fh:
            fh.write(to_cnf(result.vm.formula).to_dimacs())
    return 1 if result.report.problematic else 0


def _mix(items) -> dict[str, int]:
    mix: dict[str, int] = {}
    for item in items or ():
        cat, _, n = item.partition("=")
        if cat not in CATEGORIES:
            raise ValueError(f"unknown category {cat!r}; choose from {', '.join(CATEGORIES)}")
        mix[cat] = mix.get(cat, 0) + (int(n) if n else 1)
    return mix


def cmd_gen_corpus(args) -> int:
    g = generate_corpus(args.seed, args.out, args.n_vars, args.n_files, args.nesting_depth,
                        _mix(args.mix), args.header_usage, args.complexity)
    print(f"wrote {len(g.files)} files to {g.root} "
          f"({len(g.labels)} planted labels, {len(g.excluded)} planted exclusions)")
    return 0


def _oracle_one(cfg: RunConfig, label: str) -> int:
    result = run_analysis(cfg)
    bad = oracle_disagreements(result.vm, result.pcs, result.analysis)
    for atom, expected, got in bad:
        print(f"{label}: {atom}: oracle {expected}, analysis {got}")
    n = len(result.analysis.effects)
    print(f"{label}: {n} atoms checked, {len(bad)} disagreements")
    return len(bad)


def cmd_oracle_check(args) -> int:
    if args.source_root is not None:
        cfg = RunConfig(args.source_root, args.kconfig_entry)
        return 1 if _oracle_one(cfg, args.source_root) else 0
    total = 0
    with tempfile.TemporaryDirectory() as tmp:
        for seed in range(args.seed, args.seed + args.corpora):
            root = os.path.join(tmp, f"corpus{seed}")
            generate_corpus(seed, root, args.n_vars, args.n_files, args.nesting_depth)
            total += _oracle_one(RunConfig(root), f"seed {seed}")
    print(f"{args.corpora} corpora, {total} disagreements")
    return 1 if total else 0


def cmd_explain(args) -> int:
    result = run_analysis(_config(args))
    name = args.var[7:] if args.var.startswith("CONFIG_") else args.var
    vm = result.vm
    if name not in vm.atom_map:
        print(f"{name} is not declared in the model", file=sys.stderr)
        return 2
    opt = result.model.options.get(name)
    where = f" ({opt.declaring_file}:{opt.line})" if opt else ""
    print(f"{name}: {vm.type_map.get(name)}, {'visible' if vm.visibility.get(name) else 'invisible'}{where}")
    constraints = vm.constraints_about(name)
    if constraints:
        print("constraints:")
        for c in constraints:
            print(f"  {c}")
    if name in result.unreliable:
        print(f"unreliable: {result.unreliable.reason_text(name)}")
    records = {m.atom: m for m in result.analysis.mismatches}
    triaged = {t.mismatch.atom: t for t in result.report.mismatches}
    problematic = False
    for atom in vm.atom_map[name]:
        print()
        print(f"atom {atom}:")
        pcs = [pc for pc in result.pcs if atom in pc.atoms]
        if not pcs:
            print("  unused in the solution space")
            continue
        print("  presence conditions:")
        for pc in pcs:
            print(f"    {pc.space:5} {pc.location}: {to_text(pc.condition)}")
        fe = result.analysis.effects.get(atom)
        if fe is not None:
            print(f"  feature effect: {to_text(fe.effect)}")
        m = records.get(atom)
        if m is None:
            print("  status: covered (selecting it always changes the product)")
        elif m.excluded:
            print(f"  status: excluded, {m.excluded}" + (f" ({m.detail})" if m.detail else ""))
        else:
            t = triaged[atom]
            problematic |= t.severity == "Problematic"
            print(f"  status: mismatch, {t.category} ({t.severity}, {t.spaces})")
            for i, w in enumerate(m.witnesses, 1):
                body = ", ".join(f"{k}={'y' if v else 'n'}" for k, v in w.items())
                print(f"  witness {i}: {body}")
    return 1 if problematic else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kmismatch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("analyze", help="report configuration mismatches in a source tree")
    _run_flags(p)
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--dimacs", help="also write the variability model as DIMACS CNF")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("explain", help="show presence conditions, effect and witnesses of one option")
    p.add_argument("var", metavar="VAR")
    _run_flags(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("gen-corpus", help="write a seeded synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--n-vars", type=int, default=6)
    p.add_argument("--n-files", type=int, default=4)
    p.add_argument("--nesting-depth", type=int, default=2)
    p.add_argument("--mix", action="append", metavar="CATEGORY=N",
                   help="plant N mismatches of CATEGORY; repeatable")
    p.add_argument("--header-usage", type=int, default=0)
    p.add_argument("--complexity", type=int, default=0)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("oracle-check", help="compare verdicts with exhaustive enumeration")
    p.add_argument("--source-root", help="check this corpus instead of generated ones")
    p.add_argument("--kconfig-entry", default="Kconfig")
    p.add_argument("--corpora", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-vars", type=int, default=6)
    p.add_argument("--n-files", type=int, default=4)
    p.add_argument("--nesting-depth", type=int, default=2)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KmismatchError, ValueError, OSError) as exc:
        print(f"kmismatch: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
