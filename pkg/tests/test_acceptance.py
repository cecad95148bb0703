"""Acceptance checks, one test per headline criterion.

Each test records a single PASS/FAIL line; the lines are printed together in
the terminal summary (see conftest.py). Tolerances are pinned as constants.
"""

import os
import random
import time

import numpy as np

from conftest import ACCEPTANCE_LINES, random_formula
from kmismatch.cnf import to_cnf
from kmismatch.corpus import generate_corpus
from kmismatch.effects import PresenceCondition, analyze_effects, feature_effect
from kmismatch.fixtures import write_fixture
from kmismatch.logic import Implies, Not, Var, atoms_of, conj
from kmismatch.oracle import oracle_disagreements
from kmismatch.pipeline import RunConfig, run_analysis
from kmismatch.report import emit_report
from kmismatch.sat import enumerate_models, is_satisfiable

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")

ORACLE_CORPORA = 200
ORACLE_MAX_ATOMS = 15
ORACLE_MAX_FILES = 10
ORACLE_SECONDS = 60.0
EFFECT_CASES = 1000
EFFECT_ATOMS = 8
MONOTONE_CORPORA = 100
SAT_CASES = 1000
SAT_ATOMS = 10


def verdict(name, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


def table(f, atoms):
    """Truth table of ``f`` over ``atoms`` as a bool vector, row i = binary digits of i."""
    rows = np.arange(2 ** len(atoms))
    cols = {a: ((rows >> i) & 1).astype(bool) for i, a in enumerate(atoms)}

    def ev(g):
        k = g.kind
        if k == "const":
            return np.full(rows.shape, g.value)
        if k == "var":
            return cols[g.name]
        if k == "not":
            return ~ev(g.child)
        if k == "and":
            return np.logical_and.reduce([ev(c) for c in g.children])
        if k == "or":
            return np.logical_or.reduce([ev(c) for c in g.children])
        if k == "xor":
            return ev(g.left) ^ ev(g.right)
        if k == "implies":
            return ~ev(g.left) | ev(g.right)
        raise AssertionError(k)

    return ev(f)


def analyzed_fixture(tmp_path, name):
    root = str(tmp_path / name)
    write_fixture(name, root)
    return run_analysis(RunConfig(root))


def test_oracle_equivalence(tmp_path):
    rng = random.Random(2016)
    start = time.perf_counter()
    bad, positives, negatives, biggest = [], 0, 0, 0
    for seed in range(ORACLE_CORPORA):
        root = str(tmp_path / f"c{seed}")
        g = generate_corpus(seed, root, n_vars=rng.randint(1, 14),
                            n_files=rng.randint(1, ORACLE_MAX_FILES),
                            nesting_depth=rng.randint(0, 3))
        r = run_analysis(RunConfig(root))
        assert len(r.vm.atoms) <= ORACLE_MAX_ATOMS
        assert sum(p.endswith(".c") for p in g.files) <= ORACLE_MAX_FILES
        biggest = max(biggest, len(r.vm.atoms))
        bad += [(seed, *d) for d in oracle_disagreements(r.vm, r.pcs, r.analysis)]
        reported = sum(m.reported for m in r.analysis.mismatches)
        positives += reported
        negatives += len(r.analysis.covered)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < ORACLE_SECONDS and positives > 0 and negatives > 0
    verdict("oracle equivalence", ok,
            f"{ORACLE_CORPORA} corpora (up to {biggest} atoms), {positives} mismatch and "
            f"{negatives} covered verdicts, {len(bad)} disagreements, {elapsed:.1f}s < {ORACLE_SECONDS:.0f}s")


def test_feature_effect_matches_truth_table():
    rng = random.Random(1)
    atoms = [f"A{i}" for i in range(EFFECT_ATOMS)]
    failures = 0
    for case in range(EFFECT_CASES):
        v = rng.choice(atoms)
        conds = [random_formula(rng, atoms, 3) for _ in range(rng.randint(1, 4))]
        conds.append(random_formula(rng, atoms, 2) & Var(v))      # at least one mentions v
        pcs = [PresenceCondition(c, "code", f"f{i}.c") for i, c in enumerate(conds)]
        expected = np.zeros(2 ** EFFECT_ATOMS, dtype=bool)
        col = atoms.index(v)
        for c in conds:
            if v not in atoms_of(c):
                continue
            t = table(c, atoms)
            # rows with v true are i | bit, rows with v false are i & ~bit
            idx = np.arange(t.size)
            expected |= t[idx | (1 << col)] ^ t[idx & ~(1 << col)]
        got = table(feature_effect(v, pcs).effect, atoms)
        failures += not np.array_equal(expected, got)
    verdict("feature effect definition", failures == 0,
            f"{EFFECT_CASES} random presence-condition sets over {EFFECT_ATOMS} atoms, {failures} failures")


def test_ath5k(tmp_path):
    r = analyzed_fixture(tmp_path, "ath5k")
    with open(os.path.join(GOLDEN, "ath5k.json"), "rb") as fh:
        golden_json = fh.read()
    with open(os.path.join(GOLDEN, "ath5k.txt"), "rb") as fh:
        golden_text = fh.read()
    (t,) = r.report.mismatches
    m = t.mismatch
    witness_ok = any(w.get("ATH5K_y") is False and w.get("ATH5K_m") is False for w in m.witnesses)
    ok = ((m.variable, m.assignment, t.category, t.severity)
          == ("ATH_PCI", "y", "IneffectiveOption", "Problematic")
          and witness_ok and r.report.excluded == []
          and emit_report(r.report, "json") == golden_json
          and emit_report(r.report, "text") == golden_text)
    verdict("ATH5K fixture", ok,
            f"{len(r.report.mismatches)} mismatch {m.variable}={m.assignment} {t.category}/{t.severity}, "
            f"witness with ATH5K off: {witness_ok}, golden bytes match")


def test_hsu(tmp_path):
    r = analyzed_fixture(tmp_path, "hsu")
    cats = {t.mismatch.variable: t.category for t in r.report.mismatches}
    pci, dma = r.vm.guard("HSU_DMA_PCI", "y"), r.vm.guard("HSU_DMA")
    sat = bool(is_satisfiable(to_cnf(conj([r.vm.formula, pci, Not(dma)]))))
    ok = cats.get("HSU_DMA_PCI") == "IgnoredInvisible" and sat
    verdict("HSU fixture", ok,
            f"HSU_DMA_PCI -> {cats.get('HSU_DMA_PCI')}, model admits HSU_DMA_PCI=y with HSU_DMA=n: {sat}")


def test_vendor_and_capability(tmp_path):
    vendor = analyzed_fixture(tmp_path, "vendor").report.mismatches
    xen = analyzed_fixture(tmp_path, "xen").report.mismatches
    stats = analyzed_fixture(tmp_path, "four_category").report.stats
    got = [(t.mismatch.variable, t.category, t.severity) for t in vendor + xen]
    partition = {s: sorted(c for c, n in cats.items() if n)
                 for s, cats in stats.severity_categories.items()}
    ok = (got == [("NET_VENDOR_QUALCOMM", "VendorSubmenu", "Unproblematic"),
                  ("XEN_HAVE_VPMU", "Capability", "Unproblematic")]
          and partition == {"Problematic": ["IgnoredInvisible", "IneffectiveOption"],
                            "Unproblematic": ["Capability", "VendorSubmenu"]})
    verdict("vendor and capability fixtures", ok, f"{got}; severity partition {partition}")


def test_tristate_doubling(tmp_path):
    report = analyzed_fixture(tmp_path, "tristate").report
    atoms = sorted(t.mismatch.atom for t in report.mismatches)
    ok = atoms == ["NET_DRV_m", "NET_DRV_y"] and report.stats.total_reports == 2 \
        and report.stats.total_variables == 1
    verdict("tristate doubling", ok,
            f"{report.stats.total_reports} reports {atoms}, {report.stats.total_variables} distinct variable")


def test_monotone_closure(tmp_path):
    rng = random.Random(7)
    cats = ["IneffectiveOption", "IgnoredInvisible", "VendorSubmenu", "Capability"]
    closures, failures = 0, []
    for seed in range(MONOTONE_CORPORA):
        root = str(tmp_path / f"m{seed}")
        generate_corpus(seed, root, n_vars=rng.randint(2, 10), n_files=rng.randint(2, 8),
                        nesting_depth=rng.randint(1, 3), category_mix={rng.choice(cats): 1})
        r = run_analysis(RunConfig(root))
        before = {m.atom for m in r.analysis.mismatches if m.reported}
        for atom in sorted(before):
            fe = r.analysis.effects[atom].effect
            after_run = analyze_effects(r.vm.strengthen(Implies(Var(atom), fe)), r.pcs, r.unreliable)
            after = {m.atom for m in after_run.mismatches if m.reported}
            closures += 1
            if atom in after or not after <= before:
                failures.append((seed, atom, sorted(after - before)))
    ok = not failures and closures >= MONOTONE_CORPORA
    verdict("monotone closure", ok,
            f"{MONOTONE_CORPORA} corpora, {closures} strengthened models, {len(failures)} failures")


def test_exclusion_filters(tmp_path):
    header_ok = complex_ok = 0
    for seed in range(10):
        root = str(tmp_path / f"h{seed}")
        g = generate_corpus(seed, root, n_vars=4, n_files=3, header_usage=1, complexity=1)
        r = run_analysis(RunConfig(root))
        excluded = {m.variable: m for m in r.report.excluded}
        reported = {t.mismatch.variable for t in r.report.mismatches}
        for name, reason in g.excluded.items():
            m = excluded.get(name)
            if m is None or m.excluded != reason or name in reported:
                continue
            if reason == "unreliable-variable" and "header-usage" in m.detail:
                header_ok += 1
            elif reason == "complexity-cap":
                complex_ok += 1
    ok = header_ok == 10 and complex_ok == 10
    verdict("exclusion filters", ok,
            f"header-usage excluded {header_ok}/10, complexity-cap excluded {complex_ok}/10, no crashes")


def test_sat_substrate():
    rng = random.Random(3)
    atoms = [f"X{i}" for i in range(SAT_ATOMS)]
    failures = 0
    for case in range(SAT_CASES):
        f = random_formula(rng, atoms, rng.randint(2, 5))
        used = sorted(atoms_of(f))
        t = table(f, used)
        res = is_satisfiable(to_cnf(f))
        if bool(res) != bool(t.any()):
            failures += 1
            continue
        if res and not table(f, atoms)[sum(1 << i for i, a in enumerate(atoms)
                                           if res.model.get(a, False))]:
            failures += 1
            continue
        want = {tuple(bool((i >> j) & 1) for j in range(len(used))) for i in np.flatnonzero(t)}
        got = enumerate_models(f, used, limit=2 ** len(used) + 1, var_cap=SAT_ATOMS)
        got_rows = [tuple(m[a] for a in used) for m in got]
        failures += len(got_rows) != len(set(got_rows)) or set(got_rows) != want
    verdict("SAT substrate", failures == 0,
            f"{SAT_CASES} random formulas over up to {SAT_ATOMS} atoms, {failures} failures")


def test_pinned_constants_are_in_range():
    # guards against someone loosening the suite
    assert (ORACLE_CORPORA, ORACLE_SECONDS, EFFECT_CASES, MONOTONE_CORPORA, SAT_CASES) \
        >= (200, 0, 1000, 100, 1000)
    assert ORACLE_SECONDS <= 60 and EFFECT_ATOMS <= 8 and SAT_ATOMS <= 10
