import os

import pytest

from kmismatch.errors import KconfigError
from kmismatch.pipeline import RunConfig, run_analysis, run_pipeline
from kmismatch.report import emit_report


def write(root, files):
    for path, text in files.items():
        full = os.path.join(root, path)
        os.makedirs(os.path.dirname(full), exist_ok=True)
        with open(full, "w") as fh:
            fh.write(text)
    return str(root)


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        RunConfig(str(tmp_path / "missing"))
    with pytest.raises(ValueError):
        RunConfig(str(tmp_path))            # no Kconfig
    (tmp_path / "Kconfig").write_text("")
    RunConfig(str(tmp_path))
    for bad in ({"var_cap": 0}, {"witness_limit": 0}, {"max_conflicts": 0},
                {"max_seconds": 0}, {"output_format": "xml"}):
        with pytest.raises(ValueError):
            RunConfig(str(tmp_path), **bad)


def test_model_only_corpus_puts_everything_in_unused(tmp_path):
    root = write(tmp_path, {"Kconfig": 'config A\n\tbool "a"\nconfig T\n\ttristate "t"\n'})
    report = run_pipeline(RunConfig(root))
    assert report.unused == ["A", "T_m", "T_y"]
    assert report.mismatches == [] and report.excluded == [] and report.covered == []


def test_ath5k_fixture(fixture_tree):
    report = run_pipeline(RunConfig(fixture_tree("ath5k")))
    (t,) = report.mismatches
    assert (t.mismatch.variable, t.mismatch.assignment, t.category, t.severity) == (
        "ATH_PCI", "y", "IneffectiveOption", "Problematic")


def test_four_category_fixture(fixture_tree):
    report = run_pipeline(RunConfig(fixture_tree("four_category")))
    assert report.stats.categories == {c: 1 for c in report.stats.categories}
    assert report.stats.total_reports == 4


def test_accounting_is_a_partition(fixture_tree):
    r = run_analysis(RunConfig(fixture_tree("four_category")))
    buckets = ([t.mismatch.atom for t in r.report.mismatches] + [m.atom for m in r.report.excluded]
               + r.report.covered + r.report.unused)
    model_atoms = sorted(a for atoms in r.vm.atom_map.values() for a in atoms)
    assert sorted(buckets) == model_atoms


def test_deterministic_output(fixture_tree, tmp_path):
    a = emit_report(run_pipeline(RunConfig(fixture_tree("four_category"))), "json")
    b = emit_report(run_pipeline(RunConfig(fixture_tree("four_category"))), "json")
    assert a == b


def test_unreadable_entry_is_fatal(tmp_path):
    root = write(tmp_path, {"Kconfig": 'source "gone/Kconfig"\n'})
    with pytest.raises(KconfigError):
        run_pipeline(RunConfig(root))


def test_frontend_problems_degrade(tmp_path):
    root = write(tmp_path, {
        "Kconfig": 'config A\n\tbool "a"\nconfig B\n\tbool "b"\nconfig C\n\tbool "c"\n',
        "Makefile": "obj-y += a.o b.o\nifeq ($(CONFIG_C),y)\nobj-y += c.o\nendif\n",
        "a.c": "#ifdef CONFIG_A\nint a;\n",                    # never closed
        "b.c": "#ifdef CONFIG_B\nint b;\n#endif\n",
        "c.c": "",
    })
    r = run_analysis(RunConfig(root))
    kinds = {d.kind for d in r.diagnostics}
    assert {"unbalanced-directive", "bail-out"} <= kinds
    # a.c's blocks are dropped, so A is no longer used anywhere
    assert r.unreliable.reasons["A"] == {"unparsed-expression"}
    assert r.unreliable.reasons["C"] == {"unparsed-expression"}
    assert r.report.unused == ["A", "C"]
    assert r.report.covered == ["B"]
    assert r.report.mismatches == []


def test_header_usage_excludes(tmp_path):
    root = write(tmp_path, {
        "Kconfig": 'config A\n\tbool "a"\n',
        "Makefile": "obj-$(CONFIG_A) += a.o\n", "a.c": "", "a.h": "#ifdef CONFIG_A\n#endif\n",
    })
    (m,) = run_pipeline(RunConfig(root)).excluded
    assert (m.variable, m.excluded, m.detail) == ("A", "unreliable-variable", "header-usage")
