import pytest

from kmismatch.effects import FeatureEffect, Mismatch
from kmismatch.fixtures import SCENARIOS
from kmismatch.kconfig import parse_kconfig_text
from kmismatch.logic import Var
from kmismatch.triage import (
    CATEGORIES, SEVERITY_OF, StatsSummary, TriagedMismatch, classify, normalize_text, space_label,
    summarize,
)
from kmismatch.vm import compile_vm


def model_and_vm(*scenarios):
    text = ""
    for name in scenarios:
        files = SCENARIOS[name]["files"]
        text += "".join(files[k] for k in SCENARIOS[name]["kconfig"])
    m = parse_kconfig_text(text)
    return m, compile_vm(m)


def mismatch(var, assignment="y", spaces=("build",)):
    atom = var if assignment == "y" else f"{var}_m"
    return Mismatch(var, assignment, atom, FeatureEffect(atom, Var("Z"), ("f.c",), frozenset(spaces)))


@pytest.mark.parametrize("scenario, var, category, severity", [
    ("vendor", "NET_VENDOR_QUALCOMM", "VendorSubmenu", "Unproblematic"),
    ("xen", "XEN_HAVE_VPMU", "Capability", "Unproblematic"),
    ("ath5k", "ATH_PCI", "IneffectiveOption", "Problematic"),
    ("hsu", "HSU_DMA_PCI", "IgnoredInvisible", "Problematic"),
])
def test_fixture_categories(scenario, var, category, severity):
    model, vm = model_and_vm(scenario)
    t = classify(mismatch(var), model, vm)
    assert (t.category, t.severity) == (category, severity)


def test_decision_order():
    model = parse_kconfig_text(
        'config ACME_VENDOR_X\n\tbool "v"\n'
        'config BOARD_HAS_FPU\n\tbool\n'
        'config VIS_HAS_FPU\n\tbool "visible capability name"\n'
        'config HIDDEN_VENDOR_Y\n\tbool\n'
        'config WRAPPED\n\tbool "w"\n\thelp\n\t  It Doesn’t   directly\n\t  AFFECT the kernel.\n')
    vm = compile_vm(model)
    got = {n: classify(mismatch(n), model, vm).category for n in model.options}
    assert got == {
        "ACME_VENDOR_X": "VendorSubmenu",
        "BOARD_HAS_FPU": "Capability",
        "VIS_HAS_FPU": "IneffectiveOption",
        "HIDDEN_VENDOR_Y": "IgnoredInvisible",
        "WRAPPED": "VendorSubmenu",
    }


def test_vendor_patterns_are_configurable():
    model = parse_kconfig_text('config NET_GOOGLE\n\tbool "g"\nconfig ACME_VENDOR_X\n\tbool "v"\n')
    vm = compile_vm(model)
    assert classify(mismatch("NET_GOOGLE"), model, vm, [r"NET_GOOGLE"]).category == "VendorSubmenu"
    assert classify(mismatch("ACME_VENDOR_X"), model, vm, []).category == "IneffectiveOption"


def test_evidence_is_recorded():
    model, vm = model_and_vm("vendor")
    t = classify(mismatch("NET_VENDOR_QUALCOMM"), model, vm)
    assert t.evidence[0] == "visible"
    assert "help-text phrase" in t.evidence


def test_severity_partition():
    assert sorted(c for c in CATEGORIES if SEVERITY_OF[c] == "Problematic") == ["IgnoredInvisible", "IneffectiveOption"]
    assert sorted(c for c in CATEGORIES if SEVERITY_OF[c] == "Unproblematic") == ["Capability", "VendorSubmenu"]


def test_space_labels():
    assert space_label({"code"}) == "code-only"
    assert space_label({"build"}) == "build-only"
    assert space_label({"code", "build"}) == "both"


def test_normalize_text():
    assert normalize_text("Doesn’t\n   Directly") == "doesn't directly"


def test_empty_summary():
    s = summarize([], None)
    assert set(s.categories.values()) == {0}
    assert s.total_reports == 0 and s.total_variables == 0
    assert all(v == 0 for row in s.severity_space.values() for v in row.values())
    assert s.type_visibility == {}


def test_summary_counts_tristates_once():
    model = parse_kconfig_text('config MODULES\n\tbool "m"\nconfig T\n\ttristate "t"\nconfig B\n\tbool\n')
    vm = compile_vm(model)
    ts = [classify(mismatch("T", "y", ("code",)), model, vm),
          classify(mismatch("T", "m", ("code", "build")), model, vm),
          classify(mismatch("B"), model, vm)]
    s = summarize(ts, vm)
    assert s.total_reports == 3 and s.total_variables == 2
    assert s.type_visibility == {"tristate": {"visible": 1, "invisible": 0},
                                 "bool": {"visible": 0, "invisible": 1}}
    assert s.severity_space["Problematic"] == {"code-only": 1, "build-only": 1, "both": 1}
    assert sum(s.categories.values()) == s.total_reports
    assert sum(sum(r.values()) for r in s.type_visibility.values()) == s.total_variables
    assert StatsSummary.from_dict(s.to_dict()) == s


def test_triaged_round_trip():
    model, vm = model_and_vm("ath5k")
    t = classify(mismatch("ATH_PCI"), model, vm)
    assert TriagedMismatch.from_dict(t.to_dict()) == t
