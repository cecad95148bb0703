import json
import os

import pytest

from kmismatch.errors import DescentCycleError
from kmismatch.kbuild import compose_file_presence, extract_build_rules_text, file_presence_json
from kmismatch.kconfig import parse_kconfig_text
from kmismatch.logic import FALSE, TRUE, Var
from kmismatch.vm import compile_vm

from conftest import assignments, ref_eval


def write(root, files):
    for path, text in files.items():
        full = os.path.join(root, path)
        os.makedirs(os.path.dirname(full), exist_ok=True)
        with open(full, "w") as fh:
            fh.write(text)
    return str(root)


def equivalent(f, g):
    atoms = sorted({*_atoms(f), *_atoms(g)})
    return all(ref_eval(f, env) == ref_eval(g, env) for env in assignments(atoms))


def _atoms(f):
    from kmismatch.logic import atoms_of
    return atoms_of(f)


def test_object_list_rule():
    (rule,) = extract_build_rules_text("obj-$(CONFIG_FOO) += foo.o\n").rules
    assert (rule.kind, rule.guard, rule.aspect, rule.targets) == ("object-list", "FOO", "ym", ("foo.o",))


def test_composite_and_object_rules():
    ext = extract_build_rules_text("ath5k-$(CONFIG_ATH5K_PCI) += pci.o\nobj-$(CONFIG_ATH5K) += ath5k.o\n")
    comp, obj = ext.rules
    assert comp.kind == "composite-object" and comp.composite == "ath5k" and comp.guard == "ATH5K_PCI"
    assert comp.aspect == "y"
    assert obj.kind == "object-list" and obj.guard == "ATH5K"


def test_subdir_descent_rule():
    (rule,) = extract_build_rules_text("obj-$(CONFIG_HSU_DMA) += hsu/\n").rules
    assert rule.kind == "subdir-descent" and rule.targets == ("hsu/",)
    (rule,) = extract_build_rules_text("subdir-$(CONFIG_X) += tools\n").rules
    assert rule.kind == "subdir-descent" and rule.targets == ("tools/",)


def test_unconditional_and_disabled_selectors():
    rules = extract_build_rules_text("obj-y += a.o\nobj-m += b.o\nobj-n += c.o\nfoo-objs := x.o y.o\n").rules
    assert [(r.kind, r.guard) for r in rules] == [
        ("object-list", None), ("object-list", None), ("composite-object", None)]


def test_continuations_and_comments():
    ext = extract_build_rules_text("obj-$(CONFIG_A) += a.o \\\n\tb.o # trailing\n# obj-$(CONFIG_B) += z.o\n")
    (rule,) = ext.rules
    assert rule.targets == ("a.o", "b.o")
    assert ext.diagnostics == []


def test_make_conditionals_bail_out():
    ext = extract_build_rules_text("ifeq ($(CONFIG_X),y)\nobj-y += x.o\nendif\n"
                                   "obj-$(call cc-option,$(CONFIG_Y)) += y.o\n")
    assert ext.unreliable == {"X": "unparsed-expression", "Y": "unparsed-expression"}
    assert {d.kind for d in ext.diagnostics} == {"bail-out"}


def test_flag_lines_are_reported_not_mined():
    ext = extract_build_rules_text("ccflags-$(CONFIG_DEBUG) += -DDEBUG\n")
    assert ext.rules == [] and ext.unreliable == {}
    assert [d.kind for d in ext.diagnostics] == ["compiler-settings"]


KCONFIG = ('config MODULES\n\tbool "m"\nconfig FOO\n\tbool "foo"\nconfig ATH5K\n\ttristate "a"\n'
           'config ATH_PCI\n\tbool "p"\nconfig HSU_DMA\n\tbool "h"\nconfig HSU_DMA_PCI\n\tbool "hp"\n')


@pytest.fixture
def vm():
    return compile_vm(parse_kconfig_text(KCONFIG))


def conditions(root, vm, out=None):
    return {fp.source_file: fp.condition for fp in compose_file_presence(root, vm, out)}


def test_file_conditions(tmp_path, vm):
    root = write(tmp_path, {
        "Makefile": "obj-$(CONFIG_FOO) += foo.o\nobj-y += ath/ dma/\n",
        "foo.c": "", "unused.c": "",
        "ath/Makefile": "ath5k-y += base.o\nath5k-$(CONFIG_ATH_PCI) += pci.o\nobj-$(CONFIG_ATH5K) += ath5k.o\n",
        "ath/base.c": "", "ath/pci.c": "",
        "dma/Makefile": "obj-$(CONFIG_HSU_DMA) += hsu/\n",
        "dma/hsu/Makefile": "obj-$(CONFIG_HSU_DMA_PCI) += pci.o\n",
        "dma/hsu/pci.c": "",
    })
    c = conditions(root, vm)
    assert c["foo.c"] == Var("FOO")
    assert c["unused.c"] == FALSE
    ath = Var("ATH5K_y") | Var("ATH5K_m")
    assert equivalent(c["ath/pci.c"], Var("ATH_PCI") & ath)
    assert equivalent(c["ath/base.c"], ath)
    assert equivalent(c["dma/hsu/pci.c"], Var("HSU_DMA_PCI") & Var("HSU_DMA"))


def test_multiple_rules_for_one_file_are_disjoined(tmp_path, vm):
    root = write(tmp_path, {"Makefile": "obj-$(CONFIG_FOO) += x.o\nobj-$(CONFIG_ATH_PCI) += x.o\n", "x.c": ""})
    assert equivalent(conditions(root, vm)["x.c"], Var("FOO") | Var("ATH_PCI"))


def test_kbuild_preferred_over_makefile(tmp_path, vm):
    root = write(tmp_path, {"Makefile": "obj-y += a.o\n", "Kbuild": "obj-$(CONFIG_FOO) += a.o\n", "a.c": ""})
    assert conditions(root, vm)["a.c"] == Var("FOO")


def test_unknown_symbols_get_fresh_atoms(tmp_path, vm):
    root = write(tmp_path, {"Makefile": "obj-$(CONFIG_ELSEWHERE) += a.o\n", "a.c": ""})
    out = {}
    assert conditions(root, vm, out)["a.c"] == Var("ELSEWHERE")
    assert out["fresh_atoms"] == ["ELSEWHERE"]
    assert [d.kind for d in out["diagnostics"]] == ["unknown-symbol"]


def test_descent_cycle_is_an_error(tmp_path, vm):
    root = write(tmp_path, {"Makefile": "obj-y += a/\n", "a/Makefile": "obj-y += ../a/\n"})
    with pytest.raises(DescentCycleError):
        compose_file_presence(root, vm)


def test_missing_directory_and_source_are_diagnosed(tmp_path, vm):
    root = write(tmp_path, {"Makefile": "obj-y += gone/ ghost.o\n"})
    out = {}
    assert conditions(root, vm, out) == {}
    assert sorted(d.kind for d in out["diagnostics"]) == ["missing-directory", "missing-source"]


def test_no_makefiles_means_nothing_is_built(tmp_path, vm):
    root = write(tmp_path, {"a.c": "", "sub/b.c": ""})
    assert conditions(root, vm) == {"a.c": FALSE, "sub/b.c": FALSE}


def test_presence_json_is_stable(tmp_path, vm):
    root = write(tmp_path, {"Makefile": "obj-$(CONFIG_FOO) += foo.o\nobj-y += bar.o\n", "foo.c": "", "bar.c": ""})
    text = file_presence_json(compose_file_presence(root, vm))
    data = json.loads(text)
    assert [d["file"] for d in data] == ["bar.c", "foo.c"]
    assert data[0]["condition"] == "true" and data[1]["condition"] == "FOO"
    assert text == file_presence_json(compose_file_presence(root, vm))


def test_without_model_guards_are_plain_atoms(tmp_path):
    root = write(tmp_path, {"Makefile": "obj-$(CONFIG_A) += a.o\nobj-y += b.o\n", "a.c": "", "b.c": ""})
    c = {fp.source_file: fp.condition for fp in compose_file_presence(root)}
    assert c == {"a.c": Var("A"), "b.c": TRUE}
