import json

import pytest

from kmismatch.cpp import (
    ConditionTranslator, UnreliableVarSet, combine_presence, extract_blocks_text, presence_json,
    scan_unreliable, strip_comments,
)
from kmismatch.errors import UnbalancedDirectiveError
from kmismatch.kbuild import FilePresence
from kmismatch.kconfig import parse_kconfig_text
from kmismatch.logic import FALSE, Not, Var, atoms_of
from kmismatch.vm import compile_vm

from conftest import assignments, ref_eval

A, B, C, X = Var("A"), Var("B"), Var("C"), Var("X")


def same(f, g):
    atoms = sorted(atoms_of(f) | atoms_of(g))
    return all(ref_eval(f, e) == ref_eval(g, e) for e in assignments(atoms))


@pytest.fixture
def vm():
    return compile_vm(parse_kconfig_text(
        'config MODULES\n\tbool "m"\nconfig A\n\tbool "a"\nconfig B\n\tbool "b"\n'
        'config C\n\tbool "c"\nconfig X\n\tbool "x"\nconfig T\n\ttristate "t"\n'))


def blocks_of(text, vm=None):
    return extract_blocks_text(text, "f.c", ConditionTranslator(vm))


def test_nesting_is_conjunction(vm):
    outer, inner = blocks_of("#ifdef CONFIG_B\n#ifdef CONFIG_A\nx;\n#endif\n#endif\n", vm)
    assert same(inner.full_condition, B & A)
    assert inner.parent == 0 and inner.depth == 2
    assert (outer.start_line, outer.end_line) == (1, 5)
    assert (inner.start_line, inner.end_line) == (2, 4)


def test_disjunctive_condition(vm):
    (b,) = blocks_of("#if defined(CONFIG_A) || defined(CONFIG_B)\n#endif\n", vm)
    assert same(b.local_condition, A | B)


def test_else_and_elif_negate_earlier_branches(vm):
    first, second, third = blocks_of(
        "#ifdef CONFIG_X\n#elif defined(CONFIG_A)\n#else\n#endif\n", vm)
    assert same(first.local_condition, X)
    assert same(second.local_condition, ~X & A)
    assert same(third.local_condition, ~X & ~A)


def test_ifndef_and_nested_else(vm):
    outer, inner, other = blocks_of("#ifndef CONFIG_A\n#ifdef CONFIG_B\n#else\n#endif\n#endif\n", vm)
    assert same(outer.local_condition, ~A)
    assert same(other.full_condition, ~A & ~B)


def test_tristate_macros(vm):
    t_y, t_m = Var("T_y"), Var("T_m")
    cases = {
        "defined(CONFIG_T)": t_y,
        "defined(CONFIG_T_MODULE)": t_m,
        "IS_ENABLED(CONFIG_T)": t_y | t_m,
        "IS_BUILTIN(CONFIG_T)": t_y,
        "IS_MODULE(CONFIG_T)": t_m,
        "IS_MODULE(CONFIG_A)": FALSE,
        "CONFIG_A == 1": A,
        "CONFIG_A != 1": Not(A),
        "0 == CONFIG_A": Not(A),
    }
    for text, expected in cases.items():
        (b,) = blocks_of(f"#if {text}\n#endif\n", vm)
        assert same(b.local_condition, expected), text


def test_unsupported_expressions_become_opaque(vm):
    tr = ConditionTranslator(vm)
    (b,) = extract_blocks_text("#if CONFIG_A > 3 && defined(CONFIG_B)\n#endif\n", "f.c", tr)
    opaque = [a for a in atoms_of(b.local_condition) if a.startswith("__cpp_")]
    assert len(opaque) == 1 and "B" in atoms_of(b.local_condition)
    assert tr.unparsed == {"A", "B"}
    (b,) = extract_blocks_text("#ifdef __KERNEL__\n#endif\n", "f.c", tr)
    assert b.local_condition == Var("__cpp___KERNEL__")


def test_comments_and_continuations(vm):
    text = "/* #ifdef CONFIG_A */\n// #if CONFIG_B\n#if defined(CONFIG_A) && \\\n    defined(CONFIG_C)\n#endif\n"
    (b,) = blocks_of(text, vm)
    assert same(b.local_condition, A & C)
    assert b.start_line == 3
    assert strip_comments("a /* x\ny */ b").count("\n") == 1


@pytest.mark.parametrize("text", ["#endif\n", "#else\n", "#ifdef CONFIG_A\n", "#if A\n#else\n#else\n#endif\n"])
def test_unbalanced_directives(text):
    with pytest.raises(UnbalancedDirectiveError):
        blocks_of(text)


def test_scan_unreliable(vm):
    sources = {
        "include/util.h": "#ifdef CONFIG_A\nvoid f(void);\n#endif\n",
        "a.c": "#ifdef CONFIG_B\nint x;\n#endif /* CONFIG_B */\nint buf[CONFIG_C];\n",
        "b.c": "#ifdef CONFIG_T_MODULE\n#endif\nstatic int t = IS_ENABLED(CONFIG_X);\n",
    }
    u = scan_unreliable(sources, vm)
    assert u.names == {"A", "C", "X"}
    assert u.reasons["A"] == {"header-usage"}
    assert u.reasons["C"] == {"non-conditional-usage"}
    assert "B" not in u and "T" not in u


def test_unreliable_merge_and_text():
    a, b = UnreliableVarSet(), UnreliableVarSet()
    a.add("X", "header-usage")
    b.add("X", "unparsed-expression")
    b.add("Y", "header-usage")
    m = a.merge(b)
    assert m.names == {"X", "Y"}
    assert m.reason_text("X") == "header-usage,unparsed-expression"
    assert a.names == {"X"}


def test_combine_presence(vm):
    files = [FilePresence("f.c", Var("X")), FilePresence("g.c", A)]
    blocks = blocks_of("#ifdef CONFIG_B\n#endif\n", vm)
    pcs = combine_presence(files, blocks)
    assert [(pc.space, pc.file) for pc in pcs] == [("build", "f.c"), ("build", "g.c"), ("code", "f.c")]
    code = pcs[-1]
    assert same(code.condition, X & B)
    assert code.local_atoms == {"B"}
    assert code.location == "f.c:1-2"


def test_block_without_file_presence_is_dead(vm):
    diags = []
    pcs = combine_presence([], blocks_of("#ifdef CONFIG_B\n#endif\n", vm), diags)
    assert pcs[0].condition == FALSE
    assert [d.kind for d in diags] == ["no-file-presence"]


def test_presence_json(vm):
    pcs = combine_presence([FilePresence("f.c", X)], blocks_of("#ifdef CONFIG_A\n#endif\n", vm))
    data = json.loads(presence_json(pcs))
    assert data[1] == {"condition": "X && A", "file": "f.c", "lines": [1, 2], "space": "code"}
