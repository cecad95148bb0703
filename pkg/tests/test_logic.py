import numpy as np
import pytest
from hypothesis import given, settings

from kmismatch.errors import FormulaSyntaxError, UnboundAtomError
from kmismatch.logic import (
    FALSE, TRUE, And, Implies, Not, Or, Var, Xor, atoms_of, check_atom_name, conj, disj,
    evaluate, iff, ite, parse_formula, simplify, substitute, to_text, truth_table,
)

from conftest import ATOMS, assignments, formulas, ref_eval

A, B, C, V = Var("A"), Var("B"), Var("C"), Var("v")


def test_evaluate_examples():
    assert evaluate(A ^ A, {"A": True}) is False
    assert evaluate(A & ~A, {"A": False}) is False
    assert evaluate(A >> B, {"A": True, "B": False}) is False


def test_evaluate_unbound_atom():
    with pytest.raises(UnboundAtomError):
        evaluate(A & B, {"A": True})


def test_substitute_examples():
    assert simplify(substitute(V & A, "v", True)) == A
    assert substitute(A | B, "v", False) == A | B
    assert simplify(substitute(~V, "v", True)) == FALSE


def test_atoms_of_examples():
    assert atoms_of(TRUE) == frozenset()
    assert atoms_of(A & (B | A)) == {"A", "B"}
    assert atoms_of(A ^ ~C) == {"A", "C"}


def test_simplify_examples():
    assert simplify(A & TRUE) == A
    assert simplify((TRUE & A) ^ (FALSE & A)) == A
    assert simplify(Not(Not(B))) == B
    assert simplify(A | ~A) == TRUE
    assert simplify(A & B & A) == A & B


def test_nary_flattening_and_helpers():
    assert And(A, And(B, C)).children == (A, B, C)
    assert conj() == TRUE and disj() == FALSE
    assert conj(A) == A
    for env in assignments("ABC"):
        assert evaluate(iff(A, B), env) == (env["A"] == env["B"])
        assert evaluate(ite(A, B, C), env) == (env["B"] if env["A"] else env["C"])


def test_truth_table_row_layout():
    atoms, table = truth_table(A & ~B, ["A", "B"])
    assert atoms == ["A", "B"]
    # row i sets atoms[j] to bit j of i
    assert table.tolist() == [False, True, False, False]


def test_text_form():
    assert to_text((A & B) | ~C) == "(A && B) || !C"
    assert parse_formula("A -> B -> C") == Implies(A, Implies(B, C))
    assert parse_formula("A || B && C") == Or(A, And(B, C))
    assert parse_formula("true ^ false") == Xor(TRUE, FALSE)
    with pytest.raises(FormulaSyntaxError):
        parse_formula("A && (B")
    with pytest.raises(FormulaSyntaxError):
        parse_formula("A $ B")


def test_atom_names_are_checked():
    assert check_atom_name("X_y") == "X_y"
    for bad in ("", "a b", "true", "A-B"):
        with pytest.raises(ValueError):
            check_atom_name(bad)


def test_formulas_are_immutable_and_hashable():
    with pytest.raises(AttributeError):
        A.name = "B"
    assert len({A & B, And(A, B), B & A}) == 2


@settings(max_examples=300, deadline=None)
@given(formulas(ATOMS[:4]))
def test_evaluate_matches_reference(f):
    for env in assignments(ATOMS[:4]):
        assert evaluate(f, env) == ref_eval(f, env)


@settings(max_examples=300, deadline=None)
@given(formulas(ATOMS[:4]))
def test_simplify_preserves_truth_table(f):
    g = simplify(f)
    assert atoms_of(g) <= atoms_of(f)
    for env in assignments(ATOMS[:4]):
        assert ref_eval(g, env) == ref_eval(f, env)


@settings(max_examples=300, deadline=None)
@given(formulas(ATOMS[:4]))
def test_text_round_trip(f):
    assert parse_formula(to_text(f)) == f


@settings(max_examples=200, deadline=None)
@given(formulas(ATOMS[:4]))
def test_substitute_is_cofactor(f):
    for value in (False, True):
        g = substitute(f, "A", value)
        assert "A" not in atoms_of(g)
        for env in assignments(ATOMS[1:4]):
            assert ref_eval(g, env) == ref_eval(f, dict(env, A=value))


@settings(max_examples=100, deadline=None)
@given(formulas(ATOMS[:5]))
def test_truth_table_matches_reference(f):
    atoms, table = truth_table(f, list(ATOMS[:5]))
    expected = [ref_eval(f, env) for env in
                ({a: bool((i >> j) & 1) for j, a in enumerate(atoms)} for i in range(32))]
    assert np.array_equal(table, np.array(expected))
