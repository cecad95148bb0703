from __future__ import annotations

import itertools

import pytest
from hypothesis import strategies as st

from kmismatch.fixtures import write_fixture
from kmismatch.logic import FALSE, TRUE, And, Implies, Not, Or, Var, Xor

ATOMS = tuple("ABCDEFGHIJ")


def ref_eval(f, env) -> bool:
    """Evaluator written against node kinds only, so it shares nothing with logic.evaluate."""
    k = f.kind
    if k == "const":
        return f.value
    if k == "var":
        return env[f.name]
    if k == "not":
        return not ref_eval(f.child, env)
    if k == "and":
        return all(ref_eval(c, env) for c in f.children)
    if k == "or":
        return any(ref_eval(c, env) for c in f.children)
    if k == "xor":
        return ref_eval(f.left, env) ^ ref_eval(f.right, env)
    if k == "implies":
        return (not ref_eval(f.left, env)) or ref_eval(f.right, env)
    raise AssertionError(k)


def assignments(atoms):
    """Every total assignment of ``atoms`` as a dict, in binary counting order."""
    atoms = list(atoms)
    for bits in itertools.product((False, True), repeat=len(atoms)):
        yield dict(zip(atoms, bits))


def ref_models(f, atoms):
    return {tuple(sorted(env.items())) for env in assignments(atoms) if ref_eval(f, env)}


def formulas(atoms=ATOMS[:4], max_leaves=12):
    leaves = st.one_of(st.sampled_from([Var(a) for a in atoms]), st.sampled_from([TRUE, FALSE]))

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.lists(children, min_size=2, max_size=3).map(lambda cs: And(*cs)),
            st.lists(children, min_size=2, max_size=3).map(lambda cs: Or(*cs)),
            st.tuples(children, children).map(lambda p: Xor(*p)),
            st.tuples(children, children).map(lambda p: Implies(*p)),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def random_formula(rng, atoms, depth=4):
    """Seeded random formula for the fixed-count suites."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.05:
            return rng.choice([TRUE, FALSE])
        return Var(rng.choice(atoms))
    r = rng.random()
    if r < 0.15:
        return Not(random_formula(rng, atoms, depth - 1))
    if r < 0.45:
        return And(*(random_formula(rng, atoms, depth - 1) for _ in range(rng.randint(2, 3))))
    if r < 0.75:
        return Or(*(random_formula(rng, atoms, depth - 1) for _ in range(rng.randint(2, 3))))
    if r < 0.88:
        return Xor(random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1))
    return Implies(random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1))


@pytest.fixture
def fixture_tree(tmp_path):
    def make(name):
        root = tmp_path / name
        write_fixture(name, str(root))
        return str(root)
    return make


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
