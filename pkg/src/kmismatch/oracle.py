"""Exhaustive ground truth for the mismatch test on small models.

Enumerates every total assignment with numpy instead of calling the solver,
so it shares no code path with :mod:`kmismatch.effects` beyond formula
evaluation.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from .errors import OracleLimitError
from .logic import atoms_of, evaluate_many

__all__ = ["ORACLE_ATOM_LIMIT", "brute_force_oracle", "oracle_disagreements", "oracle_verdicts"]

ORACLE_ATOM_LIMIT = 20


def _universe(vm, pcs) -> list[str]:
    names = set(atoms_of(vm.formula))
    for atoms in vm.atom_map.values():
        names.update(atoms)
    for pc in pcs:
        names.update(atoms_of(pc.condition))
    return sorted(names)


def oracle_verdicts(vm, pcs: Sequence, atoms: Iterable[str] | None = None) -> dict[str, bool]:
    """Mismatch verdict per atom by enumerating all assignments.

    An atom is a mismatch iff some assignment satisfies the VM, sets the atom
    true, and leaves every presence condition mentioning the atom unchanged
    when the atom is flipped to false.
    """
    universe = _universe(vm, pcs)
    if len(universe) > ORACLE_ATOM_LIMIT:
        raise OracleLimitError(f"{len(universe)} atoms exceed the oracle limit of {ORACLE_ATOM_LIMIT}")
    rows = np.arange(1 << len(universe), dtype=np.int64)
    env = {a: ((rows >> j) & 1).astype(bool) for j, a in enumerate(universe)}
    valid = evaluate_many(vm.formula, env)
    if atoms is None:
        atoms = sorted({a for pc in pcs for a in atoms_of(pc.condition)} & set(
            a for group in vm.atom_map.values() for a in group))
    ones = np.ones_like(rows, dtype=bool)
    zeros = ~ones
    out = {}
    for atom in atoms:
        same = ones.copy()
        env_on = dict(env, **{atom: ones})
        env_off = dict(env, **{atom: zeros})
        for pc in pcs:
            if atom in atoms_of(pc.condition):
                same &= evaluate_many(pc.condition, env_on) == evaluate_many(pc.condition, env_off)
        out[atom] = bool(np.any(valid & env[atom] & same))
    return out


def brute_force_oracle(vm, pcs: Sequence, atom: str) -> bool:
    return oracle_verdicts(vm, pcs, [atom])[atom]


def oracle_disagreements(vm, pcs: Sequence, analysis) -> list[tuple[str, bool, bool | None]]:
    """Atoms where the solver-based verdict differs from the oracle.

    ``analysis`` is an :class:`~kmismatch.effects.EffectAnalysis` over the
    same ``vm`` and ``pcs``. Covered atoms count as a negative verdict,
    excluded records by their ``confirmed`` flag. Returns
    ``(atom, oracle verdict, analysis verdict)`` triples.
    """
    got = {m.atom: m.confirmed for m in analysis.mismatches}
    out = []
    for atom, expected in sorted(oracle_verdicts(vm, pcs).items()):
        verdict = got.get(atom, False)
        if verdict is None or bool(verdict) != expected:
            out.append((atom, expected, verdict))
    return out
