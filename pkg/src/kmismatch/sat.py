"""A small CDCL solver and the satisfiability / model-enumeration entry points.

The solver uses two watched literals, first-UIP clause learning, activity
based branching with phase saving and Luby restarts. It is meant for the
desk-scale instances this package produces; :class:`SolverBudget` bounds
every query so that hard instances are reported rather than hung on.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from collections.abc import Iterable, Sequence

from .cnf import CnfBuilder, CnfInstance
from .errors import EnumerationExplosionError, ResourceLimitError
from .logic import Formula

__all__ = [
    "SolverBudget", "SatResult", "Solver", "is_satisfiable", "enumerate_models",
    "DEFAULT_BUDGET", "DEFAULT_VAR_CAP",
]

DEFAULT_VAR_CAP = 12


@dataclass(frozen=True)
class SolverBudget:
    max_conflicts: int = 1_000_000
    max_seconds: float = 10.0


DEFAULT_BUDGET = SolverBudget()


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    model: dict[str, bool] | None = None

    def __bool__(self) -> bool:
        return self.satisfiable


def _luby(i: int) -> int:
    # i-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ...
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class Solver:
    """CDCL solver over DIMACS-style integer literals.

    Clauses may be added between calls to :meth:`solve`; learnt clauses are
    kept since they remain implied.
    """

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]] = (),
                 budget: SolverBudget | None = None):
        self.n = num_vars
        self.budget = budget or DEFAULT_BUDGET
        self.assign = [0] * (num_vars + 1)
        self.level = [0] * (num_vars + 1)
        self.reason: list[list[int] | None] = [None] * (num_vars + 1)
        self.activity = [0.0] * (num_vars + 1)
        self.phase = [False] * (num_vars + 1)
        self.watches: dict[int, list[list[int]]] = {}
        for v in range(1, num_vars + 1):
            self.watches[v] = []
            self.watches[-v] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.inc = 1.0
        self.ok = True
        self.conflicts = 0
        self.model: dict[int, bool] | None = None
        for c in clauses:
            if not self.add_clause(c):
                break

    def _value(self, lit: int) -> int:
        v = self.assign[lit if lit > 0 else -lit]
        return v if lit > 0 else -v

    def _enqueue(self, lit: int, reason) -> None:
        v = lit if lit > 0 else -lit
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def add_clause(self, lits: Sequence[int]) -> bool:
        """Add a clause at the root level; returns False once unsatisfiable."""
        if not self.ok:
            return False
        self._cancel_until(0)
        seen: set[int] = set()
        clause: list[int] = []
        for lit in lits:
            if abs(lit) > self.n or lit == 0:
                raise ValueError(f"literal {lit} out of range")
            if -lit in seen:
                return True
            val = self._value(lit)
            if val == 1:
                return True
            if val == -1 or lit in seen:
                continue
            seen.add(lit)
            clause.append(lit)
        if not clause:
            self.ok = False
            return False
        if len(clause) == 1:
            self._enqueue(clause[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self.watches[clause[0]].append(clause)
        self.watches[clause[1]].append(clause)
        return True

    def _propagate(self):
        watches = self.watches
        assign = self.assign
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            ws = watches[false_lit]
            kept: list[list[int]] = []
            i, n = 0, len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                fv = assign[first] if first > 0 else -assign[-first]
                if fv == 1:
                    kept.append(c)
                    continue
                for k in range(2, len(c)):
                    lit = c[k]
                    lv = assign[lit] if lit > 0 else -assign[-lit]
                    if lv != -1:
                        c[1], c[k] = lit, false_lit
                        watches[lit].append(c)
                        break
                else:
                    kept.append(c)
                    if fv == -1:
                        kept.extend(ws[i:])
                        watches[false_lit] = kept
                        self.qhead = len(self.trail)
                        return c
                    self._enqueue(first, c)
            watches[false_lit] = kept
        return None

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for lit in self.trail[start:]:
            v = lit if lit > 0 else -lit
            self.phase[v] = lit > 0
            self.assign[v] = 0
            self.reason[v] = None
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _bump(self, v: int) -> None:
        self.activity[v] += self.inc
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.inc *= 1e-100

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        counter = 0
        cur = len(self.trail_lim)
        idx = len(self.trail) - 1
        p = 0
        clause = confl
        while True:
            for q in (clause if p == 0 else clause[1:]):
                v = q if q > 0 else -q
                if v not in seen and self.level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if self.level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while True:
                lit = self.trail[idx]
                idx -= 1
                if abs(lit) in seen:
                    break
            p = lit
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[abs(p)]
            seen.discard(abs(p))
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda j: self.level[abs(learnt[j])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _pick(self) -> int:
        best, best_act = 0, -1.0
        assign, act = self.assign, self.activity
        for v in range(1, self.n + 1):
            if assign[v] == 0 and act[v] > best_act:
                best, best_act = v, act[v]
        if best == 0:
            return 0
        return best if self.phase[best] else -best

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        """Decide satisfiability under optional assumption literals.

        Raises :class:`ResourceLimitError` when the budget is exhausted.
        """
        self.model = None
        if not self.ok:
            return False
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        deadline = time.monotonic() + self.budget.max_seconds
        conflicts_here = 0
        restart_no = 1
        restart_limit = 64 * _luby(restart_no)
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                conflicts_here += 1
                since_restart += 1
                if conflicts_here > self.budget.max_conflicts:
                    self._cancel_until(0)
                    raise ResourceLimitError(f"conflict budget of {self.budget.max_conflicts} exceeded")
                if (conflicts_here & 127) == 0 and time.monotonic() > deadline:
                    self._cancel_until(0)
                    raise ResourceLimitError(f"time budget of {self.budget.max_seconds}s exceeded")
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self._enqueue(learnt[0], learnt)
                self.inc *= 1.05
                continue
            if since_restart >= restart_limit:
                since_restart = 0
                restart_no += 1
                restart_limit = 64 * _luby(restart_no)
                self._cancel_until(0)
                continue
            lit = 0
            while len(self.trail_lim) < len(assumptions):
                a = assumptions[len(self.trail_lim)]
                val = self._value(a)
                if val == -1:
                    self._cancel_until(0)
                    return False
                self.trail_lim.append(len(self.trail))
                if val == 0:
                    lit = a
                    break
            if lit:
                self._enqueue(lit, None)
                continue
            lit = self._pick()
            if lit == 0:
                self.model = {v: self.assign[v] == 1 for v in range(1, self.n + 1)}
                self._cancel_until(0)
                return True
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)


def is_satisfiable(cnf: CnfInstance, budget: SolverBudget | None = None) -> SatResult:
    """Decide a clause set; the witness assigns every original atom."""
    solver = Solver(cnf.num_vars, cnf.clauses, budget)
    if not solver.solve():
        return SatResult(False)
    return SatResult(True, cnf.project(solver.model))


def enumerate_models(f: Formula, projection: Iterable[str], limit: int,
                     var_cap: int = DEFAULT_VAR_CAP,
                     budget: SolverBudget | None = None) -> list[dict[str, bool]]:
    """Distinct assignments to ``projection`` that extend to models of ``f``.

    Each found projection is excluded with a blocking clause before the next
    call, so results never repeat. Stops after ``limit`` models.
    """
    proj = sorted(set(projection))
    if limit < 1:
        raise ValueError("limit must be at least 1")
    if len(proj) > var_cap:
        raise EnumerationExplosionError(len(proj), var_cap)
    builder = CnfBuilder()
    for name in proj:
        builder.atom(name)
    builder.assert_formula(f)
    cnf = builder.build()
    ids = [cnf.atom_ids[name] for name in proj]
    solver = Solver(cnf.num_vars, cnf.clauses, budget)
    models: list[dict[str, bool]] = []
    while len(models) < limit and solver.solve():
        m = solver.model
        models.append({name: m[i] for name, i in zip(proj, ids)})
        if not ids or not solver.add_clause([-i if m[i] else i for i in ids]):
            break
    return models
