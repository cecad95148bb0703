"""Feature effects and the mismatch test.

For an atom v used in presence conditions PC_1..PC_k, its feature effect is

    FE_v = OR_i ( PC_i[v := true] XOR PC_i[v := false] )

the condition under which switching v changes what gets compiled. v is a
mismatch when the model allows v while FE_v is false, i.e. when
``VM & v & !FE_v`` is satisfiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from collections.abc import Iterable, Sequence

from .cnf import CnfBuilder
from .errors import EmptyPresenceConditionsError, EnumerationExplosionError, ResourceLimitError
from .logic import (FALSE, Formula, Not, Var, Xor, atoms_of, disj, parse_formula,
                    simplify, substitute, to_text)
from .sat import DEFAULT_BUDGET, Solver, SolverBudget

__all__ = [
    "PresenceCondition", "FeatureEffect", "Mismatch", "Caps", "EffectAnalysis",
    "collect_pcs", "feature_effect", "check_covered", "minimal_partial_configs",
    "find_mismatches", "analyze_effects", "EXCLUSION_REASONS",
]

EXCLUSION_REASONS = (
    "unreliable-variable", "cross-model-dependency", "complexity-cap", "solver-budget",
    "unsupported-construct",
)


@dataclass(frozen=True)
class PresenceCondition:
    condition: Formula
    space: str                               # "code" or "build"
    file: str
    lines: tuple[int, int] | None = None
    local_atoms: frozenset[str] = frozenset()   # atoms of the block's own condition
    atoms: frozenset[str] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "atoms", atoms_of(self.condition))

    @property
    def location(self) -> str:
        if self.lines is None:
            return self.file
        return f"{self.file}:{self.lines[0]}-{self.lines[1]}"

    def to_dict(self) -> dict:
        return {"file": self.file, "lines": list(self.lines) if self.lines else None,
                "condition": to_text(self.condition), "space": self.space}


@dataclass(frozen=True)
class FeatureEffect:
    atom: str
    effect: Formula
    contributing_pcs: tuple[str, ...] = ()
    spaces: frozenset[str] = frozenset()

    def to_dict(self) -> dict:
        return {"atom": self.atom, "effect": to_text(self.effect),
                "contributing_pcs": list(self.contributing_pcs), "spaces": sorted(self.spaces)}

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureEffect":
        return cls(d["atom"], parse_formula(d["effect"]), tuple(d["contributing_pcs"]),
                   frozenset(d["spaces"]))


@dataclass(frozen=True)
class Mismatch:
    """Outcome of the test for one atom that did not come out covered.

    ``confirmed`` is True when the SAT test found the mismatch, None when the
    atom was excluded before testing. ``excluded`` names the reason a record
    is set aside instead of reported.
    """

    variable: str
    assignment: str
    atom: str
    effect: FeatureEffect | None
    witnesses: tuple[dict[str, bool], ...] = ()
    excluded: str | None = None
    confirmed: bool | None = True
    detail: str = ""

    @property
    def reported(self) -> bool:
        return self.excluded is None and bool(self.confirmed)

    def to_dict(self) -> dict:
        return {
            "variable": self.variable, "assignment": self.assignment, "atom": self.atom,
            "effect": self.effect.to_dict() if self.effect else None,
            "witnesses": [dict(sorted(w.items())) for w in self.witnesses],
            "excluded": self.excluded, "confirmed": self.confirmed, "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Mismatch":
        eff = FeatureEffect.from_dict(d["effect"]) if d.get("effect") else None
        return cls(d["variable"], d["assignment"], d["atom"], eff,
                   tuple(dict(w) for w in d["witnesses"]), d.get("excluded"),
                   d.get("confirmed"), d.get("detail", ""))


@dataclass(frozen=True)
class Caps:
    var_cap: int = 12
    witness_limit: int = 32
    budget: SolverBudget = DEFAULT_BUDGET

    def __post_init__(self):
        if self.var_cap < 1 or self.witness_limit < 1:
            raise ValueError("caps must be at least 1")


def collect_pcs(atom: str, pcs: Iterable[PresenceCondition]) -> list[PresenceCondition]:
    return [pc for pc in pcs if atom in pc.atoms]


def feature_effect(atom: str, pcs: Sequence[PresenceCondition]) -> FeatureEffect:
    """Feature effect of ``atom`` over ``pcs`` (all of which must mention it)."""
    used = [pc for pc in pcs if atom in pc.atoms]
    if not used:
        raise EmptyPresenceConditionsError(atom)
    parts = []
    for pc in used:
        on = substitute(pc.condition, atom, True)
        off = substitute(pc.condition, atom, False)
        parts.append(simplify(Xor(on, off)) if on != off else FALSE)
    spaces = set()
    for pc in used:
        if pc.space == "build" or atom in pc.local_atoms:
            spaces.add(pc.space)
    return FeatureEffect(atom, simplify(disj(parts)), tuple(pc.location for pc in used),
                         frozenset(spaces))


def _vm_builder(vm) -> CnfBuilder:
    formula = vm.formula if hasattr(vm, "formula") else vm
    return CnfBuilder().assert_formula(formula)


def _solver_for(base: CnfBuilder, extra: Formula, budget: SolverBudget) -> tuple[Solver, dict]:
    b = base.copy()
    b.assert_formula(extra)
    cnf = b.build()
    return Solver(cnf.num_vars, cnf.clauses, budget), cnf.atom_ids


def check_covered(vm, atom: str, fe: FeatureEffect, budget: SolverBudget | None = None,
                  base: CnfBuilder | None = None) -> bool:
    """True iff VM & atom & !effect is unsatisfiable."""
    if fe.atom != atom:
        raise ValueError("feature effect belongs to another atom")
    base = base or _vm_builder(vm)
    solver, _ = _solver_for(base, Var(atom) & Not(fe.effect), budget or DEFAULT_BUDGET)
    return not solver.solve()


def minimal_partial_configs(vm, atom: str, fe: FeatureEffect, cap: int = 12, limit: int = 32,
                            budget: SolverBudget | None = None,
                            base: CnfBuilder | None = None) -> list[dict[str, bool]]:
    """Subset-minimal partial assignments that force the mismatch.

    Each witness binds ``atom`` to true plus a subset of the effect's atoms
    such that every model of the VM extending it selects ``atom`` and
    falsifies the effect. Shrinking drops bindings greedily in sorted order.
    """
    eff_atoms = sorted(atoms_of(fe.effect))
    if len(eff_atoms) > cap:
        raise EnumerationExplosionError(len(eff_atoms), cap)
    budget = budget or DEFAULT_BUDGET
    base = base or _vm_builder(vm)
    finder, ids = _solver_for(base, Var(atom) & Not(fe.effect), budget)
    checker, ids2 = _solver_for(base, Not(Var(atom)) | fe.effect, budget)
    proj = [a for a in eff_atoms if a != atom]
    witnesses: list[dict[str, bool]] = []
    while len(witnesses) < limit and finder.solve():
        model = finder.model
        lits = {a: model[ids[a]] for a in proj}
        keep = dict(lits)
        for a in proj:
            trial = {k: v for k, v in keep.items() if k != a}
            assumptions = [ids2[atom]] + [ids2[k] if v else -ids2[k] for k, v in trial.items()]
            if not checker.solve(assumptions):
                keep = trial
        witness = {atom: True, **keep}
        witnesses.append(dict(sorted(witness.items())))
        block = [-ids[atom]] + [-ids[k] if v else ids[k] for k, v in keep.items()]
        if not finder.add_clause(block):
            break
    witnesses.sort(key=lambda w: (len(w), sorted(w.items())))
    return witnesses


@dataclass
class EffectAnalysis:
    mismatches: list[Mismatch] = field(default_factory=list)     # reported and excluded records
    covered: list[str] = field(default_factory=list)             # atoms
    unused: list[str] = field(default_factory=list)              # atoms in no PC
    effects: dict[str, FeatureEffect] = field(default_factory=dict)


def _is_model_atom(vm, a: str) -> bool:
    return a in vm.opaque or any(a in atoms for atoms in vm.atom_map.values())


def analyze_effects(vm, pcs: Sequence[PresenceCondition], unreliable=None,
                    caps: Caps | None = None, only: Iterable[str] | None = None) -> EffectAnalysis:
    """Run the mismatch test for every model atom used in a presence condition.

    Each atom lands in exactly one of: ``mismatches`` (reported or excluded),
    ``covered`` or ``unused``.
    """
    caps = caps or Caps()
    unreliable = unreliable if unreliable is not None else set()
    result = EffectAnalysis()
    used: set[str] = set()
    for pc in pcs:
        used |= pc.atoms
    model_atoms = set()
    for atoms in vm.atom_map.values():
        model_atoms.update(atoms)
    base = _vm_builder(vm)
    targets = sorted(model_atoms if only is None else set(only) & model_atoms)
    for atom in targets:
        variable, assignment = vm.variable_of(atom)
        if atom not in used:
            result.unused.append(atom)
            continue
        fe = feature_effect(atom, collect_pcs(atom, pcs))
        result.effects[atom] = fe

        def record(reason=None, confirmed=True, witnesses=(), detail=""):
            result.mismatches.append(Mismatch(variable, assignment, atom, fe, tuple(witnesses),
                                              reason, confirmed, detail))

        if variable in unreliable:
            reasons = getattr(unreliable, "reason_text", lambda n: "")(variable)
            record("unreliable-variable", None, detail=reasons)
            continue
        if variable in getattr(vm, "unsupported", {}):
            record("unsupported-construct", None, detail=vm.unsupported[variable])
            continue
        try:
            covered = check_covered(vm, atom, fe, caps.budget, base)
        except ResourceLimitError as exc:
            record("solver-budget", None, detail=str(exc))
            continue
        if covered:
            result.covered.append(atom)
            continue
        foreign = sorted(a for a in atoms_of(fe.effect)
                         if not _is_model_atom(vm, a) and not a.startswith("__"))
        undeclared = sorted(getattr(vm, "cross_model", {}).get(variable, ()))
        if foreign or undeclared:
            record("cross-model-dependency", detail="undeclared: " + ", ".join(foreign or undeclared))
            continue
        n_eff = len(atoms_of(fe.effect))
        if n_eff > caps.var_cap:
            record("complexity-cap", detail=f"feature effect over {n_eff} atoms exceeds {caps.var_cap}")
            continue
        try:
            wits = minimal_partial_configs(vm, atom, fe, caps.var_cap, caps.witness_limit,
                                           caps.budget, base)
        except ResourceLimitError as exc:
            record("solver-budget", detail=str(exc))
            continue
        record(witnesses=wits)
    result.mismatches.sort(key=lambda m: (m.variable, m.assignment))
    return result


def find_mismatches(vm, pcs: Sequence[PresenceCondition], unreliable=None,
                    caps: Caps | None = None) -> list[Mismatch]:
    """Mismatch records (reported and excluded) sorted by variable and assignment."""
    return analyze_effects(vm, pcs, unreliable, caps).mismatches
