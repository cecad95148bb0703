"""Compile a parsed Kconfig model into one propositional formula.

Every bool option X becomes an atom ``X``. A tristate option X becomes two
atoms, ``X_y`` (built in) and ``X_m`` (module), which are never both true.

Kconfig expressions are three-valued, so they are compiled to a pair of
formulas ``(ge_m, eq_y)``: "the value is at least m" and "the value is y".
Negation, conjunction and disjunction of tristate values map onto these
pairs pointwise (``!x`` swaps and negates them; ``&&``/``||`` are min/max).
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field, replace

from .errors import Diagnostic, UnknownOptionError
from .kconfig import KconfigModel, KExpr, expr_to_text, strip_config_prefix
from .logic import FALSE, TRUE, Formula, Not, Var, atoms_of, conj, disj, iff, simplify

__all__ = ["PropositionalVM", "Constraint", "compile_vm", "Level"]

Level = tuple  # (ge_m, eq_y)
_BOOLISH = ("bool", "tristate")


@dataclass(frozen=True)
class Constraint:
    kind: str
    option: str
    formula: Formula

    def __str__(self) -> str:
        return f"[{self.kind} {self.option}] {self.formula}"


@dataclass(frozen=True)
class PropositionalVM:
    formula: Formula
    atom_map: dict[str, tuple[str, ...]]
    visibility: dict[str, bool]
    type_map: dict[str, str]
    constraints: tuple[Constraint, ...] = ()
    opaque: dict[str, str] = field(default_factory=dict)
    unsupported: dict[str, str] = field(default_factory=dict)
    cross_model: dict[str, frozenset[str]] = field(default_factory=dict)
    diagnostics: tuple[Diagnostic, ...] = ()

    @classmethod
    def from_formula(cls, formula: Formula, variables: Iterable[str] = (),
                     visible: bool = True) -> "PropositionalVM":
        """A model of bool options only, one per atom of ``formula`` or ``variables``."""
        names = sorted(set(atoms_of(formula)) | set(variables))
        return cls(formula, {n: (n,) for n in names}, {n: visible for n in names},
                   {n: "bool" for n in names})

    @property
    def atoms(self) -> list[str]:
        out = [a for atoms in self.atom_map.values() for a in atoms]
        return sorted(set(out) | set(self.opaque))

    def is_tristate(self, name: str) -> bool:
        return self.type_map.get(name) == "tristate"

    def guard(self, name: str, aspect: str = "ym") -> Formula | None:
        """Formula for ``$(CONFIG_name)`` expanding to y or m (``ym``) or to y only."""
        name = strip_config_prefix(name)
        atoms = self.atom_map.get(name)
        if atoms is None:
            return None
        if len(atoms) == 1:
            return Var(atoms[0])
        if aspect == "y":
            return Var(atoms[0])
        return Var(atoms[0]) | Var(atoms[1])

    def code_atom(self, macro: str) -> Formula | None:
        """Formula for ``defined(CONFIG_...)`` following the autoconf convention."""
        name = strip_config_prefix(macro)
        atoms = self.atom_map.get(name)
        if atoms is not None:
            return Var(atoms[0])
        if name.endswith("_MODULE"):
            base = self.atom_map.get(name[:-7])
            if base is not None:
                return Var(base[1]) if len(base) == 2 else FALSE
        return None

    def variable_of(self, atom: str) -> tuple[str, str]:
        """Map an atom back to (variable, assignment)."""
        for name, atoms in self.atom_map.items():
            if atom in atoms:
                return name, "m" if len(atoms) == 2 and atom == atoms[1] else "y"
        raise UnknownOptionError(atom)

    def strengthen(self, extra: Formula) -> "PropositionalVM":
        return replace(self, formula=conj(self.formula, extra),
                       constraints=self.constraints + (Constraint("extra", "", extra),))

    def constraints_about(self, name: str) -> list[Constraint]:
        atoms = set(self.atom_map.get(name, ()))
        return [c for c in self.constraints if c.option == name or atoms & atoms_of(c.formula)]


def tristate_atoms(name: str) -> tuple[str, str]:
    return f"{name}_y", f"{name}_m"


class _Compiler:
    def __init__(self, model: KconfigModel):
        self.model = model
        self.types = {n: o.type for n, o in model.options.items() if o.type}
        self.atom_map: dict[str, tuple[str, ...]] = {}
        for name, opt in model.options.items():
            if opt.type == "bool":
                self.atom_map[name] = (name,)
            elif opt.type == "tristate":
                self.atom_map[name] = tristate_atoms(name)
        self.opaque: dict[str, str] = {}
        self.cross: dict[str, set[str]] = {}
        self.constraints: list[Constraint] = []
        self.diags: list[Diagnostic] = []
        self.unsupported: dict[str, str] = {}
        self.owner = ""

    def add(self, kind, option, f):
        f = simplify(f)
        if f != TRUE:
            self.constraints.append(Constraint(kind, option, f))

    # expression levels

    def sym_level(self, name: str) -> Level:
        typ = self.types.get(name)
        atoms = self.atom_map.get(name)
        if atoms is None:
            if typ is None:
                self.cross.setdefault(self.owner, set()).add(name)
            return FALSE, FALSE
        if typ == "bool":
            v = Var(atoms[0])
            return v, v
        y, m = Var(atoms[0]), Var(atoms[1])
        return y | m, y

    def level(self, e: KExpr | None) -> Level:
        if e is None:
            return TRUE, TRUE
        k = e[0]
        if k == "sym":
            return self.sym_level(e[1])
        if k in ("const", "str"):
            return {"y": (TRUE, TRUE), "m": (TRUE, FALSE)}.get(e[1], (FALSE, FALSE))
        if k == "not":
            g, y = self.level(e[1])
            return Not(y), Not(g)
        if k in ("and", "or"):
            (g1, y1), (g2, y2) = self.level(e[1]), self.level(e[2])
            if k == "and":
                return g1 & g2, y1 & y2
            return g1 | g2, y1 | y2
        if k == "cmp":
            f = self.compare(e)
            return f, f
        raise ValueError(f"unknown expression node {e!r}")

    def _tristate_side(self, e) -> bool:
        if e[0] == "const":
            return True
        if e[0] == "str":
            return e[1] in ("y", "m", "n")
        if e[0] == "sym":
            return self.types.get(e[1], "bool") in _BOOLISH
        return False

    def compare(self, e) -> Formula:
        op, a, b = e[1], e[2], e[3]
        for side in (a, b):
            if side[0] == "sym" and side[1] not in self.types:
                self.cross.setdefault(self.owner, set()).add(side[1])
        if op in ("=", "!=") and self._tristate_side(a) and self._tristate_side(b):
            (g1, y1), (g2, y2) = self.level(a), self.level(b)
            eq = iff(g1, g2) & iff(y1, y2)
            return eq if op == "=" else Not(eq)
        key = expr_to_text(e)
        atom = self.opaque_atom(key)
        return Var(atom)

    def opaque_atom(self, key: str) -> str:
        for atom, k in self.opaque.items():
            if k == key:
                return atom
        atom = f"__cmp_{len(self.opaque)}"
        self.opaque[atom] = key
        return atom

    # option semantics

    def compile(self) -> PropositionalVM:
        model = self.model
        mod = model.modules_option if model.modules_option in self.atom_map else None
        mod_level = self.sym_level(mod)[0] if mod else None
        reverse: dict[str, list[Level]] = {}
        for name, opt in model.options.items():
            self.owner = name
            src = self.sym_level(name) if name in self.atom_map else None
            for tgt, cond in opt.selects:
                if src is None:
                    continue
                if tgt not in self.atom_map:
                    if tgt in self.types:
                        self.diags.append(Diagnostic("vm", "select-non-boolean",
                                                     f"{name} selects non-boolean {tgt}; ignored",
                                                     opt.declaring_file, opt.line, (name, tgt)))
                    continue
                cg, cy = self.level(cond)
                reverse.setdefault(tgt, []).append((src[0] & cg, src[1] & cy))

        for name, opt in model.options.items():
            self.owner = name
            if opt.type is None:
                self.unsupported[name] = "option has no type"
                continue
            if name not in self.atom_map:
                continue
            atoms = self.atom_map[name]
            xg, xy = self.sym_level(name)
            dg, dy = self.level(opt.depends_on)
            rev = reverse.get(name, [])
            rg = disj(r[0] for r in rev)
            ry = disj(r[1] for r in rev)
            tri = len(atoms) == 2
            if tri:
                self.add("tristate", name, Not(Var(atoms[0]) & Var(atoms[1])))
                if mod_level is not None and name != mod:
                    self.add("modules", name, Var(atoms[1]) >> mod_level)
            # upper bound: depends on, overridden by active selects
            self.add("depends", name, xg >> (dg | rg))
            if tri:
                self.add("depends", name, xy >> (dy | ry))
            # lower bound from selects
            for sg, sy in rev:
                self.add("select", name, sg >> xg)
                if tri:
                    self.add("select", name, sy >> xy)
            if not opt.visible and opt.choice is None:
                vg, vy = FALSE, FALSE
                for value, cond in reversed(opt.defaults):
                    a_g, a_y = self.level(value)
                    c_g, c_y = self.level(cond)
                    vg = (c_g & a_g) | (Not(c_g) & vg)
                    vy = (c_g & a_y & c_y) | (Not(c_g) & vy)
                vg, vy = (vg & dg) | rg, (vy & dy) | ry
                if not tri:
                    self.add("pin", name, iff(xg, vg))
                elif mod_level is not None:
                    self.add("pin", name, iff(Var(atoms[0]), vy | (vg & Not(mod_level))))
                    self.add("pin", name, iff(Var(atoms[1]), vg & Not(vy) & mod_level))
                else:
                    self.add("pin", name, iff(Var(atoms[0]), vy))
                    self.add("pin", name, iff(Var(atoms[1]), vg & Not(vy)))

        for idx, grp in enumerate(model.choices):
            members = [m for m in grp.members if m in self.atom_map]
            if not members:
                continue
            label = f"choice@{grp.file}:{grp.line}"
            self.owner = label
            cg, _ = self.level(grp.condition)
            ys = [Var(self.atom_map[m][0]) for m in members]
            gems = [self.sym_level(m)[0] for m in members]
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    self.add("choice", label, Not(ys[i] & ys[j]))
            if grp.type == "tristate":
                for i, y in enumerate(ys):
                    for j, g in enumerate(gems):
                        if i != j:
                            self.add("choice", label, y >> Not(g))
                if not grp.optional:
                    self.add("choice", label, cg >> disj(gems))
            elif not grp.optional:
                self.add("choice", label, cg >> disj(ys))
        self.cross.pop("", None)

        formula = conj(c.formula for c in self.constraints)
        return PropositionalVM(
            formula=formula,
            atom_map=dict(sorted(self.atom_map.items())),
            visibility={n: o.visible for n, o in sorted(model.options.items())},
            type_map={n: t for n, t in sorted(self.types.items())},
            constraints=tuple(self.constraints),
            opaque=dict(self.opaque),
            unsupported=dict(sorted(self.unsupported.items())),
            cross_model={k: frozenset(v) for k, v in sorted(self.cross.items())},
            diagnostics=tuple(self.diags),
        )


def compile_vm(model: KconfigModel) -> PropositionalVM:
    """Translate ``model`` into a :class:`PropositionalVM`.

    Selects override ``depends on``: an option may be on beyond its
    dependencies whenever one of its selecting options is. Options without a
    prompt are pinned to their first applicable default (or to what selects
    force); options with a prompt stay free within their bounds.
    """
    names = set()
    for name, opt in model.options.items():
        if opt.type == "tristate":
            names.update(tristate_atoms(name))
    clashes = sorted(n for n in names if n in model.options)
    comp = _Compiler(model)
    for n in clashes:
        comp.unsupported[n] = "name clashes with a tristate split atom"
    return comp.compile()
