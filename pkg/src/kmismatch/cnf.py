"""Tseitin transformation into clause form and DIMACS export."""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Iterable, Mapping

from .logic import Formula, atoms_of, simplify

__all__ = ["CnfInstance", "CnfBuilder", "to_cnf", "to_dimacs", "parse_dimacs"]


@dataclass(frozen=True)
class CnfInstance:
    """Clauses over integer literals plus the name table for original atoms.

    Variables ``1..num_vars`` that do not appear in ``atom_ids`` are auxiliary
    variables introduced by the transformation.
    """

    clauses: tuple[tuple[int, ...], ...]
    atom_ids: Mapping[str, int]
    num_vars: int

    @property
    def aux(self) -> frozenset[int]:
        named = set(self.atom_ids.values())
        return frozenset(v for v in range(1, self.num_vars + 1) if v not in named)

    def project(self, model: Mapping[int, bool]) -> dict[str, bool]:
        return {name: bool(model[i]) for name, i in sorted(self.atom_ids.items())}

    def to_dimacs(self) -> str:
        return to_dimacs(self)


class CnfBuilder:
    """Incremental Tseitin encoder.

    Subformulas are shared: structurally equal nodes map to the same literal.
    ``copy()`` forks the builder so a common prefix (a variability model, say)
    can be encoded once and extended per query.
    """

    def __init__(self):
        self.atom_ids: dict[str, int] = {}
        self.num_vars = 0
        self.clauses: list[tuple[int, ...]] = []
        self._lits: dict[Formula, int] = {}

    def copy(self) -> "CnfBuilder":
        other = CnfBuilder.__new__(CnfBuilder)
        other.atom_ids = dict(self.atom_ids)
        other.num_vars = self.num_vars
        other.clauses = list(self.clauses)
        other._lits = dict(self._lits)
        return other

    def atom(self, name: str) -> int:
        v = self.atom_ids.get(name)
        if v is None:
            self.num_vars += 1
            v = self.atom_ids[name] = self.num_vars
        return v

    def _fresh(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def add_clause(self, lits: Iterable[int]) -> None:
        self.clauses.append(tuple(lits))

    def literal(self, f: Formula) -> int:
        """Literal equivalent to ``f``; ``f`` must be free of constants."""
        k = f.kind
        if k == "var":
            return self.atom(f.name)
        if k == "not":
            return -self.literal(f.child)
        if k == "const":
            raise ValueError("constants must be simplified away before encoding")
        lit = self._lits.get(f)
        if lit is not None:
            return lit
        kids = [self.literal(c) for c in f.children]
        x = self._fresh()
        add = self.clauses.append
        if k == "and":
            for c in kids:
                add((-x, c))
            add(tuple(-c for c in kids) + (x,))
        elif k == "or":
            for c in kids:
                add((x, -c))
            add(tuple(kids) + (-x,))
        elif k == "xor":
            a, b = kids
            add((-x, a, b))
            add((-x, -a, -b))
            add((x, -a, b))
            add((x, a, -b))
        elif k == "implies":
            a, b = kids
            add((-x, -a, b))
            add((x, a))
            add((x, -b))
        else:
            raise TypeError(f"unknown formula node {f!r}")
        self._lits[f] = x
        return x

    def assert_formula(self, f: Formula) -> "CnfBuilder":
        for name in sorted(atoms_of(f)):
            self.atom(name)
        self._assert(simplify(f))
        return self

    def _assert(self, f: Formula) -> None:
        k = f.kind
        if k == "const":
            if not f.value:
                self.clauses.append(())
        elif k == "and":
            for c in f.children:
                self._assert(c)
        elif k == "or":
            self.clauses.append(tuple(self.literal(c) for c in f.children))
        elif k == "not" and f.child.kind == "or":
            for c in f.child.children:
                self.clauses.append((-self.literal(c),))
        elif k == "implies":
            self.clauses.append((-self.literal(f.left), self.literal(f.right)))
        else:
            self.clauses.append((self.literal(f),))

    def build(self) -> CnfInstance:
        return CnfInstance(tuple(self.clauses), dict(self.atom_ids), self.num_vars)


def to_cnf(f: Formula) -> CnfInstance:
    """Equisatisfiable clause form of ``f`` (linear in the size of ``f``)."""
    return CnfBuilder().assert_formula(f).build()


def to_dimacs(cnf: CnfInstance) -> str:
    lines = [f"c {name} {i}" for name, i in sorted(cnf.atom_ids.items(), key=lambda kv: kv[1])]
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    for clause in cnf.clauses:
        lines.append(" ".join(str(l) for l in clause) + (" 0" if clause else "0"))
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfInstance:
    """Read DIMACS text; ``c <name> <id>`` comment lines restore atom names."""
    names: dict[str, int] = {}
    clauses: list[tuple[int, ...]] = []
    num_vars = 0
    current: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 3 and parts[2].isdigit():
                names[parts[1]] = int(parts[2])
            continue
        if line.startswith("p"):
            num_vars = int(line.split()[2])
            continue
        for tok in line.split():
            v = int(tok)
            if v == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(v)
    if current:
        clauses.append(tuple(current))
    return CnfInstance(tuple(clauses), names, num_vars)

