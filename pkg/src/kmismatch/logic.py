"""Propositional formulas over named boolean atoms.

Formulas are immutable trees built from :class:`Const`, :class:`Var`,
:class:`Not`, :class:`And`, :class:`Or`, :class:`Xor` and :class:`Implies`.
Conjunctions and disjunctions are n-ary and flatten nested nodes of the same
kind on construction. The python operators ``&``, ``|``, ``~``, ``^`` and
``>>`` build the corresponding nodes.

>>> a, b = Var("A"), Var("B")
>>> str(a & (b | ~a))
'A && (B || !A)'
>>> simplify(substitute(a & b, "A", True))
Var('B')
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping

import numpy as np

from .errors import FormulaSyntaxError, UnboundAtomError

__all__ = [
    "Formula", "Const", "Var", "Not", "And", "Or", "Xor", "Implies",
    "TRUE", "FALSE", "conj", "disj", "iff", "ite",
    "evaluate", "evaluate_many", "truth_table", "substitute", "atoms_of",
    "simplify", "to_text", "parse_formula", "check_atom_name", "size",
]

_ATOM_RE = re.compile(r"[A-Za-z0-9_]+\Z")
_RESERVED = frozenset({"true", "false"})


def check_atom_name(name: str) -> str:
    if not isinstance(name, str) or not _ATOM_RE.match(name) or name in _RESERVED:
        raise ValueError(f"invalid atom name: {name!r}")
    return name


class Formula:
    __slots__ = ("_hash",)

    kind: str = ""

    def _key(self) -> tuple:
        raise NotImplementedError

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            h = hash((self.kind,) + self._key())
            object.__setattr__(self, "_hash", h)
            return h

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Formula) or self.kind != other.kind:
            return NotImplemented if not isinstance(other, Formula) else False
        return hash(self) == hash(other) and self._key() == other._key()

    def __setattr__(self, key, value):
        raise AttributeError("formulas are immutable")

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __xor__(self, other: "Formula") -> "Formula":
        return Xor(self, other)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def __str__(self) -> str:
        return to_text(self)

    @property
    def children(self) -> tuple["Formula", ...]:
        return ()


class Const(Formula):
    __slots__ = ("value",)
    kind = "const"

    def __init__(self, value: bool):
        object.__setattr__(self, "value", bool(value))

    def _key(self):
        return (self.value,)

    def __repr__(self):
        return "TRUE" if self.value else "FALSE"


TRUE = Const(True)
FALSE = Const(False)


class Var(Formula):
    __slots__ = ("name",)
    kind = "var"

    def __init__(self, name: str):
        object.__setattr__(self, "name", check_atom_name(name))

    def _key(self):
        return (self.name,)

    def __repr__(self):
        return f"Var({self.name!r})"


class Not(Formula):
    __slots__ = ("child",)
    kind = "not"

    def __init__(self, child: Formula):
        if not isinstance(child, Formula):
            raise TypeError(f"not a formula: {child!r}")
        object.__setattr__(self, "child", child)

    def _key(self):
        return (self.child,)

    @property
    def children(self):
        return (self.child,)

    def __repr__(self):
        return f"Not({self.child!r})"


class _Nary(Formula):
    __slots__ = ("_children",)

    def __init__(self, *children: Formula):
        flat: list[Formula] = []
        for c in children:
            if not isinstance(c, Formula):
                raise TypeError(f"not a formula: {c!r}")
            if type(c) is type(self):
                flat.extend(c._children)
            else:
                flat.append(c)
        if len(flat) < 2:
            raise ValueError(f"{type(self).__name__} needs at least two operands; use conj/disj")
        object.__setattr__(self, "_children", tuple(flat))

    def _key(self):
        return self._children

    @property
    def children(self):
        return self._children

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(map(repr, self._children))})"


class And(_Nary):
    __slots__ = ()
    kind = "and"


class Or(_Nary):
    __slots__ = ()
    kind = "or"


class _Binary(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        if not isinstance(left, Formula) or not isinstance(right, Formula):
            raise TypeError("operands must be formulas")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def _key(self):
        return (self.left, self.right)

    @property
    def children(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class Xor(_Binary):
    __slots__ = ()
    kind = "xor"


class Implies(_Binary):
    __slots__ = ()
    kind = "implies"


def conj(*parts: Formula | Iterable[Formula]) -> Formula:
    """Conjunction of any number of formulas (``TRUE`` when empty)."""
    items = _collect(parts)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(*items)


def disj(*parts: Formula | Iterable[Formula]) -> Formula:
    """Disjunction of any number of formulas (``FALSE`` when empty)."""
    items = _collect(parts)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(*items)


def _collect(parts) -> list[Formula]:
    items: list[Formula] = []
    for p in parts:
        if isinstance(p, Formula):
            items.append(p)
        else:
            items.extend(p)
    return items


def iff(a: Formula, b: Formula) -> Formula:
    return Not(Xor(a, b))


def ite(c: Formula, t: Formula, e: Formula) -> Formula:
    return Or(And(c, t), And(Not(c), e))


def size(f: Formula) -> int:
    """Number of nodes in the tree."""
    return 1 + sum(size(c) for c in f.children)


def _name(atom) -> str:
    return atom.name if isinstance(atom, Var) else atom


# -- evaluation ---------------------------------------------------------------

def evaluate(f: Formula, assignment: Mapping[str, bool]) -> bool:
    """Truth value of ``f`` under a total assignment of its atoms."""
    k = f.kind
    if k == "var":
        try:
            return bool(assignment[f.name])
        except KeyError:
            raise UnboundAtomError(f.name) from None
    if k == "const":
        return f.value
    if k == "not":
        return not evaluate(f.child, assignment)
    if k == "and":
        return all(evaluate(c, assignment) for c in f.children)
    if k == "or":
        return any(evaluate(c, assignment) for c in f.children)
    if k == "xor":
        return evaluate(f.left, assignment) != evaluate(f.right, assignment)
    if k == "implies":
        return (not evaluate(f.left, assignment)) or evaluate(f.right, assignment)
    raise TypeError(f"unknown formula node {f!r}")


def evaluate_many(f: Formula, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Vectorised evaluation: ``env`` maps atoms to equally shaped bool arrays."""
    memo: dict[Formula, np.ndarray] = {}
    shape = next(iter(env.values())).shape if env else ()

    def ev(g: Formula) -> np.ndarray:
        r = memo.get(g)
        if r is not None:
            return r
        k = g.kind
        if k == "var":
            try:
                r = env[g.name]
            except KeyError:
                raise UnboundAtomError(g.name) from None
        elif k == "const":
            r = np.full(shape, g.value, dtype=bool)
        elif k == "not":
            r = ~ev(g.child)
        elif k == "and":
            r = ev(g.children[0]).copy()
            for c in g.children[1:]:
                r &= ev(c)
        elif k == "or":
            r = ev(g.children[0]).copy()
            for c in g.children[1:]:
                r |= ev(c)
        elif k == "xor":
            r = ev(g.left) ^ ev(g.right)
        elif k == "implies":
            r = ~ev(g.left) | ev(g.right)
        else:
            raise TypeError(f"unknown formula node {g!r}")
        memo[g] = r
        return r

    return ev(f)


def truth_table(f: Formula, atoms: list[str] | None = None) -> tuple[list[str], np.ndarray]:
    """Evaluate ``f`` under all ``2**n`` assignments of ``atoms``.

    Row ``i`` assigns ``atoms[j]`` the value of bit ``j`` of ``i``.
    """
    if atoms is None:
        atoms = sorted(atoms_of(f))
    n = len(atoms)
    if n > 24:
        raise ValueError(f"truth table over {n} atoms is too large")
    if n == 0:
        return atoms, np.array([evaluate(f, {})])
    rows = np.arange(1 << n, dtype=np.int64)
    env = {a: ((rows >> j) & 1).astype(bool) for j, a in enumerate(atoms)}
    return atoms, evaluate_many(f, env)


# -- structural operations ----------------------------------------------------

def atoms_of(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    seen: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        if g.kind == "var":
            out.add(g.name)
        else:
            stack.extend(g.children)
    return frozenset(out)


def _rebuild(f: Formula, children: list[Formula]) -> Formula:
    k = f.kind
    if k == "not":
        return Not(children[0])
    if k == "and":
        return conj(children)
    if k == "or":
        return disj(children)
    if k == "xor":
        return Xor(*children)
    if k == "implies":
        return Implies(*children)
    return f


def substitute(f: Formula, atom, value: bool) -> Formula:
    """Replace every occurrence of ``atom`` by a constant and simplify."""
    name = _name(atom)
    const = TRUE if value else FALSE
    memo: dict[Formula, Formula] = {}

    def sub(g: Formula) -> Formula:
        if g.kind == "var":
            return const if g.name == name else g
        if g.kind == "const":
            return g
        r = memo.get(g)
        if r is None:
            r = _rebuild(g, [sub(c) for c in g.children])
            memo[g] = r
        return r

    return simplify(sub(f))


def simplify(f: Formula) -> Formula:
    """Constant folding, unit laws, double negation and duplicate removal."""
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        k = g.kind
        if k in ("var", "const"):
            return g
        r = memo.get(g)
        if r is not None:
            return r
        if k == "not":
            c = go(g.child)
            if c.kind == "const":
                r = FALSE if c.value else TRUE
            elif c.kind == "not":
                r = c.child
            else:
                r = Not(c)
        elif k in ("and", "or"):
            absorbing = k == "or"
            kept: list[Formula] = []
            seen: set[Formula] = set()
            r = None
            for c in g.children:
                c = go(c)
                if c.kind == "const":
                    if c.value == absorbing:
                        r = c
                        break
                    continue
                parts = c.children if c.kind == k else (c,)
                for p in parts:
                    if p in seen:
                        continue
                    neg = p.child if p.kind == "not" else Not(p)
                    if neg in seen:
                        r = TRUE if absorbing else FALSE
                        break
                    seen.add(p)
                    kept.append(p)
                if r is not None:
                    break
            if r is None:
                r = conj(kept) if k == "and" else disj(kept)
        elif k == "xor":
            a, b = go(g.left), go(g.right)
            if a.kind == "const" and b.kind == "const":
                r = TRUE if a.value != b.value else FALSE
            elif a.kind == "const":
                r = b if not a.value else _negate(b)
            elif b.kind == "const":
                r = a if not b.value else _negate(a)
            elif a == b:
                r = FALSE
            else:
                r = Xor(a, b)
        elif k == "implies":
            a, b = go(g.left), go(g.right)
            if a.kind == "const":
                r = b if a.value else TRUE
            elif b.kind == "const":
                r = TRUE if b.value else _negate(a)
            elif a == b:
                r = TRUE
            else:
                r = Implies(a, b)
        else:
            raise TypeError(f"unknown formula node {g!r}")
        memo[g] = r
        return r

    return go(f)


def _negate(f: Formula) -> Formula:
    return f.child if f.kind == "not" else Not(f)


# -- text form ----------------------------------------------------------------

_OPS = {"and": " && ", "or": " || ", "xor": " ^ ", "implies": " -> "}


def to_text(f: Formula) -> str:
    """Render with C-like operators; compound operands are always parenthesised."""
    k = f.kind
    if k == "const":
        return "true" if f.value else "false"
    if k == "var":
        return f.name
    if k == "not":
        return "!" + _operand(f.child)
    return _OPS[k].join(_operand(c) for c in f.children)


def _operand(f: Formula) -> str:
    s = to_text(f)
    return s if f.kind in ("var", "const", "not") else f"({s})"


_TOKEN_RE = re.compile(r"\s*(?:(->)|(&&)|(\|\|)|([!^()])|([A-Za-z0-9_]+))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected input at column {pos}: {text[pos:pos + 10]!r}")
        out.append(next(g for g in m.groups() if g))
        pos = m.end()
    return out


def parse_formula(text: str) -> Formula:
    """Inverse of :func:`to_text`.

    Precedence from loosest to tightest: ``->`` (right associative), ``||``,
    ``^``, ``&&``, ``!``.
    """
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        t = peek()
        if t is None or (expected is not None and t != expected):
            raise FormulaSyntaxError(f"expected {expected or 'operand'} in {text!r}")
        pos += 1
        return t

    def implication():
        left = disjunction()
        if peek() == "->":
            take()
            return Implies(left, implication())
        return left

    def disjunction():
        parts = [xor()]
        while peek() == "||":
            take()
            parts.append(xor())
        return disj(parts)

    def xor():
        left = conjunction()
        while peek() == "^":
            take()
            left = Xor(left, conjunction())
        return left

    def conjunction():
        parts = [unary()]
        while peek() == "&&":
            take()
            parts.append(unary())
        return conj(parts)

    def unary():
        t = peek()
        if t == "!":
            take()
            return Not(unary())
        if t == "(":
            take()
            inner = implication()
            take(")")
            return inner
        t = take()
        if t == "true":
            return TRUE
        if t == "false":
            return FALSE
        if not _ATOM_RE.match(t):
            raise FormulaSyntaxError(f"unexpected token {t!r} in {text!r}")
        return Var(t)

    result = implication()
    if pos != len(toks):
        raise FormulaSyntaxError(f"trailing input {toks[pos]!r} in {text!r}")
    return result
