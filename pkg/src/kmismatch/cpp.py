"""Block presence conditions from C preprocessor conditionals.

No macro expansion and no #include following. Conditions are read from
``#if``/``#ifdef``/``#ifndef``/``#elif``/``#else`` lines only; anything the
small expression translator cannot express becomes an opaque atom, and the
configuration symbols of that expression are marked unreliable.
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass, field
from collections.abc import Iterable, Mapping

from .errors import Diagnostic, UnbalancedDirectiveError
from .logic import FALSE, TRUE, Formula, Not, Var, atoms_of, conj, simplify, to_text
from .vm import PropositionalVM
from .kbuild import FilePresence
from .effects import PresenceCondition

__all__ = [
    "CodeBlock", "UnreliableVarSet", "strip_comments", "extract_blocks",
    "extract_blocks_text", "scan_unreliable", "combine_presence", "ConditionTranslator",
    "presence_json",
]

_DIRECTIVE = re.compile(r"^\s*#\s*(\w+)\b(.*)$")
_CONFIG_TOKEN = re.compile(r"\bCONFIG_(\w+)")
_CONDITIONAL = ("if", "ifdef", "ifndef", "elif")


def strip_comments(text: str) -> str:
    """Blank out comments and string/char literal contents, keeping newlines."""
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "/" and i + 1 < n and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            j = n if j < 0 else j + 2
            out.append(re.sub(r"[^\n]", " ", text[i:j]))
            i = j
        elif c == "/" and i + 1 < n and text[i + 1] == "/":
            j = text.find("\n", i)
            j = n if j < 0 else j
            out.append(" " * (j - i))
            i = j
        elif c in "\"'":
            j = i + 1
            while j < n and text[j] != c and text[j] != "\n":
                j += 2 if text[j] == "\\" else 1
            j = min(j + 1, n)
            out.append(c + " " * max(0, j - i - 2) + (text[j - 1] if j - i >= 2 else ""))
            i = j
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _logical_lines(text: str):
    """(first physical line number, joined text) per logical line."""
    lines = text.split("\n")
    i = 0
    while i < len(lines):
        start = i + 1
        buf = lines[i]
        while buf.endswith("\\") and i + 1 < len(lines):
            i += 1
            buf = buf[:-1] + " " + lines[i]
        yield start, buf
        i += 1


@dataclass(frozen=True)
class CodeBlock:
    file: str
    start_line: int
    end_line: int
    local_condition: Formula
    full_condition: Formula
    parent: int | None = None       # index into the block list of the same file
    depth: int = 1

    def to_dict(self) -> dict:
        return {"file": self.file, "lines": [self.start_line, self.end_line],
                "local": to_text(self.local_condition), "condition": to_text(self.full_condition)}


@dataclass
class UnreliableVarSet:
    names: set[str] = field(default_factory=set)
    reasons: dict[str, set[str]] = field(default_factory=dict)

    def add(self, name: str, reason: str) -> None:
        self.names.add(name)
        self.reasons.setdefault(name, set()).add(reason)

    def merge(self, other: "UnreliableVarSet") -> "UnreliableVarSet":
        out = UnreliableVarSet(set(self.names), {k: set(v) for k, v in self.reasons.items()})
        for name, rs in other.reasons.items():
            for r in rs:
                out.add(name, r)
        return out

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def reason_text(self, name: str) -> str:
        return ",".join(sorted(self.reasons.get(name, ())))


# -- #if expression translation ----------------------------------------------

_CTOKEN = re.compile(r"\s*(?:(\d+[uUlL]*|0[xX][0-9a-fA-F]+[uUlL]*)|([A-Za-z_]\w*)|"
                     r"(&&|\|\||==|!=|<=|>=|<<|>>|[!~()<>+\-*/%&|^?:,]))")
_BINARY_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5, "==": 6, "!=": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "<<": 8, ">>": 8, "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}


class _CParseError(Exception):
    pass


def _ctokens(text: str) -> list[str]:
    toks, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _CTOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise _CParseError(text[pos:])
        toks.append(m.group(m.lastindex))
        pos = m.end()
    return toks


def _parse_c(toks: list[str]):
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take():
        nonlocal pos
        if pos >= len(toks):
            raise _CParseError("unexpected end")
        pos += 1
        return toks[pos - 1]

    def primary():
        t = take()
        if t == "(":
            e = ternary()
            if take() != ")":
                raise _CParseError("missing )")
            return e
        if t in ("!", "~", "-", "+"):
            return ("unary", t, primary())
        if t == "defined":
            if peek() == "(":
                take()
                name = take()
                if take() != ")":
                    raise _CParseError("bad defined")
            else:
                name = take()
            return ("defined", name)
        if re.match(r"[A-Za-z_]", t):
            if peek() == "(":
                take()
                args = []
                while peek() != ")":
                    args.append(ternary())
                    if peek() == ",":
                        take()
                take()
                return ("call", t, tuple(args))
            return ("ident", t)
        if re.match(r"\d", t):
            digits = t.rstrip("uUlL")
            return ("num", int(digits, 16) if digits.lower().startswith("0x") else int(digits, 8 if digits.startswith("0") and len(digits) > 1 else 10))
        raise _CParseError(f"unexpected {t!r}")

    def binary(min_prec):
        left = primary()
        while True:
            op = peek()
            prec = _BINARY_PREC.get(op)
            if prec is None or prec < min_prec:
                return left
            take()
            right = binary(prec + 1)
            left = ("bin", op, left, right)

    def ternary():
        cond = binary(1)
        if peek() == "?":
            take()
            a = ternary()
            if take() != ":":
                raise _CParseError("bad ternary")
            return ("ternary", cond, a, ternary())
        return cond

    e = ternary()
    if pos != len(toks):
        raise _CParseError("trailing tokens")
    return e


def _config_names(node) -> set[str]:
    """CONFIG_ identifiers anywhere in a parsed expression."""
    if not isinstance(node, tuple):
        return set()
    if node and isinstance(node[0], str):
        if node[0] in ("ident", "defined"):
            return {node[1]} if node[1].startswith("CONFIG_") else set()
        parts = node[1:]
    else:
        parts = node
    out = set()
    for part in parts:
        out |= _config_names(part)
    return out


class ConditionTranslator:
    """Turns ``#if`` text into a Formula over model atoms.

    ``unparsed`` collects bare names of configuration symbols that occurred
    in expressions needing an opaque atom.
    """

    def __init__(self, vm: PropositionalVM | None = None):
        self.vm = vm
        self.opaque: dict[str, str] = {}
        self.unparsed: set[str] = set()
        self._dirty = False

    def resolve(self, macro: str) -> str:
        """Bare variable name a CONFIG_ macro refers to."""
        name = macro[7:] if macro.startswith("CONFIG_") else macro
        if self.vm is not None and name not in self.vm.atom_map and name.endswith("_MODULE"):
            if name[:-7] in self.vm.atom_map:
                return name[:-7]
        return name

    def config_atom(self, macro: str, aspect: str = "defined") -> Formula:
        name = macro[7:]
        if self.vm is not None:
            if aspect == "defined":
                f = self.vm.code_atom(name)
            elif aspect == "enabled":
                f = self.vm.guard(name, "ym")
            elif aspect == "builtin":
                f = self.vm.guard(name, "y")
            else:
                atoms = self.vm.atom_map.get(name)
                f = None if atoms is None else (Var(atoms[1]) if len(atoms) == 2 else FALSE)
            if f is not None:
                return f
        if aspect == "module":
            return Var(name + "_MODULE")
        return Var(name)

    def _opaque(self, text: str) -> Formula:
        self._dirty = True
        if re.fullmatch(r"[A-Za-z_]\w*", text):
            atom = "__cpp_" + text
        else:
            atom = "__cpp_" + hashlib.sha1(text.encode()).hexdigest()[:10]
        self.opaque[atom] = text
        return Var(atom)

    def translate(self, text: str) -> Formula:
        self._dirty = False
        try:
            node = _parse_c(_ctokens(text))
        except (_CParseError, ValueError):
            f = self._opaque(" ".join(text.split()))
            self._mark(set(_CONFIG_TOKEN.findall(text)))
            return f
        f = self.node(node)
        if self._dirty:
            self._mark({n[7:] for n in _config_names(node)})
        return simplify(f)

    def _mark(self, names):
        for n in names:
            self.unparsed.add(self.resolve("CONFIG_" + n))

    def node(self, e) -> Formula:
        k = e[0]
        if k == "num":
            return TRUE if e[1] else FALSE
        if k in ("defined", "ident"):
            if e[1].startswith("CONFIG_"):
                return self.config_atom(e[1])
            return self._opaque(e[1])
        if k == "call" and e[1] in ("IS_ENABLED", "IS_BUILTIN", "IS_MODULE") \
                and len(e[2]) == 1 and e[2][0][0] == "ident" and e[2][0][1].startswith("CONFIG_"):
            aspect = {"IS_ENABLED": "enabled", "IS_BUILTIN": "builtin", "IS_MODULE": "module"}[e[1]]
            return self.config_atom(e[2][0][1], aspect)
        if k == "unary" and e[1] == "!":
            return Not(self.node(e[2]))
        if k == "bin" and e[1] in ("&&", "||"):
            a, b = self.node(e[2]), self.node(e[3])
            return a & b if e[1] == "&&" else a | b
        if k == "bin" and e[1] in ("==", "!="):
            for x, y in ((e[2], e[3]), (e[3], e[2])):
                if y[0] == "num" and y[1] in (0, 1) and x[0] in ("ident", "defined", "call") \
                        and _config_names(x):
                    f = self.node(x)
                    positive = (y[1] == 1) == (e[1] == "==")
                    return f if positive else Not(f)
        return self._opaque(_render(e))


def _render(e) -> str:
    k = e[0]
    if k == "num":
        return str(e[1])
    if k == "ident":
        return e[1]
    if k == "defined":
        return f"defined({e[1]})"
    if k == "unary":
        return e[1] + _render(e[2])
    if k == "call":
        return f"{e[1]}({', '.join(_render(a) for a in e[2])})"
    if k == "ternary":
        return f"({_render(e[1])} ? {_render(e[2])} : {_render(e[3])})"
    return f"({_render(e[2])} {e[1]} {_render(e[3])})"


# -- block extraction --------------------------------------------------------

def extract_blocks_text(text: str, file: str, translator: ConditionTranslator | None = None
                        ) -> list[CodeBlock]:
    """Blocks of one C file, in order of their opening directive."""
    tr = translator or ConditionTranslator()
    blocks: list[CodeBlock] = []
    # frame: [previous branch conditions, index of the open block, parent full condition, parent index]
    stack: list[list] = []
    for lineno, line in _logical_lines(strip_comments(text)):
        m = _DIRECTIVE.match(line)
        if not m:
            continue
        d, rest = m.group(1), m.group(2).strip()
        if d in ("if", "ifdef", "ifndef"):
            if d == "if":
                cond = tr.translate(rest)
            else:
                macro = rest.split()[0] if rest.split() else ""
                if not macro:
                    raise UnbalancedDirectiveError(f"#{d} without a macro name", file, lineno)
                cond = tr.translate(f"defined({macro})")
                if d == "ifndef":
                    cond = simplify(Not(cond))
            parent_full = blocks[stack[-1][1]].full_condition if stack else TRUE
            parent_idx = stack[-1][1] if stack else None
            blocks.append(CodeBlock(file, lineno, lineno, cond, simplify(conj(parent_full, cond)),
                                    parent_idx, len(stack) + 1))
            stack.append([[cond], len(blocks) - 1, parent_full, parent_idx])
        elif d in ("elif", "else"):
            if not stack:
                raise UnbalancedDirectiveError(f"#{d} without #if", file, lineno)
            frame = stack[-1]
            if frame[0] is None:
                raise UnbalancedDirectiveError(f"#{d} after #else", file, lineno)
            _close(blocks, frame[1], lineno)
            prior = [Not(c) for c in frame[0]]
            cond = tr.translate(rest) if d == "elif" else TRUE
            local = simplify(conj(*prior, cond))
            blocks.append(CodeBlock(file, lineno, lineno, local, simplify(conj(frame[2], local)),
                                    frame[3], len(stack)))
            frame[1] = len(blocks) - 1
            frame[0] = None if d == "else" else frame[0] + [cond]
        elif d == "endif":
            if not stack:
                raise UnbalancedDirectiveError("#endif without #if", file, lineno)
            _close(blocks, stack.pop()[1], lineno)
    if stack:
        open_line = blocks[stack[-1][1]].start_line
        raise UnbalancedDirectiveError("unterminated conditional", file, open_line)
    return blocks


def _close(blocks, idx, lineno):
    b = blocks[idx]
    blocks[idx] = CodeBlock(b.file, b.start_line, lineno, b.local_condition, b.full_condition,
                            b.parent, b.depth)


def extract_blocks(c_file: str, root: str | None = None,
                   translator: ConditionTranslator | None = None) -> list[CodeBlock]:
    with open(c_file, encoding="utf-8", errors="replace") as fh:
        text = fh.read()
    label = os.path.relpath(c_file, root).replace(os.sep, "/") if root else c_file
    return extract_blocks_text(text, label, translator)


# -- unreliable variables -----------------------------------------------------

def scan_unreliable(sources: Mapping[str, str], vm: PropositionalVM | None = None,
                    translator: ConditionTranslator | None = None) -> UnreliableVarSet:
    """Variables used in headers, outside conditionals, or in unparsed conditions.

    ``sources`` maps relative paths to file contents.
    """
    tr = translator or ConditionTranslator(vm)
    out = UnreliableVarSet()
    for path in sorted(sources):
        text = strip_comments(sources[path])
        if path.endswith(".h"):
            for tok in _CONFIG_TOKEN.findall(text):
                out.add(tr.resolve("CONFIG_" + tok), "header-usage")
            continue
        if not path.endswith(".c"):
            continue
        for _, line in _logical_lines(text):
            m = _DIRECTIVE.match(line)
            if m and m.group(1) in _CONDITIONAL:
                continue
            if m and m.group(1) in ("else", "endif"):
                continue
            for tok in _CONFIG_TOKEN.findall(line):
                out.add(tr.resolve("CONFIG_" + tok), "non-conditional-usage")
    for name in sorted(tr.unparsed):
        out.add(name, "unparsed-expression")
    return out


# -- combination ---------------------------------------------------------------

def combine_presence(file_pcs: Iterable[FilePresence], blocks: Iterable[CodeBlock],
                     diagnostics: list[Diagnostic] | None = None) -> list[PresenceCondition]:
    """Build-space PC per file plus code-space PC (file ∧ block) per block."""
    by_file = {fp.source_file: fp for fp in file_pcs}
    out: list[PresenceCondition] = []
    for fp in sorted(by_file.values(), key=lambda p: p.source_file):
        out.append(PresenceCondition(fp.condition, "build", fp.source_file, None,
                                     atoms_of(fp.condition)))
    for b in blocks:
        fp = by_file.get(b.file)
        if fp is None:
            if diagnostics is not None:
                diagnostics.append(Diagnostic("cpp", "no-file-presence",
                                              "file has no build presence condition; assumed never compiled",
                                              b.file, b.start_line))
            file_cond = FALSE
        else:
            file_cond = fp.condition
        cond = simplify(conj(file_cond, b.full_condition))
        out.append(PresenceCondition(cond, "code", b.file, (b.start_line, b.end_line),
                                     atoms_of(b.full_condition)))
    return out


def presence_json(pcs: Iterable[PresenceCondition]) -> str:
    import json
    return json.dumps([pc.to_dict() for pc in pcs], indent=2, sort_keys=True) + "\n"
