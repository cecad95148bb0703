"""Parser for the Kconfig subset the analysis understands.

Expressions are kept as small tuples (``KExpr``) instead of :class:`Formula`
because their meaning depends on the types of the symbols involved, which is
only known once every file has been read. :mod:`kmismatch.vm` does the
compilation.

    ("sym", name)         symbol reference (bare name)
    ("const", "y"|"m"|"n")
    ("str", text)         quoted or numeric literal
    ("not", e)
    ("and", a, b) / ("or", a, b)
    ("cmp", op, a, b)     op in = != < <= > >=
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from collections.abc import Callable

from .errors import Diagnostic, KconfigError, KconfigSyntaxError, UnknownOptionError

__all__ = [
    "KExpr", "ConfigOption", "ChoiceGroup", "KconfigModel", "parse_kconfig",
    "parse_kconfig_text", "visibility_of", "expr_symbols", "expr_to_text",
    "strip_config_prefix",
]

KExpr = tuple
TYPES = ("bool", "tristate", "string", "hex", "int")
_TYPE_ALIASES = {"boolean": "bool"}


def strip_config_prefix(name: str) -> str:
    return name[7:] if name.startswith("CONFIG_") else name


@dataclass
class ConfigOption:
    name: str
    type: str | None = None
    prompts: list = field(default_factory=list)      # (text, cond KExpr | None)
    defaults: list = field(default_factory=list)     # (value KExpr, cond KExpr | None)
    depends_on: KExpr | None = None
    selects: list = field(default_factory=list)      # (target, cond KExpr | None)
    help_text: str = ""
    declaring_file: str = ""
    line: int = 0
    choice: int | None = None

    @property
    def visible(self) -> bool:
        return bool(self.prompts)


@dataclass
class ChoiceGroup:
    members: list[str]
    optional: bool = False
    condition: KExpr | None = None
    type: str | None = None
    prompt: str = ""
    defaults: list = field(default_factory=list)
    file: str = ""
    line: int = 0


@dataclass
class KconfigModel:
    options: dict[str, ConfigOption]
    choices: list[ChoiceGroup]
    entry_file: str
    diagnostics: list[Diagnostic] = field(default_factory=list)
    modules_option: str | None = None

    def select_sources(self, target: str) -> list[tuple[str, KExpr | None]]:
        out = []
        for opt in self.options.values():
            for tgt, cond in opt.selects:
                if tgt == target:
                    out.append((opt.name, cond))
        return out


def visibility_of(model: KconfigModel, name: str) -> bool:
    """True iff the option has at least one prompt."""
    try:
        return model.options[strip_config_prefix(name)].visible
    except KeyError:
        raise UnknownOptionError(name) from None


# -- expressions -------------------------------------------------------------

def _and(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return ("and", a, b)


def _or(a, b):
    if a is None or b is None:
        return None
    return ("or", a, b)


def expr_symbols(e: KExpr | None) -> set[str]:
    if e is None:
        return set()
    k = e[0]
    if k == "sym":
        return {e[1]}
    if k in ("const", "str"):
        return set()
    if k == "not":
        return expr_symbols(e[1])
    if k == "cmp":
        return expr_symbols(e[2]) | expr_symbols(e[3])
    return expr_symbols(e[1]) | expr_symbols(e[2])


def expr_to_text(e: KExpr | None) -> str:
    if e is None:
        return "y"
    k = e[0]
    if k in ("sym", "const"):
        return e[1]
    if k == "str":
        return '"' + e[1] + '"'
    if k == "not":
        inner = expr_to_text(e[1])
        return "!" + (inner if e[1][0] in ("sym", "const") else f"({inner})")
    if k == "cmp":
        return f"{expr_to_text(e[2])} {e[1]} {expr_to_text(e[3])}"
    op = " && " if k == "and" else " || "
    parts = []
    for sub in e[1:]:
        t = expr_to_text(sub)
        parts.append(f"({t})" if sub[0] in ("and", "or") and sub[0] != k else t)
    return op.join(parts)


_TOKEN = re.compile(r"""
    \s*(?:
      (?P<str>"(?:\\.|[^"\\])*"|'(?:\\.|[^'\\])*')
    | (?P<op>&&|\|\||!=|<=|>=|[!()=<>])
    | (?P<word>[^\s"'!()=<>&|]+)
    )""", re.VERBOSE)


def _tokenize(text: str, file: str, line: int) -> list[tuple[str, str]]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        if text[pos:].strip() == "" or text[pos:].lstrip().startswith("#"):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise KconfigSyntaxError(f"cannot tokenize {text[pos:]!r}", file, line)
        pos = m.end()
        if m.group("str") is not None:
            raw = m.group("str")[1:-1]
            toks.append(("str", re.sub(r"\\(.)", r"\1", raw)))
        elif m.group("op") is not None:
            toks.append(("op", m.group("op")))
        else:
            toks.append(("word", m.group("word")))
    return toks


class _ExprParser:
    def __init__(self, toks, file, line):
        self.toks = toks
        self.i = 0
        self.file = file
        self.line = line

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def at_if(self):
        return self.peek() == ("word", "if")

    def error(self, msg):
        raise KconfigSyntaxError(msg, self.file, self.line)

    def parse(self):
        if self.peek() is None:
            self.error("expected expression")
        return self.disjunction()

    def disjunction(self):
        e = self.conjunction()
        while self.peek() == ("op", "||"):
            self.i += 1
            e = ("or", e, self.conjunction())
        return e

    def conjunction(self):
        e = self.unary()
        while self.peek() == ("op", "&&"):
            self.i += 1
            e = ("and", e, self.unary())
        return e

    def unary(self):
        tok = self.peek()
        if tok == ("op", "!"):
            self.i += 1
            return ("not", self.unary())
        if tok == ("op", "("):
            self.i += 1
            e = self.disjunction()
            if self.peek() != ("op", ")"):
                self.error("missing ')'")
            self.i += 1
            return e
        left = self.atom()
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] in ("=", "!=", "<", "<=", ">", ">="):
            self.i += 1
            return ("cmp", tok[1], left, self.atom())
        return left

    def atom(self):
        tok = self.peek()
        if tok is None or tok[0] == "op":
            self.error(f"expected symbol, got {tok[1] if tok else 'end of line'!r}")
        self.i += 1
        kind, text = tok
        if kind == "str":
            if text in ("y", "m", "n"):
                return ("const", text)
            return ("str", text)
        if text in ("y", "m", "n"):
            return ("const", text)
        if re.fullmatch(r"-?(0x[0-9a-fA-F]+|\d+)", text):
            return ("str", text)
        return ("sym", strip_config_prefix(text))


def _parse_expr_tail(toks, file, line, allow_if=True):
    """Parse ``expr [if expr]`` from a token list; returns (expr, cond)."""
    p = _ExprParser(toks, file, line)
    value = p.parse()
    cond = None
    if p.at_if() and allow_if:
        p.i += 1
        cond = p.parse()
    if p.peek() is not None:
        p.error(f"unexpected {p.peek()[1]!r}")
    return value, cond


def _parse_prompt_tail(toks, file, line):
    """Parse ``"text" [if expr]``."""
    if not toks or toks[0][0] != "str":
        raise KconfigSyntaxError("expected quoted prompt", file, line)
    cond = None
    rest = toks[1:]
    if rest:
        if rest[0] != ("word", "if"):
            raise KconfigSyntaxError(f"unexpected {rest[0][1]!r} after prompt", file, line)
        cond, extra = _parse_expr_tail(rest[1:], file, line, allow_if=False)
    return toks[0][1], cond


# -- parser ------------------------------------------------------------------

@dataclass
class _Block:
    kind: str                      # if / menu / choice
    deps: list = field(default_factory=list)
    parent: "_Block | None" = None
    choice_index: int | None = None

    def inherited(self):
        e = self.parent.inherited() if self.parent else None
        for d in self.deps:
            e = _and(e, d)
        return e


@dataclass
class _Definition:
    name: str
    block: _Block | None
    file: str
    line: int
    type: str | None = None
    deps: list = field(default_factory=list)
    prompts: list = field(default_factory=list)
    defaults: list = field(default_factory=list)
    selects: list = field(default_factory=list)
    help: str = ""


def _indent_width(line: str) -> int:
    return len(line.expandtabs(8)) - len(line.expandtabs(8).lstrip())


FileProvider = Callable[[str], str]


def _default_provider(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


class _Parser:
    def __init__(self, provider: FileProvider, root: str):
        self.provider = provider
        self.root = root
        self.defs: list[_Definition] = []
        self.choices: list[ChoiceGroup] = []
        self.choice_blocks: list[_Block] = []
        self.diags: list[Diagnostic] = []
        self.modules_option: str | None = None
        self.stack: list[_Block] = []
        self.current = None           # _Definition, ChoiceGroup index or a sink
        self.sourced: list[str] = []

    def rel(self, path: str) -> str:
        try:
            return os.path.relpath(path, self.root)
        except ValueError:
            return path

    def diag(self, kind, msg, file, line, symbols=()):
        self.diags.append(Diagnostic("kconfig", kind, msg, self.rel(file), line, tuple(symbols)))

    def top(self):
        return self.stack[-1] if self.stack else None

    def parse_file(self, path: str, optional=False):
        if path in self.sourced:
            raise KconfigError(f"recursive source of {self.rel(path)}")
        try:
            text = self.provider(path)
        except (OSError, KeyError):
            if optional:
                return
            raise KconfigError(f"cannot resolve source {self.rel(path)!r}") from None
        self.sourced.append(path)
        depth = len(self.stack)
        self._parse_lines(text, path)
        self.current = None
        if len(self.stack) != depth:
            raise KconfigSyntaxError(f"unterminated {self.stack[-1].kind} block", self.rel(path), None)
        self.sourced.pop()

    def _parse_lines(self, text: str, path: str):
        rel = self.rel(path)
        lines = text.splitlines()
        i = 0
        while i < len(lines):
            lineno = i + 1
            raw = lines[i]
            i += 1
            while raw.endswith("\\") and i < len(lines):
                raw = raw[:-1] + " " + lines[i]
                i += 1
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            toks = _tokenize(stripped, rel, lineno)
            if not toks:
                continue
            kw = toks[0][1] if toks[0][0] == "word" else None
            if kw in ("help", "---help---"):
                i = self._read_help(lines, i)
                continue
            self._statement(kw, toks, path, rel, lineno)

    def _read_help(self, lines, i):
        body = []
        indent = None
        while i < len(lines):
            line = lines[i]
            if not line.strip():
                body.append("")
                i += 1
                continue
            w = _indent_width(line)
            if indent is None:
                if w == 0:
                    break
                indent = w
            if w < indent:
                break
            body.append(line.expandtabs(8)[indent:])
            i += 1
        text = "\n".join(body).strip("\n")
        if isinstance(self.current, _Definition):
            self.current.help = text
        return i

    def _statement(self, kw, toks, path, rel, lineno):
        rest = toks[1:]
        if kw in ("config", "menuconfig"):
            if len(rest) != 1 or rest[0][0] != "word":
                raise KconfigSyntaxError(f"{kw} expects one symbol name", rel, lineno)
            name = strip_config_prefix(rest[0][1])
            d = _Definition(name, self.top(), rel, lineno)
            self.defs.append(d)
            self.current = d
            blk = self.top()
            if blk is not None and blk.kind == "choice":
                members = self.choices[blk.choice_index].members
                if name not in members:
                    members.append(name)
            return
        if kw == "choice":
            grp = ChoiceGroup([], file=rel, line=lineno)
            self.choices.append(grp)
            blk = _Block("choice", parent=self.top(), choice_index=len(self.choices) - 1)
            self.stack.append(blk)
            self.choice_blocks.append(blk)
            self.current = ("choice", blk.choice_index)
            return
        if kw in ("endchoice", "endmenu", "endif"):
            want = {"endchoice": "choice", "endmenu": "menu", "endif": "if"}[kw]
            if not self.stack or self.stack[-1].kind != want:
                raise KconfigSyntaxError(f"{kw} without matching {want}", rel, lineno)
            self.stack.pop()
            self.current = None
            return
        if kw == "menu":
            _parse_prompt_tail(rest, rel, lineno)
            blk = _Block("menu", parent=self.top())
            self.stack.append(blk)
            self.current = ("menu", blk)
            return
        if kw == "if":
            cond, extra = _parse_expr_tail(rest, rel, lineno, allow_if=False)
            self.stack.append(_Block("if", [cond], parent=self.top()))
            self.current = None
            return
        if kw in ("source", "rsource", "osource", "orsource"):
            if len(rest) != 1:
                raise KconfigSyntaxError(f"{kw} expects one path", rel, lineno)
            target = rest[0][1]
            if "$" in target:
                self.diag("unsupported", f"environment expansion in {kw} path {target!r} skipped", rel, lineno)
                return
            base = os.path.dirname(path) if kw in ("rsource", "orsource") else self.root
            self.parse_file(os.path.normpath(os.path.join(base, target)), optional=kw.startswith("o"))
            return
        if kw in ("mainmenu", "comment"):
            self.current = ("sink",)
            return
        self._attribute(kw, rest, rel, lineno)

    def _attribute(self, kw, rest, rel, lineno):
        cur = self.current
        if cur is None:
            raise KconfigSyntaxError(f"unexpected {kw!r} outside of an entry", rel, lineno)
        if kw == "depends":
            if not rest or rest[0] != ("word", "on"):
                raise KconfigSyntaxError("expected 'depends on'", rel, lineno)
            cond, _ = _parse_expr_tail(rest[1:], rel, lineno, allow_if=False)
            if isinstance(cur, _Definition):
                cur.deps.append(cond)
            elif cur[0] == "menu":
                cur[1].deps.append(cond)
            elif cur[0] == "choice":
                self.choice_blocks[cur[1]].deps.append(cond)
            return
        if isinstance(cur, tuple):
            self._group_attribute(cur, kw, rest, rel, lineno)
            return
        d: _Definition = cur
        if kw in TYPES or kw in _TYPE_ALIASES:
            self._set_type(d, _TYPE_ALIASES.get(kw, kw), rel, lineno)
            if rest:
                d.prompts.append(_parse_prompt_tail(rest, rel, lineno))
        elif kw in ("def_bool", "def_tristate"):
            self._set_type(d, kw[4:], rel, lineno)
            d.defaults.append(_parse_expr_tail(rest, rel, lineno))
        elif kw == "prompt":
            d.prompts.append(_parse_prompt_tail(rest, rel, lineno))
        elif kw == "default":
            d.defaults.append(_parse_expr_tail(rest, rel, lineno))
        elif kw == "select":
            target, cond = _parse_expr_tail(rest, rel, lineno)
            if target[0] != "sym":
                raise KconfigSyntaxError("select expects a symbol", rel, lineno)
            d.selects.append((target[1], cond))
        elif kw == "option" and rest == [("word", "modules")] or kw == "modules":
            self.modules_option = d.name
        elif kw in ("imply", "range", "visible", "option", "transitional", "optional"):
            self.diag("unsupported", f"'{kw}' is outside the supported subset and was ignored",
                      rel, lineno, (d.name,))
        else:
            raise KconfigSyntaxError(f"unknown keyword {kw!r}", rel, lineno)

    def _set_type(self, d, typ, rel, lineno):
        if d.type is not None and d.type != typ:
            self.diag("type-conflict", f"{d.name} redeclared as {typ}", rel, lineno, (d.name,))
        d.type = typ

    def _group_attribute(self, cur, kw, rest, rel, lineno):
        if cur[0] == "sink":
            return
        if cur[0] == "menu":
            if kw == "visible":
                self.diag("unsupported", "'visible if' on a menu was ignored", rel, lineno)
                return
            raise KconfigSyntaxError(f"unexpected {kw!r} in menu header", rel, lineno)
        grp = self.choices[cur[1]]
        if kw in TYPES or kw in _TYPE_ALIASES:
            grp.type = _TYPE_ALIASES.get(kw, kw)
            if rest:
                grp.prompt = _parse_prompt_tail(rest, rel, lineno)[0]
        elif kw == "prompt":
            grp.prompt = _parse_prompt_tail(rest, rel, lineno)[0]
        elif kw == "optional":
            grp.optional = True
        elif kw == "default":
            grp.defaults.append(_parse_expr_tail(rest, rel, lineno))
        else:
            self.diag("unsupported", f"'{kw}' on a choice was ignored", rel, lineno)

    def finish(self, entry: str) -> KconfigModel:
        options: dict[str, ConfigOption] = {}
        dep_alts: dict[str, KExpr | None] = {}
        for d in self.defs:
            full = d.block.inherited() if d.block else None
            for dep in d.deps:
                full = _and(full, dep)
            opt = options.get(d.name)
            if opt is None:
                opt = options[d.name] = ConfigOption(d.name, declaring_file=d.file, line=d.line)
                dep_alts[d.name] = full
                if d.block is not None:
                    blk = d.block
                    while blk is not None and blk.kind != "choice":
                        blk = blk.parent
                    if blk is not None and d.block is blk:
                        opt.choice = blk.choice_index
            else:
                self.diag("duplicate", f"{d.name} defined again; attributes merged",
                          d.file, d.line, (d.name,))
                dep_alts[d.name] = _or(dep_alts[d.name], full)
            if d.type is not None:
                if opt.type is not None and opt.type != d.type:
                    self.diag("type-conflict", f"{d.name} has conflicting types", d.file, d.line, (d.name,))
                opt.type = opt.type or d.type
            opt.prompts += [(t, _and(full, c)) for t, c in d.prompts]
            opt.defaults += [(v, _and(full, c)) for v, c in d.defaults]
            opt.selects += [(t, _and(full, c)) for t, c in d.selects]
            if d.help and not opt.help_text:
                opt.help_text = d.help
        for name, opt in options.items():
            opt.depends_on = dep_alts[name]
        for idx, blk in enumerate(self.choice_blocks):
            grp = self.choices[idx]
            grp.condition = blk.inherited()
            if grp.type is None and grp.members:
                grp.type = options[grp.members[0]].type
            for m in grp.members:
                if options[m].type is None:
                    options[m].type = grp.type
        for opt in options.values():
            if opt.type is None:
                self.diag("untyped", f"{opt.name} has no type", opt.declaring_file, opt.line, (opt.name,))
            for tgt, _ in opt.selects:
                if tgt not in options:
                    self.diag("dangling-select", f"{opt.name} selects undeclared {tgt}",
                              opt.declaring_file, opt.line, (opt.name, tgt))
        modules = self.modules_option or ("MODULES" if "MODULES" in options else None)
        return KconfigModel(options, self.choices, self.rel(entry), self.diags, modules)


def parse_kconfig(entry: str, provider: FileProvider | None = None,
                  root: str | None = None) -> KconfigModel:
    """Parse ``entry`` and everything it sources.

    ``source`` paths resolve against ``root`` (default: the entry's directory),
    ``rsource`` paths against the including file. ``provider`` maps a path to
    file contents and defaults to reading the filesystem.
    """
    root = root if root is not None else os.path.dirname(os.path.abspath(entry))
    parser = _Parser(provider or _default_provider, root)
    entry_path = entry if provider else os.path.abspath(entry)
    parser.parse_file(entry_path)
    return parser.finish(entry_path)


def parse_kconfig_text(text: str, name: str = "Kconfig",
                       extra_files: dict[str, str] | None = None) -> KconfigModel:
    """Parse in-memory Kconfig text; ``extra_files`` serves ``source`` lookups."""
    files = dict(extra_files or {})
    files[name] = text

    def provider(path):
        return files[os.path.normpath(path)]

    return parse_kconfig(name, provider, root="")
