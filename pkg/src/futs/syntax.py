"""Process terms, environments, the shared parser and the pretty-printer.

Both languages share ``nil``, choice ``P + Q``, cooperation ``P <a,b> Q`` and
constants.  PEPA adds the rated prefix ``(a,r).P``; IML has the action prefix
``a.P`` and the delay prefix ``(r).P``.

Concrete syntax, one definition per line, the last expression is the root::

    X := (a,1).X + (b,1/2).nil     % comment
    @actions c                      % optional extra alphabet
    X <a> (a,2).nil

Cooperation binds tighter than choice, prefixes tighter than both; binary
operators associate to the left.
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from fractions import Fraction

from .errors import ParseError
from .semiring import parse_rational

PEPA = "pepa"
IML = "iml"
LANGUAGES = (PEPA, IML)


class Term:
    __slots__ = ("_hash",)

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return self._fields() == other._fields()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return self._hash

    def _fields(self):
        raise NotImplementedError

    def __str__(self):
        return show(self)

    def __lt__(self, other):
        return str(self) < str(other)

    def __reduce__(self):
        return (type(self), self._fields())


class Nil(Term):
    __slots__ = ()

    def __init__(self):
        self._hash = hash("nil")

    def _fields(self):
        return ()

    def __repr__(self):
        return "Nil()"


class Prefix(Term):
    """PEPA rated prefix ``(action, rate).cont``."""

    __slots__ = ("action", "rate", "cont")

    def __init__(self, action: str, rate: Fraction, cont: Term):
        self.action, self.rate, self.cont = action, Fraction(rate), cont
        self._hash = hash(("pre", action, self.rate, cont._hash))

    def _fields(self):
        return (self.action, self.rate, self.cont)

    def __repr__(self):
        return f"Prefix({self.action!r}, {self.rate!r}, {self.cont!r})"


class Act(Term):
    """IML action prefix ``action.cont``."""

    __slots__ = ("action", "cont")

    def __init__(self, action: str, cont: Term):
        self.action, self.cont = action, cont
        self._hash = hash(("act", action, cont._hash))

    def _fields(self):
        return (self.action, self.cont)

    def __repr__(self):
        return f"Act({self.action!r}, {self.cont!r})"


class Delay(Term):
    """IML delay prefix ``(rate).cont``."""

    __slots__ = ("rate", "cont")

    def __init__(self, rate: Fraction, cont: Term):
        self.rate, self.cont = Fraction(rate), cont
        self._hash = hash(("delay", self.rate, cont._hash))

    def _fields(self):
        return (self.rate, self.cont)

    def __repr__(self):
        return f"Delay({self.rate!r}, {self.cont!r})"


class Choice(Term):
    __slots__ = ("left", "right")

    def __init__(self, left: Term, right: Term):
        self.left, self.right = left, right
        self._hash = hash(("+", left._hash, right._hash))

    def _fields(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"Choice({self.left!r}, {self.right!r})"


class Coop(Term):
    """Cooperation ``left <actions> right``."""

    __slots__ = ("left", "right", "actions")

    def __init__(self, left: Term, right: Term, actions: Iterable[str]):
        self.left, self.right, self.actions = left, right, frozenset(actions)
        self._hash = hash(("||", left._hash, right._hash, self.actions))

    def _fields(self):
        return (self.left, self.right, self.actions)

    def __repr__(self):
        return f"Coop({self.left!r}, {self.right!r}, {sorted(self.actions)!r})"


class Const(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("const", name))

    def _fields(self):
        return (self.name,)

    def __repr__(self):
        return f"Const({self.name!r})"


NIL = Nil()


def fmt_rate(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def show(t: Term, level: int = 0) -> str:
    """Concrete syntax with the minimum of parentheses; parses back to ``t``."""
    if isinstance(t, Nil):
        return "nil"
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Prefix):
        return f"({t.action},{fmt_rate(t.rate)}).{show(t.cont, 2)}"
    if isinstance(t, Act):
        return f"{t.action}.{show(t.cont, 2)}"
    if isinstance(t, Delay):
        return f"({fmt_rate(t.rate)}).{show(t.cont, 2)}"
    if isinstance(t, Choice):
        text = f"{show(t.left, 0)} + {show(t.right, 1)}"
        return f"({text})" if level > 0 else text
    if isinstance(t, Coop):
        text = f"{show(t.left, 1)} <{','.join(sorted(t.actions))}> {show(t.right, 2)}"
        return f"({text})" if level > 1 else text
    raise TypeError(f"not a term: {t!r}")


def actions_of(t: Term) -> set:
    """Actions occurring in prefixes and cooperation sets of ``t``."""
    out = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Prefix | Act):
            out.add(u.action)
            stack.append(u.cont)
        elif isinstance(u, Delay):
            stack.append(u.cont)
        elif isinstance(u, Choice):
            stack += (u.left, u.right)
        elif isinstance(u, Coop):
            out |= u.actions
            stack += (u.left, u.right)
    return out


def constants_of(t: Term) -> set:
    out = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Const):
            out.add(u.name)
        elif isinstance(u, Prefix | Act | Delay):
            stack.append(u.cont)
        elif isinstance(u, Choice | Coop):
            stack += (u.left, u.right)
    return out


def unguarded_constants(t: Term) -> set:
    """Constants of ``t`` that do not sit under a prefix."""
    if isinstance(t, Const):
        return {t.name}
    if isinstance(t, Choice | Coop):
        return unguarded_constants(t.left) | unguarded_constants(t.right)
    return set()


class Env:
    """Constant definitions plus the finite action alphabet.

    The alphabet is every action occurring in a definition body, in the terms
    passed to :meth:`with_terms`, or in an ``@actions`` declaration.  Semantic
    functions memoize per environment in ``memo``.
    """

    def __init__(self, language: str, definitions: dict | None = None, alphabet: Iterable[str] = ()):
        if language not in LANGUAGES:
            raise ValueError(f"unknown language {language!r}")
        self.language = language
        self.definitions = dict(definitions or {})
        acts = set(alphabet)
        for body in self.definitions.values():
            acts |= actions_of(body)
        self.alphabet = tuple(sorted(acts))
        self.memo = {}

    def body(self, name: str) -> Term:
        return self.definitions[name]

    def with_terms(self, *terms: Term) -> "Env":
        """This environment with the alphabet widened to cover ``terms``."""
        acts = set(self.alphabet)
        for t in terms:
            acts |= actions_of(t)
        if acts == set(self.alphabet):
            return self
        env = Env(self.language, self.definitions, acts)
        env.memo = self.memo  # step results do not depend on the alphabet
        return env

    def __getstate__(self):
        return {"language": self.language, "definitions": self.definitions, "alphabet": self.alphabet}

    def __setstate__(self, state):
        self.__init__(state["language"], state["definitions"], state["alphabet"])

    def __repr__(self):
        return f"Env({self.language}, {len(self.definitions)} definitions, alphabet={list(self.alphabet)})"


def check_env(env: Env, roots: Iterable[Term] = ()):
    """Raise ParseError if a constant is undefined or recursion is unguarded."""
    for name, body in env.definitions.items():
        for c in constants_of(body):
            if c not in env.definitions:
                raise ParseError("undefined-constant", f"{c} (used in the body of {name})")
    for t in roots:
        for c in constants_of(t):
            if c not in env.definitions:
                raise ParseError("undefined-constant", c)
    cycle = _unguarded_cycle(env)
    if cycle:
        raise ParseError("unguarded-recursion", " -> ".join(cycle))


def _unguarded_cycle(env: Env):
    graph = {name: sorted(unguarded_constants(body)) for name, body in env.definitions.items()}
    state = {}
    for start in graph:
        if start in state:
            continue
        path = [start]
        state[start] = 1
        iters = [iter(graph[start])]
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                state[path.pop()] = 2
                iters.pop()
            elif state.get(nxt) == 1:
                return path[path.index(nxt):] + [nxt]
            elif nxt not in state:
                state[nxt] = 1
                path.append(nxt)
                iters.append(iter(graph.get(nxt, ())))
    return None


# --- lexer / parser -------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<num>\d+(?:\.\d+)?(?:[ \t]*/[ \t]*\d+(?:\.\d+)?)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<decl>@actions\b)
  | (?P<op>:=|[().,+<>])
    """,
    re.VERBOSE,
)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


def _tokenize(text: str, line: int, col0: int = 1):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError("syntax-error", f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            tok_text = m.group()
            if kind == "op":
                kind = tok_text
            elif kind == "ident" and tok_text == "nil":
                kind = "nil"
            toks.append(_Tok(kind, tok_text, line, col0 + pos))
        pos = m.end()
    toks.append(_Tok("eol", "", line, col0 + len(text)))
    return toks


class _Parser:
    def __init__(self, toks, language):
        self.toks = toks
        self.i = 0
        self.language = language

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind=None):
        tok = self.peek()
        if kind is not None and tok.kind != kind:
            want = "end of line" if kind == "eol" else repr(kind)
            got = "end of line" if tok.kind == "eol" else repr(tok.text)
            raise ParseError("syntax-error", f"expected {want}, found {got}", tok.line, tok.col)
        self.i += 1
        return tok

    def expr(self):
        t = self.term()
        while self.peek().kind == "+":
            self.take()
            t = Choice(t, self.term())
        return t

    def term(self):
        t = self.factor()
        while self.peek().kind == "<":
            self.take()
            acts = []
            if self.peek().kind != ">":
                acts.append(self.take("ident").text)
                while self.peek().kind == ",":
                    self.take()
                    acts.append(self.take("ident").text)
            self.take(">")
            t = Coop(t, self.factor(), acts)
        return t

    def rate(self):
        tok = self.take("num")
        try:
            r = parse_rational(tok.text)
        except ValueError as exc:
            raise ParseError("syntax-error", str(exc), tok.line, tok.col) from None
        if r <= 0:
            raise ParseError("nonpositive-rate", f"rate {tok.text} must be positive", tok.line, tok.col)
        return r

    def factor(self):
        tok = self.peek()
        if tok.kind == "nil":
            self.take()
            return NIL
        if self.language == PEPA:
            if tok.kind == "(" and self.peek(1).kind == "ident" and self.peek(2).kind == ",":
                self.take("(")
                action = self.take("ident").text
                self.take(",")
                r = self.rate()
                self.take(")")
                self.take(".")
                return Prefix(action, r, self.factor())
        else:
            if tok.kind == "(" and self.peek(1).kind == "num":
                self.take("(")
                r = self.rate()
                self.take(")")
                self.take(".")
                return Delay(r, self.factor())
            if tok.kind == "ident" and self.peek(1).kind == ".":
                action = self.take().text
                self.take(".")
                return Act(action, self.factor())
        if tok.kind == "ident":
            self.take()
            return Const(tok.text)
        if tok.kind == "(":
            self.take()
            t = self.expr()
            self.take(")")
            return t
        if tok.kind == "num":
            raise ParseError("syntax-error", f"unexpected rate {tok.text!r}", tok.line, tok.col)
        got = "end of line" if tok.kind == "eol" else repr(tok.text)
        raise ParseError("syntax-error", f"expected a process, found {got}", tok.line, tok.col)


def _strip_comment(line: str) -> str:
    k = line.find("%")
    return line if k < 0 else line[:k]


def parse_term(text: str, language: str, line: int = 1) -> Term:
    """Parse a single expression (no definitions)."""
    p = _Parser(_tokenize(_strip_comment(text), line), language)
    t = p.expr()
    p.take("eol")
    return t


def parse_program(text: str, language: str) -> tuple[Env, Term | None]:
    """Parse definitions plus an optional final root expression.

    Returns ``(env, root)``; the environment's alphabet covers the root.
    """
    if language not in LANGUAGES:
        raise ValueError(f"unknown language {language!r}")
    definitions = {}
    def_lines = {}
    declared = set()
    root = None
    root_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokenize(_strip_comment(raw), lineno)
        if toks[0].kind == "eol":
            continue
        if root is not None:
            raise ParseError("syntax-error", "the root expression must be the last line", root_line, 1)
        p = _Parser(toks, language)
        if toks[0].kind == "decl":
            p.take()
            declared.add(p.take("ident").text)
            while p.peek().kind == ",":
                p.take()
                declared.add(p.take("ident").text)
            p.take("eol")
        elif toks[0].kind == "ident" and toks[1].kind == ":=":
            name = toks[0].text
            if name in definitions:
                raise ParseError("duplicate-definition", name, lineno, toks[0].col)
            p.i = 2
            definitions[name] = p.expr()
            p.take("eol")
            def_lines[name] = lineno
        else:
            root = p.expr()
            p.take("eol")
            root_line = lineno
    env = Env(language, definitions, declared)
    try:
        check_env(env, [root] if root is not None else [])
    except ParseError as exc:
        line = _blame_line(exc, def_lines, root_line)
        raise ParseError(exc.kind, exc.message, line, 1 if line else 0) from None
    if root is not None:
        env = env.with_terms(root)
    return env, root


def _blame_line(exc: ParseError, def_lines: dict, root_line: int) -> int:
    if exc.kind == "unguarded-recursion":
        return def_lines.get(exc.message.split(" -> ")[0], 0)
    m = re.search(r"used in the body of (\S+)\)", exc.message)
    if m:
        return def_lines.get(m.group(1), 0)
    return root_line


def resolve_root(env: Env, text: str) -> tuple[Env, Term]:
    """Parse ``text`` as a root in ``env``: a constant name or any expression."""
    t = parse_term(text, env.language)
    check_env(env, [t])
    return env.with_terms(t), t


def split_corpus_lines(text: str) -> list[tuple[int, str]]:
    """Programs separated by ``---`` lines, each with its first line number."""
    chunks, cur, start = [], [], 1
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() == "---":
            chunks.append((start, cur))
            cur, start = [], lineno + 1
        else:
            cur.append(line)
    chunks.append((start, cur))
    return [
        (start, "\n".join(lines)) for start, lines in chunks if any(_strip_comment(x).strip() for x in lines)
    ]


def split_corpus(text: str) -> list[str]:
    return [src for _line, src in split_corpus_lines(text)]


def dump_ast(t: Term, indent: int = 0) -> str:
    """Indented tree view used by ``futs parse``."""
    pad = "  " * indent
    if isinstance(t, Nil):
        return f"{pad}nil"
    if isinstance(t, Const):
        return f"{pad}const {t.name}"
    if isinstance(t, Prefix):
        return f"{pad}prefix ({t.action}, {fmt_rate(t.rate)})\n{dump_ast(t.cont, indent + 1)}"
    if isinstance(t, Act):
        return f"{pad}action {t.action}\n{dump_ast(t.cont, indent + 1)}"
    if isinstance(t, Delay):
        return f"{pad}delay {fmt_rate(t.rate)}\n{dump_ast(t.cont, indent + 1)}"
    if isinstance(t, Choice):
        return f"{pad}choice\n{dump_ast(t.left, indent + 1)}\n{dump_ast(t.right, indent + 1)}"
    if isinstance(t, Coop):
        return (
            f"{pad}coop <{','.join(sorted(t.actions))}>\n"
            f"{dump_ast(t.left, indent + 1)}\n{dump_ast(t.right, indent + 1)}"
        )
    raise TypeError(t)
