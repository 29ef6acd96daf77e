"""Words in free groups, finite presentations and the presentation DSL.

A word is stored as a tuple of ``(generator_index, exponent)`` runs with no
two adjacent runs on the same generator, so structural equality of
:class:`Word` objects is equality in the free group.

The DSL looks like::

    group D { gens: a, t; rels: a^2, [a, t a t^-1]; }

with ``[x, y]`` standing for ``x y x^-1 y^-1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

__all__ = [
    "Word",
    "Presentation",
    "GeneratorAssignment",
    "DSLSyntaxError",
    "MissingImageError",
    "free_reduce",
    "commutator",
    "parse_presentation",
    "parse_word",
    "format_word",
    "format_presentation",
    "evaluate_word",
    "eliminate_trivial_generators",
    "free_product",
]


def _reduce_runs(letters: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    stack: list[list[int]] = []
    for gen, exp in letters:
        gen, exp = int(gen), int(exp)
        if exp == 0:
            continue
        if stack and stack[-1][0] == gen:
            stack[-1][1] += exp
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([gen, exp])
    return tuple((g, e) for g, e in stack)


@dataclass(frozen=True)
class Word:
    """Freely reduced word; ``letters`` are ``(generator, exponent)`` runs."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _reduce_runs(self.letters))

    @classmethod
    def gen(cls, index: int, exp: int = 1) -> "Word":
        return cls(((index, exp),))

    @classmethod
    def from_signed(cls, seq: Iterable[int]) -> "Word":
        """Build from a sequence of signed 1-based generator numbers (``-2`` is b^-1)."""
        return cls(tuple((abs(x) - 1, 1 if x > 0 else -1) for x in seq))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __iter__(self):
        return iter(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def syllables(self) -> int:
        return len(self.letters)

    def expanded(self) -> list[tuple[int, int]]:
        """Letters one at a time, as ``(generator, +1 or -1)``."""
        out = []
        for g, e in self.letters:
            s = 1 if e > 0 else -1
            out.extend([(g, s)] * abs(e))
        return out

    def generators(self) -> set[int]:
        return {g for g, _ in self.letters}

    def exponent_sums(self, ngens: int) -> list[int]:
        sums = [0] * ngens
        for g, e in self.letters:
            sums[g] += e
        return sums

    def cyclically_reduced(self) -> "Word":
        letters = list(self.letters)
        while len(letters) >= 2 and letters[0][0] == letters[-1][0]:
            g = letters[0][0]
            e = letters[0][1] + letters[-1][1]
            middle = letters[1:-1]
            letters = [(g, e)] + middle if e else middle
            letters = list(_reduce_runs(letters))
        return Word(tuple(letters))

    def substitute(self, images: Mapping[int, "Word"]) -> "Word":
        """Replace generator ``g`` by ``images[g]`` where given."""
        out: list[tuple[int, int]] = []
        for g, e in self.letters:
            if g in images:
                w = images[g] if e > 0 else images[g].inverse()
                out.extend(w.letters * abs(e))
            else:
                out.append((g, e))
        return Word(tuple(out))

    def relabel(self, mapping: Mapping[int, int]) -> "Word":
        return Word(tuple((mapping[g], e) for g, e in self.letters))


def free_reduce(w: Word | Iterable[tuple[int, int]]) -> Word:
    """Return the freely reduced form of ``w`` (a Word or raw runs)."""
    if isinstance(w, Word):
        return Word(w.letters)
    return Word(tuple(w))


def commutator(x: Word, y: Word) -> Word:
    return x * y * x.inverse() * y.inverse()


@dataclass(frozen=True)
class Presentation:
    name: str
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(self.relators))
        if len(set(self.generators)) != len(self.generators):
            raise ValueError(f"duplicate generator symbols in {self.generators}")
        n = len(self.generators)
        for r in self.relators:
            if not isinstance(r, Word):
                raise TypeError("relators must be Word instances")
            if r.is_identity:
                raise ValueError("relators must be nonempty")
            if any(g < 0 or g >= n for g in r.generators()):
                raise ValueError(f"relator {r} refers to a generator out of range")

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def index(self, symbol: str) -> int:
        return self.generators.index(symbol)

    def word(self, text: str) -> Word:
        """Parse a word over this presentation's generators."""
        return parse_word(text, self.generators)

    def format(self, w: Word) -> str:
        return format_word(w, self.generators)

    def __str__(self) -> str:
        return format_presentation(self)


class DSLSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class MissingImageError(KeyError):
    pass


# DSL ---------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<id>[A-Za-z_][A-Za-z0-9_@.']*)
  | (?P<int>-?\d+)
  | (?P<op>[{}\[\];:,^])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.symbols: dict[str, int] = {}

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise DSLSyntaxError(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def expect_id(self) -> _Tok:
        tok = self.next()
        if tok.kind != "id":
            self.fail(f"expected identifier, found {tok.text or 'end of input'!r}", tok)
        return tok

    def presentation(self) -> Presentation:
        kw = self.expect_id()
        if kw.text != "group":
            self.fail("expected 'group'", kw)
        name = self.expect_id().text
        self.expect("{")
        gens = self.gens_clause()
        rels: list[Word] = []
        if self.peek().text == "rels":
            rels = self.rels_clause(gens)
        self.expect("}")
        if self.peek().kind != "eof":
            self.fail("trailing input after presentation")
        return Presentation(name, tuple(gens), tuple(r for r in rels if not r.is_identity))

    def gens_clause(self) -> list[str]:
        kw = self.expect_id()
        if kw.text != "gens":
            self.fail("expected 'gens'", kw)
        self.expect(":")
        gens: list[str] = []
        if self.peek().text != ";":
            while True:
                tok = self.expect_id()
                if tok.text in self.symbols:
                    self.fail(f"duplicate generator {tok.text!r}", tok)
                self.symbols[tok.text] = len(gens)
                gens.append(tok.text)
                if self.peek().text != ",":
                    break
                self.next()
        self.expect(";")
        return gens

    def rels_clause(self, gens: list[str]) -> list[Word]:
        kw = self.next()
        self.expect(":")
        rels: list[Word] = []
        if self.peek().text != ";":
            if not gens:
                self.fail("relators given for an empty generator list", kw)
            while True:
                rels.append(self.word({"]", ",", ";"}))
                if self.peek().text != ",":
                    break
                self.next()
        self.expect(";")
        return rels

    def word(self, stop: set[str]) -> Word:
        w = Word()
        while self.peek().text not in stop and self.peek().kind != "eof":
            w = w * self.factor()
        return w

    def factor(self) -> Word:
        tok = self.next()
        if tok.kind == "id":
            if tok.text not in self.symbols:
                self.fail(f"unknown generator {tok.text!r}", tok)
            base = Word.gen(self.symbols[tok.text])
        elif tok.text == "[":
            x = self.word({",", "]"})
            self.expect(",")
            y = self.word({",", "]"})
            self.expect("]")
            base = commutator(x, y)
        else:
            self.fail(f"unexpected {tok.text or 'end of input'!r} in word", tok)
        if self.peek().text == "^":
            self.next()
            num = self.next()
            if num.kind != "int":
                self.fail("expected integer exponent", num)
            base = base ** int(num.text)
        return base


def parse_presentation(text: str) -> Presentation:
    """Parse one ``group <name> { gens: ...; rels: ...; }`` block."""
    return _Parser(text).presentation()


def parse_word(text: str, symbols: Sequence[str]) -> Word:
    p = _Parser(text)
    p.symbols = {s: i for i, s in enumerate(symbols)}
    w = p.word(set())
    if p.peek().kind != "eof":
        p.fail("trailing input after word")
    return w


def format_word(w: Word, symbols: Sequence[str]) -> str:
    if w.is_identity:
        return "1"
    parts = []
    for g, e in w.letters:
        parts.append(symbols[g] if e == 1 else f"{symbols[g]}^{e}")
    return " ".join(parts)


def format_presentation(p: Presentation) -> str:
    head = f"group {p.name} {{ gens: {', '.join(p.generators)};"
    if p.relators:
        rels = ", ".join(format_word(r, p.generators) for r in p.relators)
        return f"{head} rels: {rels}; }}"
    return f"{head} }}"


# evaluation ---------------------------------------------------------------

TARGET_KINDS = ("permutation", "tree-isometry", "line-isometry")


@dataclass(frozen=True)
class GeneratorAssignment:
    """Images of generators (by index) in a target group.

    Target elements must support ``*``, ``inverse()`` and ``identity_like()``.
    ``identity`` is needed only when ``images`` is empty.
    """

    kind: str
    images: Mapping[int, Any]
    identity: Any = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in TARGET_KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}")
        object.__setattr__(self, "images", dict(self.images))

    @classmethod
    def from_symbols(cls, p: Presentation, images: Mapping[str, Any], kind: str, identity=None):
        unknown = set(images) - set(p.generators)
        if unknown:
            raise ValueError(f"images given for unknown generators {sorted(unknown)}")
        return cls(kind, {p.index(s): v for s, v in images.items()}, identity)

    def one(self):
        if self.identity is not None:
            return self.identity
        if not self.images:
            raise ValueError("empty assignment needs an explicit identity")
        return next(iter(self.images.values())).identity_like()

    def covers(self, p: Presentation) -> bool:
        return all(i in self.images for i in range(p.ngens))


def _power(x, n: int, one):
    if n < 0:
        x, n = x.inverse(), -n
    result = one
    while n:
        if n & 1:
            result = result * x
        x = x * x
        n >>= 1
    return result


def evaluate_word(w: Word, phi: GeneratorAssignment):
    """Multiply out the images of the letters of ``w``, left to right."""
    one = phi.one()
    result = one
    for g, e in w.letters:
        if g not in phi.images:
            raise MissingImageError(f"no image for generator {g}")
        result = result * _power(phi.images[g], e, one)
    return result


# light-weight rewriting -----------------------------------------------------


def eliminate_trivial_generators(p: Presentation) -> Presentation:
    """Drop generators killed by a one-letter relator ``x`` or ``x^-1``.

    Repeats until stable; relators that become empty are removed.
    """
    gens = list(p.generators)
    rels = list(p.relators)
    while True:
        dead = {w.letters[0][0] for w in rels if len(w.letters) == 1 and abs(w.letters[0][1]) == 1}
        if not dead:
            break
        keep = [i for i in range(len(gens)) if i not in dead]
        mapping = {old: new for new, old in enumerate(keep)}
        kill = {i: Word() for i in dead}
        rels = [w.substitute(kill) for w in rels]
        rels = [w.relabel(mapping) for w in rels if not w.is_identity]
        gens = [gens[i] for i in keep]
    return Presentation(p.name, tuple(gens), tuple(rels))


def free_product(p: Presentation, q: Presentation, name: str | None = None) -> tuple[Presentation, int]:
    """Free product presentation; returns it with the index offset of ``q``'s generators.

    Colliding symbols are disambiguated with a trailing ``'``.
    """
    taken = set(p.generators)
    q_syms = []
    for s in q.generators:
        t = s
        while t in taken:
            t += "'"
        taken.add(t)
        q_syms.append(t)
    off = p.ngens
    shift = {i: i + off for i in range(q.ngens)}
    rels = tuple(p.relators) + tuple(r.relabel(shift) for r in q.relators)
    return Presentation(name or f"{p.name}_{q.name}", p.generators + tuple(q_syms), rels), off
