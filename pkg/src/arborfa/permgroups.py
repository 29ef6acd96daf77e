"""Finite permutation groups by brute force.

Permutations compose like functions: ``(p * q)(i) == p(q(i))``.  Elements are
enumerated breadth-first from the identity by right multiplication with the
generators, which fixes a deterministic element order used elsewhere for
coset representatives and labels.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .abelianization import AbelianInvariants, invariants_from_relations
from .presentations import GeneratorAssignment, Presentation, evaluate_word, format_word

__all__ = [
    "Permutation",
    "PermGroup",
    "FiniteBSet",
    "OrbitReport",
    "CapExceeded",
    "DEFAULT_CAP",
    "enumerate_elements",
    "orbits",
    "wreath_perm_realization",
    "finite_abelianization",
    "cyclic_group",
    "symmetric_group",
    "trivial_group",
]

DEFAULT_CAP = 10**6


class CapExceeded(RuntimeError):
    """Raised when an enumeration would exceed its cap; ``count`` is how far it got."""

    def __init__(self, what: str, cap: int, count: int):
        super().__init__(f"{what}: cap {cap} exceeded after {count} elements")
        self.cap = cap
        self.count = count


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a bijection: {self.images}")

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, text: str | Sequence[Sequence[int]], degree: int | None = None) -> "Permutation":
        """Parse ``(0 1)(2 3)`` (or a list of cycles). ``()`` is the identity."""
        if isinstance(text, str):
            body = text.strip()
            cycles = []
            pos = 0
            for m in _CYCLE_RE.finditer(body):
                if body[pos:m.start()].strip():
                    raise ValueError(f"bad cycle notation: {text!r}")
                pos = m.end()
                inner = m.group(1).replace(",", " ").split()
                cycles.append([int(x) for x in inner])
            if body[pos:].strip() or (body and not cycles):
                raise ValueError(f"bad cycle notation: {text!r}")
        else:
            cycles = [list(c) for c in text]
        pts = [x for c in cycles for x in c]
        if len(pts) != len(set(pts)):
            raise ValueError(f"cycles are not disjoint: {text!r}")
        top = max(pts) + 1 if pts else 0
        if degree is None:
            degree = top
        elif degree < top:
            raise ValueError(f"degree {degree} too small for {text!r}")
        img = list(range(degree))
        for c in cycles:
            for i, x in enumerate(c):
                img[x] = c[(i + 1) % len(c)]
        return cls(tuple(img))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        s = self.images
        return Permutation(tuple(s[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def identity_like(self) -> "Permutation":
        return Permutation.identity(self.degree)

    def __pow__(self, n: int) -> "Permutation":
        base = self if n >= 0 else self.inverse()
        out = self.identity_like()
        for _ in range(abs(n)):
            out = out * base
        return out

    @property
    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for i in range(self.degree):
            if i in seen or self.images[i] == i:
                continue
            c = [i]
            seen.add(i)
            j = self.images[i]
            while j != i:
                c.append(j)
                seen.add(j)
                j = self.images[j]
            out.append(tuple(c))
        return out

    def __str__(self) -> str:
        cs = self.cycles()
        if not cs:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cs)

    def order(self) -> int:
        from math import lcm

        out = 1
        for c in self.cycles():
            out = lcm(out, len(c))
        return out


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: tuple[Permutation, ...]
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.degree != self.degree:
                raise ValueError(f"generator {g} has degree {g.degree}, expected {self.degree}")

    @property
    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def elements(self, cap: int = DEFAULT_CAP) -> list[Permutation]:
        return enumerate_elements(self, cap)

    def order(self, cap: int = DEFAULT_CAP) -> int:
        return len(enumerate_elements(self, cap))

    def assignment(self) -> GeneratorAssignment:
        """Generator ``i`` of a presentation maps to ``generators[i]``."""
        return GeneratorAssignment("permutation", dict(enumerate(self.generators)), self.identity)

    def satisfies(self, p: Presentation) -> bool:
        if p.ngens != len(self.generators):
            return False
        phi = self.assignment()
        return all(evaluate_word(r, phi).is_identity for r in p.relators)

    def cayley_presentation(self, symbols: Sequence[str] | None = None, name: str | None = None) -> Presentation:
        """A (redundant) presentation read off the Cayley graph.

        Relators are the non-tree edges of a BFS spanning tree, which generate
        the kernel of the free group onto this group.
        """
        from .presentations import Word

        n = len(self.generators)
        symbols = tuple(symbols or [f"x{i}" for i in range(n)])
        elems = enumerate_elements(self)
        index = {e: i for i, e in enumerate(elems)}
        rep: list[Word | None] = [None] * len(elems)
        rep[0] = Word()
        rels = []
        queue = deque([0])
        tree = set()
        while queue:
            c = queue.popleft()
            for j, g in enumerate(self.generators):
                d = index[elems[c] * g]
                if rep[d] is None:
                    rep[d] = rep[c] * Word.gen(j)
                    tree.add((c, j))
                    queue.append(d)
        for c in range(len(elems)):
            for j, g in enumerate(self.generators):
                if (c, j) in tree:
                    continue
                d = index[elems[c] * g]
                w = rep[c] * Word.gen(j) * rep[d].inverse()
                if not w.is_identity:
                    rels.append(w)
        return Presentation(name or self.name or "Q", symbols, tuple(rels))


def enumerate_elements(g: PermGroup, cap: int = DEFAULT_CAP) -> list[Permutation]:
    """All elements of ``g`` in BFS order from the identity."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    one = g.identity
    seen = {one}
    out = [one]
    queue = deque([one])
    while queue:
        x = queue.popleft()
        for s in g.generators:
            y = x * s
            if y not in seen:
                if len(out) >= cap:
                    raise CapExceeded("enumerate_elements", cap, len(out))
                seen.add(y)
                out.append(y)
                queue.append(y)
    return out


def _closure(gens: Iterable[Permutation], one: Permutation, cap: int) -> set[Permutation]:
    gens = [x for x in gens if not x.is_identity]
    seen = {one}
    queue = deque([one])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = x * s
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise CapExceeded("closure", cap, len(seen))
                queue.append(y)
    return seen


@dataclass(frozen=True)
class FiniteBSet:
    """A finite set {0..points-1} with B-generator ``i`` acting by ``action[i]``."""

    points: int
    action: tuple[Permutation, ...]

    def __post_init__(self):
        object.__setattr__(self, "action", tuple(self.action))
        for a in self.action:
            if a.degree != self.points:
                raise ValueError("action permutations must have degree == points")

    @classmethod
    def regular(cls, b: PermGroup, cap: int = DEFAULT_CAP) -> "FiniteBSet":
        """B acting on itself by left multiplication, points in enumeration order."""
        elems = enumerate_elements(b, cap)
        index = {e: i for i, e in enumerate(elems)}
        act = [Permutation(tuple(index[s * e] for e in elems)) for s in b.generators]
        return cls(len(elems), tuple(act))

    def check_against(self, b: Presentation) -> None:
        """Raise unless the action respects every relator of ``b``."""
        if len(self.action) != b.ngens:
            raise ValueError(f"B-set has {len(self.action)} generator images, B has {b.ngens} generators")
        phi = GeneratorAssignment("permutation", dict(enumerate(self.action)), Permutation.identity(self.points))
        for r in b.relators:
            if not evaluate_word(r, phi).is_identity:
                raise ValueError(f"B-set action violates relator {format_word(r, b.generators)}")

    def stabilizes(self, gen: int, point: int = 0) -> bool:
        return self.action[gen](point) == point

    def group(self) -> PermGroup:
        return PermGroup(self.points, self.action)


@dataclass(frozen=True)
class OrbitReport:
    orbits: tuple[tuple[int, ...], ...]

    @property
    def has_singleton(self) -> bool:
        return any(len(o) == 1 for o in self.orbits)

    @property
    def count(self) -> int:
        return len(self.orbits)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(o) for o in self.orbits)


def orbits(x: FiniteBSet) -> OrbitReport:
    seen = [False] * x.points
    out = []
    for start in range(x.points):
        if seen[start]:
            continue
        seen[start] = True
        orb = [start]
        queue = deque([start])
        while queue:
            p = queue.popleft()
            for a in x.action:
                for q in (a(p), a.inverse()(p)):
                    if not seen[q]:
                        seen[q] = True
                        orb.append(q)
                        queue.append(q)
        out.append(tuple(sorted(orb)))
    return OrbitReport(tuple(out))


def wreath_perm_realization(a: PermGroup, x: FiniteBSet, cap: int = DEFAULT_CAP) -> PermGroup:
    """A wr_X B acting on X x dom(A); point (p, i) is ``p * deg(A) + i``.

    Base generators act as an A-generator on one coordinate block; top
    generators move whole blocks along the B-action on X.
    """
    enumerate_elements(a, cap)
    d, m = a.degree, x.points
    gens = []
    for p in range(m):
        for g in a.generators:
            img = list(range(d * m))
            for i in range(d):
                img[p * d + i] = p * d + g(i)
            gens.append(Permutation(tuple(img)))
    for s in x.action:
        img = [s(p) * d + i for p in range(m) for i in range(d)]
        gens.append(Permutation(tuple(img)))
    return PermGroup(d * m, tuple(gens), name=f"{a.name or 'A'} wr {m}")


def finite_abelianization(g: PermGroup, cap: int = DEFAULT_CAP) -> AbelianInvariants:
    """Abelian invariants of g / [g, g], by brute force.

    The commutator subgroup is the normal closure of commutators of the
    generators.  The quotient is then read as an abelian group on the images
    of the generators: one relation per edge of its Cayley graph, measured
    against BFS exponent vectors of the cosets.
    """
    elems = enumerate_elements(g, cap)
    one = g.identity
    gens = list(g.generators)
    normal_gens = [x * y * x.inverse() * y.inverse() for x in gens for y in gens]
    derived = _closure(normal_gens, one, cap)
    while True:
        extra = [s * n * s.inverse() for n in list(normal_gens) for s in gens]
        extra = [e for e in extra if e not in derived]
        if not extra:
            break
        normal_gens.extend(extra)
        derived = _closure(normal_gens, one, cap)

    derived_list = list(derived)
    coset: dict[Permutation, int] = {}
    ncosets = 0
    for e in elems:
        if e in coset:
            continue
        for h in derived_list:
            coset[e * h] = ncosets
        ncosets += 1

    n = len(gens)
    vec: list[list[int] | None] = [None] * ncosets
    vec[coset[one]] = [0] * n
    rep = {coset[one]: one}
    queue = deque([coset[one]])
    rows = []
    while queue:
        c = queue.popleft()
        for j, s in enumerate(gens):
            y = rep[c] * s
            d = coset[y]
            step = list(vec[c])
            step[j] += 1
            if vec[d] is None:
                vec[d] = step
                rep[d] = y
                queue.append(d)
            else:
                row = [u - v for u, v in zip(step, vec[d])]
                if any(row):
                    rows.append(row)
    return invariants_from_relations(n, rows)


def cyclic_group(n: int, name: str | None = None) -> PermGroup:
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return PermGroup(1, (), name or "Z/1")
    return PermGroup(n, (Permutation(tuple((i + 1) % n for i in range(n))),), name or f"Z/{n}")


def symmetric_group(n: int, name: str | None = None) -> PermGroup:
    if n < 2:
        return PermGroup(max(n, 1), (), name or f"Sym({n})")
    gens = [Permutation.from_cycles([[0, 1]], n)]
    if n > 2:
        gens.append(Permutation.from_cycles([list(range(n))], n))
    return PermGroup(n, tuple(gens), name or f"Sym({n})")


def trivial_group() -> PermGroup:
    return PermGroup(1, (), "1")
