"""Presentation builders: finite wreath products, the truncations Gamma(A, B, F),
graph products M(A, B', F), and the finitely presented cover K used to show
that A wr_X B is a quotient of a finitely presented group with (FA).

Generator ``a`` in copy ``b`` is rendered ``a@b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .permgroups import DEFAULT_CAP, FiniteBSet, Permutation, PermGroup, enumerate_elements
from .presentations import (
    GeneratorAssignment,
    Presentation,
    Word,
    commutator,
    evaluate_word,
    format_word,
    free_product,
)
from .todd_coxeter import group_order

__all__ = [
    "ConstructionError",
    "WreathSpec",
    "GammaSpec",
    "CoverSpec",
    "wreath_presentation_finite_b",
    "gamma_presentation",
    "graph_product_presentation",
    "cover_presentation_k",
    "fpgroup_export",
    "resolve_element",
]


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class WreathSpec:
    a: Presentation
    b: Presentation
    x: FiniteBSet


def _copy_symbols(a: Presentation, labels: Sequence) -> list[str]:
    return [f"{s}@{lab}" for lab in labels for s in a.generators]


def wreath_presentation_finite_b(spec: WreathSpec, cap: int = 100_000) -> Presentation:
    """Presentation of A wr_X B for finite B and finite X.

    Generators: one copy of S_A per point of X, then S_B.  Relators: A's
    relators in each copy, B's relators, commutators between distinct
    copies, and ``beta a@x beta^-1 = a@beta(x)``.
    """
    a, b, x = spec.a, spec.b, spec.x
    try:
        group_order(b, cap)
    except Exception as exc:  # noqa: BLE001 - any enumeration failure means "not certified finite"
        raise ConstructionError(f"B is not finite under cap {cap}: {exc}") from exc
    x.check_against(b)
    na, m = a.ngens, x.points
    syms = _copy_symbols(a, range(m))
    boff = len(syms)
    gens = syms + list(b.generators)
    if len(set(gens)) != len(gens):
        raise ConstructionError("generator names of the copies collide with B's generators")

    def cp(point: int, g: int) -> Word:
        return Word.gen(point * na + g)

    rels: list[Word] = []
    for p in range(m):
        shift = {g: p * na + g for g in range(na)}
        rels.extend(r.relabel(shift) for r in a.relators)
    rels.extend(r.relabel({g: boff + g for g in range(b.ngens)}) for r in b.relators)
    for p in range(m):
        for q in range(p + 1, m):
            for g in range(na):
                for h in range(na):
                    rels.append(commutator(cp(p, g), cp(q, h)))
    for j, act in enumerate(x.action):
        beta = Word.gen(boff + j)
        for p in range(m):
            for g in range(na):
                rels.append(beta * cp(p, g) * beta.inverse() * cp(act(p), g).inverse())
    rels = [r for r in rels if not r.is_identity]
    return Presentation(f"{a.name}_wr_{b.name}", tuple(gens), tuple(rels))


@dataclass(frozen=True)
class GammaSpec:
    """A, B and a finite list F of words over B's generators.

    ``k`` keeps only the first k entries of F.  ``witness`` optionally maps
    B onto a finite permutation group; every u in F must survive there.
    """

    a: Presentation
    b: Presentation
    f: tuple[Word, ...]
    k: int | None = None
    witness: GeneratorAssignment | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(self.f))


def _symmetrized(words: Sequence[Word]) -> list[Word]:
    out: list[Word] = []
    for w in words:
        for v in (w, w.inverse()):
            if v not in out:
                out.append(v)
    return out


def gamma_presentation(spec: GammaSpec, symmetrize: bool = False) -> Presentation:
    """A * B modulo [a, u a' u^-1] for a, a' in S_A and u in F."""
    f = list(spec.f)
    if spec.k is not None:
        if spec.k < 0:
            raise ConstructionError("k must be non-negative")
        f = f[: spec.k]
    if symmetrize:
        f = _symmetrized(f)
    for u in f:
        if u.is_identity:
            raise ConstructionError("F must not contain the identity")
        if any(g >= spec.b.ngens for g in u.generators()):
            raise ConstructionError("F words must use B's generators only")
        if spec.witness is not None and evaluate_word(u, spec.witness).is_identity:
            raise ConstructionError(f"{format_word(u, spec.b.generators)} is trivial in the witness quotient")
    base, off = free_product(spec.a, spec.b, name=f"Gamma_{spec.a.name}_{spec.b.name}")
    rels = list(base.relators)
    na = spec.a.ngens
    for u in f:
        uu = u.relabel({g: g + off for g in range(spec.b.ngens)})
        for i in range(na):
            for j in range(na):
                rels.append(commutator(Word.gen(i), uu * Word.gen(j) * uu.inverse()))
    return Presentation(base.name, base.generators, tuple(rels))


def resolve_element(elems: Sequence[Permutation], x) -> Permutation:
    """Accept a Permutation, an enumeration index, or cycle notation."""
    if isinstance(x, Permutation):
        if x not in elems:
            raise ConstructionError(f"{x} is not an element of the group")
        return x
    if isinstance(x, int):
        if not 0 <= x < len(elems):
            raise ConstructionError(f"element index {x} out of range")
        return elems[x]
    if isinstance(x, str):
        return resolve_element(elems, Permutation.from_cycles(x, elems[0].degree))
    raise TypeError(f"cannot interpret {x!r} as a group element")


def graph_product_presentation(
    a: Presentation,
    b_prime: PermGroup,
    f_image,
    cap: int = DEFAULT_CAP,
    name: str | None = None,
) -> Presentation:
    """Free product of copies A_b (b in B') with [A_b, A_bs] = 1 for s in F.

    Copies are labelled by enumeration index in B'.  Each unordered pair
    {b, bs} contributes its |S_A|^2 commutators once.
    """
    elems = enumerate_elements(b_prime, cap)
    index = {e: i for i, e in enumerate(elems)}
    f = [resolve_element(elems, s) for s in f_image]
    if any(s.is_identity for s in f):
        raise ConstructionError("F must not contain the identity")
    na = a.ngens
    gens = _copy_symbols(a, range(len(elems)))
    rels: list[Word] = []
    for c in range(len(elems)):
        shift = {g: c * na + g for g in range(na)}
        rels.extend(r.relabel(shift) for r in a.relators)
    pairs = []
    for bi, b in enumerate(elems):
        for s in f:
            ci = index[b * s]
            pair = (min(bi, ci), max(bi, ci))
            if pair not in pairs:
                pairs.append(pair)
    for p, q in pairs:
        for g in range(na):
            for h in range(na):
                rels.append(commutator(Word.gen(p * na + g), Word.gen(q * na + h)))
    return Presentation(name or f"M_{a.name}", tuple(gens), tuple(rels))


@dataclass(frozen=True)
class CoverSpec:
    """A, B and, for each B-generator, whether it lies in the basepoint stabilizer C."""

    a: Presentation
    b: Presentation
    sb_in_c: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "sb_in_c", tuple(bool(v) for v in self.sb_in_c))
        if len(self.sb_in_c) != self.b.ngens:
            raise ConstructionError("need one C-membership flag per generator of B")

    @classmethod
    def from_bset(cls, a: Presentation, b: Presentation, x: FiniteBSet, basepoint: int = 0) -> "CoverSpec":
        x.check_against(b)
        return cls(a, b, tuple(x.stabilizes(j, basepoint) for j in range(b.ngens)))


def cover_presentation_k(spec: CoverSpec) -> Presentation:
    """A * B plus [c, a] for c in C cap S_B, and [b a b^-1, a'] for b in S_B - C."""
    if all(spec.sb_in_c):
        raise ConstructionError("every generator of B lies in C; the construction requires \"S_B-C is non-empty\"")
    base, off = free_product(spec.a, spec.b, name=f"K_{spec.a.name}_{spec.b.name}")
    rels = list(base.relators)
    na = spec.a.ngens
    in_c = [off + j for j, v in enumerate(spec.sb_in_c) if v]
    out_c = [off + j for j, v in enumerate(spec.sb_in_c) if not v]
    for c in in_c:
        for i in range(na):
            rels.append(commutator(Word.gen(c), Word.gen(i)))
    for bgen in out_c:
        bw = Word.gen(bgen)
        for i in range(na):
            for j in range(na):
                rels.append(commutator(bw * Word.gen(i) * bw.inverse(), Word.gen(j)))
    return Presentation(base.name, base.generators, tuple(rels))


def fpgroup_export(p: Presentation) -> str:
    """Line-oriented ``FpGroup`` text for a computer algebra system."""
    names = ", ".join(f'"{s}"' for s in p.generators)
    lines = [f"F := FreeGroup({names});"]

    def letter(g: int, e: int) -> str:
        return f"F.{g + 1}" if e == 1 else f"F.{g + 1}^{e}"

    rels = []
    for r in p.relators:
        rels.append("*".join(letter(g, e) for g, e in r.letters))
    lines.append(f"G := F / [{', '.join(rels)}];")
    return "\n".join(lines) + "\n"
