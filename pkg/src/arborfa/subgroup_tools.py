"""Finite-index subgroups given as kernels of maps onto finite permutation groups.

The coset table of such a kernel is the Cayley graph of the image, so no
coset enumeration is needed here.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .abelianization import AbelianInvariants, abelian_invariants
from .constructions import ConstructionError, graph_product_presentation, resolve_element
from .permgroups import DEFAULT_CAP, CapExceeded, Permutation, PermGroup, enumerate_elements
from .presentations import (
    GeneratorAssignment,
    Presentation,
    Word,
    evaluate_word,
    format_presentation,
    format_word,
)

__all__ = [
    "CosetTable",
    "Index2Scan",
    "FreeQuotientWitness",
    "WitnessError",
    "WordTooLong",
    "kernel_coset_table",
    "reidemeister_schreier",
    "eliminate_generators",
    "index2_scan",
    "free_quotient_witness",
]

DEFAULT_WORD_CAP = 10_000


class WitnessError(ValueError):
    pass


class WordTooLong(RuntimeError):
    pass


@dataclass(frozen=True)
class CosetTable:
    """Cosets of ker(phi) = elements of the image; ``table[c][j]`` = c . g_j."""

    presentation: Presentation
    images: tuple[Permutation, ...]
    elements: tuple[Permutation, ...]
    table: tuple[tuple[int, ...], ...]
    reps: tuple[Word, ...]
    tree_edges: frozenset[tuple[int, int]]
    surjective: bool = True

    @property
    def index(self) -> int:
        return len(self.elements)

    def quotient(self) -> PermGroup:
        deg = self.elements[0].degree
        return PermGroup(deg, self.images)

    def inverse_step(self, c: int, j: int) -> int:
        return self._inverse[c][j]

    @property
    def _inverse(self):
        inv = getattr(self, "_inv_cache", None)
        if inv is None:
            inv = [[0] * len(self.images) for _ in self.elements]
            for c, row in enumerate(self.table):
                for j, d in enumerate(row):
                    inv[d][j] = c
            object.__setattr__(self, "_inv_cache", inv)
        return inv


def kernel_coset_table(
    p: Presentation,
    phi: GeneratorAssignment,
    quotient: PermGroup | None = None,
    cap: int = DEFAULT_CAP,
) -> CosetTable:
    """Coset table of the kernel of ``phi``: one coset per element of the image.

    Schreier representatives come from the BFS spanning tree.  If
    ``quotient`` is given, ``surjective`` records whether phi hits all of it.
    """
    if phi.kind != "permutation":
        raise ValueError("kernel_coset_table needs a permutation-valued assignment")
    imgs = []
    for i in range(p.ngens):
        if i not in phi.images:
            raise ValueError(f"generator {p.generators[i]} has no image")
        imgs.append(phi.images[i])
    for r in p.relators:
        if not evaluate_word(r, phi).is_identity:
            raise ValueError(f"assignment violates relator {format_word(r, p.generators)}")
    one = phi.one()
    elems = [one]
    index = {one: 0}
    reps = [Word()]
    tree = set()
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for j, g in enumerate(imgs):
            y = elems[c] * g
            if y not in index:
                if len(elems) >= cap:
                    raise CapExceeded("kernel_coset_table", cap, len(elems))
                index[y] = len(elems)
                elems.append(y)
                reps.append(reps[c] * Word.gen(j))
                tree.add((c, j))
                queue.append(index[y])
    table = tuple(tuple(index[elems[c] * g] for g in imgs) for c in range(len(elems)))
    surjective = True
    if quotient is not None:
        surjective = len(elems) == quotient.order(cap)
    return CosetTable(p, tuple(imgs), tuple(elems), table, tuple(reps), frozenset(tree), surjective)


def _canonical_cyclic(w: Word) -> tuple:
    """Key identifying a relator up to cyclic permutation and inversion."""
    w = w.cyclically_reduced()
    out = []
    for v in (w, w.inverse()):
        letters = v.expanded()
        n = len(letters)
        out.extend(tuple(letters[i:] + letters[:i]) for i in range(max(n, 1)))
    return min(out)


def eliminate_generators(p: Presentation, word_cap: int = DEFAULT_WORD_CAP) -> Presentation:
    """Tietze-eliminate generators that occur exactly once in some relator.

    The shortest such relator is solved for that generator and the solution
    is substituted everywhere.  Also drops relators that are empty or repeat
    another up to cyclic permutation and inversion.
    """
    gens = list(p.generators)
    rels = [r.cyclically_reduced() for r in p.relators]
    while True:
        seen = set()
        uniq = []
        for r in rels:
            if r.is_identity:
                continue
            key = _canonical_cyclic(r)
            if key not in seen:
                seen.add(key)
                uniq.append(r)
        rels = uniq
        best = None
        for ri, r in enumerate(rels):
            counts: dict[int, int] = {}
            for g, e in r.letters:
                counts[g] = counts.get(g, 0) + abs(e)
            for g, cnt in counts.items():
                if cnt == 1:
                    cand = (len(r), ri, g)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            break
        _, ri, g = best
        r = rels[ri]
        # rotate r so that g^e is the first letter: g^e * rest = 1
        letters = list(r.letters)
        pos = next(i for i, (h, _) in enumerate(letters) if h == g)
        letters = letters[pos:] + letters[:pos]
        e = letters[0][1]
        rest = Word(tuple(letters[1:]))
        solution = rest.inverse() if e == 1 else rest
        new_rels = []
        for i, s in enumerate(rels):
            if i == ri:
                continue
            t = s.substitute({g: solution}).cyclically_reduced()
            if len(t) > word_cap:
                raise WordTooLong(f"relator length {len(t)} exceeds cap {word_cap}")
            new_rels.append(t)
        keep = [i for i in range(len(gens)) if i != g]
        mapping = {old: new for new, old in enumerate(keep)}
        rels = [s.relabel(mapping) for s in new_rels if not s.is_identity]
        gens = [gens[i] for i in keep]
    return Presentation(p.name, tuple(gens), tuple(rels))


def reidemeister_schreier(
    t: CosetTable,
    name: str | None = None,
    simplify: bool = True,
    word_cap: int = DEFAULT_WORD_CAP,
) -> Presentation:
    """Presentation of the kernel on Schreier generators ``<gen>.<coset>``.

    Generators on spanning-tree edges are trivial and dropped.  With
    ``simplify`` the result is further reduced by :func:`eliminate_generators`.
    """
    p = t.presentation
    n, ng = t.index, p.ngens
    slot = {}
    syms = []
    for c in range(n):
        for j in range(ng):
            if (c, j) in t.tree_edges:
                continue
            slot[(c, j)] = len(syms)
            syms.append(f"{p.generators[j]}.{c}")

    def s_word(c: int, j: int, sign: int) -> list[tuple[int, int]]:
        k = slot.get((c, j))
        return [] if k is None else [(k, sign)]

    rels = []
    for c in range(n):
        for r in p.relators:
            cur = c
            out: list[tuple[int, int]] = []
            for j, sgn in r.expanded():
                if sgn > 0:
                    out.extend(s_word(cur, j, 1))
                    cur = t.table[cur][j]
                else:
                    prev = t.inverse_step(cur, j)
                    out.extend(s_word(prev, j, -1))
                    cur = prev
                if len(out) > word_cap:
                    raise WordTooLong(f"rewritten relator exceeds {word_cap} letters")
            if cur != c:
                raise AssertionError("relator does not close in the coset table")
            w = Word(tuple(out))
            if not w.is_identity:
                rels.append(w)
    out_p = Presentation(name or f"ker_{p.name}", tuple(syms), tuple(rels))
    return eliminate_generators(out_p, word_cap) if simplify else out_p


def _gf2_nullspace(rows: list[list[int]], n: int) -> list[list[int]]:
    """Basis of {v in GF(2)^n : row . v = 0 for all rows}."""
    m = [[x & 1 for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                m[i] = [a ^ b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fcol in free:
        v = [0] * n
        v[fcol] = 1
        for i, pc in enumerate(pivots):
            if m[i][fcol]:
                v[pc] = 1
        basis.append(v)
    return basis


@dataclass(frozen=True)
class Index2Scan:
    kernels: tuple[tuple[CosetTable, AbelianInvariants], ...]
    vectors: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def all_finite(self) -> bool:
        return all(inv.finite for _, inv in self.kernels)


def index2_scan(p: Presentation) -> Index2Scan:
    """Every epimorphism onto Z/2, with the kernel's abelian invariants.

    Together with a finite abelianization, ``all_finite`` rules out quotients
    isomorphic to Z or to D-infinity (a D-infinity quotient pulls back to an
    index-2 subgroup mapping onto Z).  The converse is not claimed.
    """
    rows = [r.exponent_sums(p.ngens) for r in p.relators]
    basis = _gf2_nullspace(rows, p.ngens)
    flip = Permutation((1, 0))
    ident = Permutation((0, 1))
    out = []
    vecs = []
    for coeffs in itertools.product((0, 1), repeat=len(basis)):
        if not any(coeffs):
            continue
        v = [0] * p.ngens
        for c, b in zip(coeffs, basis):
            if c:
                v = [x ^ y for x, y in zip(v, b)]
        vecs.append(tuple(v))
    vecs.sort()
    for v in vecs:
        phi = GeneratorAssignment("permutation", {i: flip if v[i] else ident for i in range(p.ngens)}, ident)
        table = kernel_coset_table(p, phi)
        ker = reidemeister_schreier(table)
        out.append((table, abelian_invariants(ker)))
    return Index2Scan(tuple(out), tuple(vecs))


@dataclass(frozen=True)
class FreeQuotientWitness:
    b_prime_order: int
    a1_order: int
    f_image: tuple[str, ...]
    c: str
    d: str
    collapsed: Presentation
    kernel: Presentation
    free_rank: int
    index_chain: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "b_prime_order": self.b_prime_order,
            "a1_order": self.a1_order,
            "f_image": list(self.f_image),
            "c": self.c,
            "d": self.d,
            "collapsed": format_presentation(self.collapsed),
            "free_rank": self.free_rank,
            "index_chain": list(self.index_chain),
            "kernel": format_presentation(self.kernel),
        }


def free_quotient_witness(
    a: Presentation,
    a1: PermGroup,
    b_prime: PermGroup,
    f_image: Sequence,
    c,
    d,
    cap: int = DEFAULT_CAP,
) -> FreeQuotientWitness:
    """Exhibit a finite-index subgroup of the graph product mapping onto a free group.

    ``a1`` is a finite quotient of A (generator i of A maps to
    ``a1.generators[i]``).  Copies of A_1 in M(A_1, B', F) outside {1, c, d}
    are killed; if no commutation relator survives, the result is
    A_1 * A_1 * A_1, and the kernel of its map onto A_1^3 is free of rank
    1 + 2|A_1|^3 - 3|A_1|^2, confirmed by Reidemeister-Schreier.
    """
    if len(a1.generators) != a.ngens:
        raise WitnessError("A_1 needs one image per generator of A")
    if not a1.satisfies(a):
        raise WitnessError("A_1 generator images do not satisfy A's relators")
    n1 = a1.order(cap)
    if n1 < 2:
        raise WitnessError("A_1 is trivial; a non-trivial finite quotient is required")
    elems = enumerate_elements(b_prime, cap)
    index = {e: i for i, e in enumerate(elems)}
    try:
        f = [resolve_element(elems, s) for s in f_image]
        ce = resolve_element(elems, c)
        de = resolve_element(elems, d)
    except ConstructionError as exc:
        raise WitnessError(str(exc)) from exc
    if any(s.is_identity for s in f):
        raise WitnessError("F must not contain the identity")
    bad = {ce, de, ce.inverse() * de} & (set(f) | {b_prime.identity})
    if bad:
        raise WitnessError(
            "{c, d, c^-1 d} meets F u {1}: " + ", ".join(sorted(str(x) for x in bad))
        )

    symbols = list(a.generators)
    a1_pres = a1.cayley_presentation(symbols, name=f"{a.name}_1")
    m = graph_product_presentation(a1_pres, b_prime, f, cap=cap)
    keep_copies = [0, index[ce], index[de]]
    na = a1_pres.ngens
    keep = [ci * na + g for ci in keep_copies for g in range(na)]
    kill = {g: Word() for g in range(m.ngens) if g not in keep}
    mapping = {old: new for new, old in enumerate(keep)}
    base_rels = len(a1_pres.relators)
    rels = []
    for ri, r in enumerate(m.relators):
        s = r.substitute(kill)
        if s.is_identity:
            continue
        if ri >= base_rels * len(elems):
            raise WitnessError(
                f"commutation relator {format_word(r, m.generators)} survives the collapse; "
                "c and d are adjacent to 1 or each other in the commutation graph"
            )
        rels.append(s.relabel(mapping))
    collapsed = Presentation(f"{a.name}_1^*3", tuple(m.generators[g] for g in keep), tuple(rels))

    # A_1 * A_1 * A_1 -> A_1 x A_1 x A_1, coordinates on disjoint blocks
    deg = a1.degree
    imgs = {}
    for slot, _ in enumerate(keep_copies):
        for g, gen in enumerate(a1.generators):
            img = list(range(3 * deg))
            for i in range(deg):
                img[slot * deg + i] = slot * deg + gen(i)
            imgs[slot * na + g] = Permutation(tuple(img))
    phi = GeneratorAssignment("permutation", imgs, Permutation.identity(3 * deg))
    table = kernel_coset_table(collapsed, phi, cap=cap)
    kernel = reidemeister_schreier(table, name="kernel")
    expected = 1 + 2 * n1**3 - 3 * n1**2
    if kernel.relators or kernel.ngens != expected:
        raise AssertionError(
            f"kernel presentation has {kernel.ngens} generators and {len(kernel.relators)} relators; "
            f"expected a free group of rank {expected}"
        )
    return FreeQuotientWitness(
        b_prime_order=len(elems),
        a1_order=n1,
        f_image=tuple(str(s) for s in f),
        c=str(ce),
        d=str(de),
        collapsed=collapsed,
        kernel=kernel,
        free_rank=kernel.ngens,
        index_chain=(len(elems), table.index),
    )
