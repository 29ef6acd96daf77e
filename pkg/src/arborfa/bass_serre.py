"""Amalgams H *_K L of finite groups and balls in their Bass-Serre trees.

Vertices of the tree are cosets gH and gL; the edge gK joins gH to gL.  A
vertex is labelled by the normal form of a coset representative with the
trailing syllable of its own type removed, so the base vertex 1*H is
``("H", ())``.  Syllables are ``(factor, index)`` where ``index`` is the
position of a left coset representative of K in the factor's element
enumeration.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .permgroups import DEFAULT_CAP, Permutation, PermGroup, enumerate_elements
from .presentations import Word, parse_word
from .trees import Tree

__all__ = [
    "Amalgam",
    "AmalgamNormalForm",
    "BSTreeBall",
    "NotNontrivialAmalgam",
    "NoAxis",
    "normal_form",
    "ball",
    "translation_length",
    "translation_length_bruteforce",
    "axis_segment",
    "is_degenerate",
]

Vertex = tuple[str, tuple[tuple[str, int], ...]]


class NotNontrivialAmalgam(ValueError):
    pass


class NoAxis(ValueError):
    pass


class _Factor:
    """A finite factor with K embedded: coset reps and the h = r*k split."""

    def __init__(self, name: str, g: PermGroup, k_elems: list[Permutation], embed: dict[Permutation, Permutation], cap: int):
        self.name = name
        self.group = g
        self.elements = enumerate_elements(g, cap)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.k_of = {v: k for k, v in embed.items()}  # image in this factor -> K element
        self.embed = embed
        image = [embed[k] for k in k_elems]
        self.split: dict[Permutation, tuple[int, Permutation]] = {}
        self.reps: list[int] = []
        for e in self.elements:
            if e in self.split:
                continue
            r = self.index[e]
            self.reps.append(r)
            for h in image:
                self.split[e * h] = (r, h)
        self.identity_rep = self.index[g.identity]

    @property
    def coset_count(self) -> int:
        return len(self.reps)

    def decompose(self, h: Permutation) -> tuple[int, Permutation]:
        """h = rep * k with ``rep`` an element index and k in K (as a K element)."""
        r, kh = self.split[h]
        return r, self.k_of[kh]


def _embedding(k: PermGroup, images: Sequence[Permutation], target: PermGroup, cap: int) -> dict[Permutation, Permutation]:
    if len(images) != len(k.generators):
        raise ValueError("embedding needs one image per generator of K")
    one_k, one_t = k.identity, target.identity
    for im in images:
        if im.degree != target.degree:
            raise ValueError("embedding image has the wrong degree")
    targets = set(enumerate_elements(target, cap))
    mapping = {one_k: one_t}
    queue = deque([one_k])
    while queue:
        x = queue.popleft()
        for g, im in zip(k.generators, images):
            y, iy = x * g, mapping[x] * im
            if y in mapping:
                if mapping[y] != iy:
                    raise ValueError("K generator images do not define a homomorphism")
            else:
                mapping[y] = iy
                queue.append(y)
    if len(set(mapping.values())) != len(mapping):
        raise ValueError("K does not embed injectively")
    if not set(mapping.values()) <= targets:
        raise ValueError("embedding images lie outside the factor")
    return mapping


@dataclass(frozen=True)
class AmalgamNormalForm:
    """``s1 s2 ... sn k``: alternating nontrivial coset reps, then a K element."""

    syllables: tuple[tuple[str, int], ...]
    tail: Permutation

    @property
    def prefix_type(self) -> str | None:
        if not self.syllables:
            return None
        return "h-first" if self.syllables[0][0] == "H" else "l-first"

    def __len__(self) -> int:
        return len(self.syllables)


class Amalgam:
    """H *_K L for finite permutation groups H, K, L.

    Words over the amalgam use H's generators first, then L's.
    """

    def __init__(
        self,
        h: PermGroup,
        l: PermGroup,
        k: PermGroup,
        k_into_h: Sequence[Permutation],
        k_into_l: Sequence[Permutation],
        h_symbols: Sequence[str] | None = None,
        l_symbols: Sequence[str] | None = None,
        cap: int = DEFAULT_CAP,
    ):
        self.h, self.l, self.k = h, l, k
        self.k_into_h = tuple(k_into_h)
        self.k_into_l = tuple(k_into_l)
        self.cap = cap
        k_elems = enumerate_elements(k, cap)
        self.H = _Factor("H", h, k_elems, _embedding(k, k_into_h, h, cap), cap)
        self.L = _Factor("L", l, k_elems, _embedding(k, k_into_l, l, cap), cap)
        if self.H.coset_count < 2 and self.L.coset_count < 2:
            raise NotNontrivialAmalgam("K must be proper in H or in L")
        self.k_identity = k.identity
        self.h_symbols = tuple(h_symbols or [f"h{i}" for i in range(len(h.generators))])
        self.l_symbols = tuple(l_symbols or [f"l{i}" for i in range(len(l.generators))])
        if len(self.h_symbols) != len(h.generators) or len(self.l_symbols) != len(l.generators):
            raise ValueError("one symbol per generator required")

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.h_symbols + self.l_symbols

    def word(self, text: str) -> Word:
        return parse_word(text, self.symbols)

    def factor(self, name: str) -> _Factor:
        return self.H if name == "H" else self.L

    @property
    def index_h(self) -> int:
        return self.H.coset_count

    @property
    def index_l(self) -> int:
        return self.L.coset_count

    # element arithmetic ----------------------------------------------------

    def letters(self, w: Word) -> list[tuple[str, Permutation]]:
        nh = len(self.h.generators)
        out = []
        for g, e in w.letters:
            if g < nh:
                x = self.h.generators[g] ** e
                out.append(("H", x))
            else:
                x = self.l.generators[g - nh] ** e
                out.append(("L", x))
        return out

    def multiply(self, nf: AmalgamNormalForm, factor: str, x: Permutation) -> AmalgamNormalForm:
        """Normal form of ``nf * x`` for x in one factor."""
        fac = self.factor(factor)
        syl = list(nf.syllables)
        y = fac.embed[nf.tail] * x
        if syl and syl[-1][0] == factor:
            y = fac.elements[syl.pop()[1]] * y
        r, k = fac.decompose(y)
        if r != fac.identity_rep:
            syl.append((factor, r))
        return AmalgamNormalForm(tuple(syl), k)

    def identity_nf(self) -> AmalgamNormalForm:
        return AmalgamNormalForm((), self.k_identity)

    def nf_times(self, a: AmalgamNormalForm, b: AmalgamNormalForm) -> AmalgamNormalForm:
        out = a
        for fac, r in b.syllables:
            out = self.multiply(out, fac, self.factor(fac).elements[r])
        return self.multiply(out, "H", self.H.embed[b.tail])

    def syllable_elements(self, syllables) -> list[tuple[str, Permutation]]:
        return [(f, self.factor(f).elements[r]) for f, r in syllables]

    # tree geometry -----------------------------------------------------------

    def neighbours(self, v: Vertex) -> list[Vertex]:
        typ, s = v
        other = "L" if typ == "H" else "H"
        fac = self.factor(typ)
        out: list[Vertex] = []
        if s and s[-1][0] == other:
            out.append((other, s[:-1]))
        else:
            out.append((other, s))
        for r in fac.reps:
            if r != fac.identity_rep:
                out.append((other, s + ((typ, r),)))
        return out

    def parent(self, v: Vertex) -> Vertex | None:
        typ, s = v
        if typ == "H":
            if not s:
                return None
            return ("L", s[:-1])
        if s:
            return ("H", s[:-1])
        return ("H", ())

    def path_from_base(self, v: Vertex) -> list[Vertex]:
        out = [v]
        while True:
            p = self.parent(out[-1])
            if p is None:
                return out[::-1]
            out.append(p)

    def distance(self, u: Vertex, v: Vertex) -> int:
        pu, pv = self.path_from_base(u), self.path_from_base(v)
        c = 0
        while c < len(pu) and c < len(pv) and pu[c] == pv[c]:
            c += 1
        return len(pu) + len(pv) - 2 * c

    def geodesic(self, u: Vertex, v: Vertex) -> list[Vertex]:
        pu, pv = self.path_from_base(u), self.path_from_base(v)
        c = 0
        while c < len(pu) and c < len(pv) and pu[c] == pv[c]:
            c += 1
        return pu[c - 1:][::-1] + pv[c:]

    def act(self, w: Word | AmalgamNormalForm, v: Vertex) -> Vertex:
        """Image of vertex ``v`` under the element ``w``."""
        nf = w if isinstance(w, AmalgamNormalForm) else normal_form(self, w)
        typ, s = v
        for fac, x in self.syllable_elements(s):
            nf = self.multiply(nf, fac, x)
        syl = nf.syllables
        if syl and syl[-1][0] == typ:
            syl = syl[:-1]
        return (typ, syl)

    def label(self, v: Vertex) -> str:
        typ, s = v
        body = " ".join(f"{f.lower()}{r}" for f, r in s)
        return f"{typ}[{body}]"


def normal_form(a: Amalgam, w: Word) -> AmalgamNormalForm:
    nf = a.identity_nf()
    for fac, x in a.letters(w):
        nf = a.multiply(nf, fac, x)
    return nf


BASE: Vertex = ("H", ())


@dataclass(frozen=True)
class BSTreeBall:
    radius: int
    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[int, int], ...]
    labels: tuple[str, ...] = field(default=())
    depth: tuple[int, ...] = field(default=())

    def degree(self, i: int) -> int:
        return sum(1 for e in self.edges if i in e)

    def interior(self) -> list[int]:
        return [i for i, d in enumerate(self.depth) if d < self.radius]

    def to_tree(self) -> Tree:
        return Tree(len(self.vertices), self.edges)

    def sidecar(self) -> str:
        return "".join(f"{i} {lab}\n" for i, lab in enumerate(self.labels))

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "vertices": [{"type": v[0], "label": lab, "depth": d} for v, lab, d in zip(self.vertices, self.labels, self.depth)],
            "edges": [list(e) for e in self.edges],
        }


def ball(a: Amalgam, r: int, centre: Vertex = BASE) -> BSTreeBall:
    """All vertices within distance ``r`` of ``centre`` (BFS order)."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    index = {centre: 0}
    verts = [centre]
    depth = [0]
    edges = []
    queue = deque([centre])
    while queue:
        v = queue.popleft()
        d = depth[index[v]]
        if d == r:
            continue
        for u in a.neighbours(v):
            if u not in index:
                index[u] = len(verts)
                verts.append(u)
                depth.append(d + 1)
                edges.append((index[v], index[u]))
                queue.append(u)
    return BSTreeBall(r, tuple(verts), tuple(edges), tuple(a.label(v) for v in verts), tuple(depth))


def _displacements_on(a: Amalgam, nf: AmalgamNormalForm, verts) -> list[tuple[int, Vertex]]:
    return [(a.distance(v, a.act(nf, v)), v) for v in verts]


def translation_length(a: Amalgam, w: Word) -> int:
    """min over vertices v of d(v, w.v).

    The segment [x, w.x] meets the minimal set of w for any vertex x, so
    it suffices to search the geodesic from the base vertex to its image.
    """
    nf = normal_form(a, w)
    path = a.geodesic(BASE, a.act(nf, BASE))
    return min(d for d, _ in _displacements_on(a, nf, path))


def translation_length_bruteforce(a: Amalgam, w: Word) -> int:
    """Same quantity, minimised over the whole ball of radius = syllable length."""
    nf = normal_form(a, w)
    b = ball(a, max(len(nf), 1))
    return min(d for d, _ in _displacements_on(a, nf, b.vertices))


def axis_segment(a: Amalgam, w: Word, r: int) -> list[Vertex]:
    """Vertices of ball(r) on the axis of hyperbolic ``w``, in path order.

    The path is oriented so that ``w`` translates towards the end of the list.
    """
    nf = normal_form(a, w)
    length = translation_length(a, w)
    if length == 0:
        raise NoAxis("element is elliptic and has no axis")
    b = ball(a, r)
    on_axis = [v for d, v in _displacements_on(a, nf, b.vertices) if d == length]
    if not on_axis:
        return []
    axis = set(on_axis)
    nbrs = {v: [u for u in a.neighbours(v) if u in axis] for v in on_axis}
    ends = [v for v in on_axis if len(nbrs[v]) <= 1]
    start = min(ends, key=a.label)
    path = [start]
    prev = None
    while True:
        nxt = [u for u in nbrs[path[-1]] if u != prev]
        if not nxt:
            break
        prev = path[-1]
        path.append(nxt[0])
    pos = {v: i for i, v in enumerate(path)}
    for i, v in enumerate(path):
        img = a.act(nf, v)
        if img in pos:
            if pos[img] < i:
                path.reverse()
            break
    return path


def is_degenerate(a: Amalgam) -> bool:
    """True iff K has index two in both factors (then the amalgam maps onto D-infinity)."""
    if a.index_h == 1 or a.index_l == 1:
        raise NotNontrivialAmalgam(f"indices [H:K]={a.index_h}, [L:K]={a.index_l}: not a nontrivial amalgam")
    return a.index_h == 2 and a.index_l == 2
