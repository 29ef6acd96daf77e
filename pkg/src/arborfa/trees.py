"""Finite trees, their isometries, fixed subtrees, and isometries of the line.

Only finite trees are modelled here, so every isometry is elliptic.  Actions
on lines (the infinite dihedral group) are handled by :class:`LineIsometry`.
"""

from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .permgroups import CapExceeded
from .presentations import (
    GeneratorAssignment,
    Presentation,
    Word,
    commutator,
    evaluate_word,
    format_word,
)

__all__ = [
    "Tree",
    "Subtree",
    "TreeIsometry",
    "TreeAction",
    "LineIsometry",
    "IntersectionReport",
    "CommutingLemmaResult",
    "ActionError",
    "RelatorViolation",
    "InversionDetected",
    "LemmaViolation",
    "geodesic",
    "hull",
    "subtree_intersection",
    "fixed_set",
    "check_action",
    "verify_commuting_lemma",
    "classify_line_isometry",
    "line_action_conclusion",
    "parse_tree",
    "format_tree",
    "random_tree",
    "random_connected_subtree",
    "random_commuting_instance",
    "random_helly_instance",
    "run_lemma_suite",
]


@dataclass(frozen=True)
class Tree:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple(sorted((min(u, v), max(u, v)) for u, v in self.edges))
        object.__setattr__(self, "edges", edges)
        if self.n < 1:
            raise ValueError("a tree needs at least one vertex")
        if len(edges) != self.n - 1:
            raise ValueError(f"{self.n} vertices need {self.n - 1} edges, got {len(edges)}")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edge")
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range")
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != self.n:
            raise ValueError("graph is not connected")

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.n):
            raise ValueError(f"invalid vertex {v!r} for a tree on {self.n} vertices")

    def parents_from(self, root: int) -> list[int]:
        """BFS parent array rooted at ``root`` (``root`` is its own parent)."""
        parent = [-1] * self.n
        parent[root] = root
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if parent[v] < 0:
                    parent[v] = u
                    queue.append(v)
        return parent

    def distance(self, u: int, v: int) -> int:
        return len(geodesic(self, u, v)) - 1

    def is_connected_set(self, vertices: Iterable[int]) -> bool:
        vs = set(vertices)
        if not vs:
            return True
        start = next(iter(vs))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in self.adjacency[u]:
                if w in vs and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(vs)


@dataclass(frozen=True)
class Subtree:
    tree: Tree
    vertices: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        if not self.tree.is_connected_set(self.vertices):
            raise ValueError(f"vertex set {sorted(self.vertices)} is not connected")

    @property
    def empty(self) -> bool:
        return not self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self.vertices


def geodesic(t: Tree, u: int, v: int) -> list[int]:
    """The unique simple path from ``u`` to ``v``."""
    t.check_vertex(u)
    t.check_vertex(v)
    parent = t.parents_from(u)
    path = [v]
    while path[-1] != u:
        path.append(parent[path[-1]])
    return path[::-1]


def hull(t: Tree, vertices: Iterable[int]) -> Subtree:
    """Smallest subtree containing ``vertices``."""
    vs = list(vertices)
    if not vs:
        return Subtree(t, frozenset())
    parent = t.parents_from(vs[0])
    out = {vs[0]}
    for v in vs[1:]:
        while v not in out:
            out.add(v)
            v = parent[v]
    return Subtree(t, frozenset(out))


@dataclass(frozen=True)
class IntersectionReport:
    subtree: Subtree
    pairwise_nonempty: bool

    @property
    def helly_violated(self) -> bool:
        return self.pairwise_nonempty and self.subtree.empty


def subtree_intersection(parts: Sequence[Subtree]) -> IntersectionReport:
    if len(parts) < 2:
        raise ValueError("need at least two subtrees")
    t = parts[0].tree
    if any(p.tree != t for p in parts):
        raise ValueError("subtrees live in different trees")
    pairwise = all(parts[i].vertices & parts[j].vertices for i in range(len(parts)) for j in range(i + 1, len(parts)))
    common = frozenset.intersection(*(p.vertices for p in parts))
    return IntersectionReport(Subtree(t, common), pairwise)


@dataclass(frozen=True)
class TreeIsometry:
    tree: Tree
    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(self.mapping)
        object.__setattr__(self, "mapping", m)
        if sorted(m) != list(range(self.tree.n)):
            raise ValueError("vertex map is not a bijection")
        es = self.tree.edge_set
        for u, v in self.tree.edges:
            a, b = m[u], m[v]
            if (min(a, b), max(a, b)) not in es:
                raise ValueError(f"vertex map does not preserve edge ({u}, {v})")

    @classmethod
    def identity(cls, t: Tree) -> "TreeIsometry":
        return cls(t, tuple(range(t.n)))

    @classmethod
    def from_cycles(cls, t: Tree, cycles: Sequence[Sequence[int]]) -> "TreeIsometry":
        m = list(range(t.n))
        for c in cycles:
            for i, x in enumerate(c):
                m[x] = c[(i + 1) % len(c)]
        return cls(t, tuple(m))

    def __call__(self, v: int) -> int:
        return self.mapping[v]

    def __mul__(self, other: "TreeIsometry") -> "TreeIsometry":
        s = self.mapping
        return TreeIsometry(self.tree, tuple(s[j] for j in other.mapping))

    def inverse(self) -> "TreeIsometry":
        inv = [0] * len(self.mapping)
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return TreeIsometry(self.tree, tuple(inv))

    def identity_like(self) -> "TreeIsometry":
        return TreeIsometry.identity(self.tree)

    @property
    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.mapping))

    def fixed_vertices(self) -> frozenset[int]:
        return frozenset(i for i, j in enumerate(self.mapping) if i == j)

    def inverted_edge(self) -> tuple[int, int] | None:
        for u, v in self.tree.edges:
            if self.mapping[u] == v and self.mapping[v] == u:
                return (u, v)
        return None


class ActionError(ValueError):
    pass


class RelatorViolation(ActionError):
    def __init__(self, relator: str):
        super().__init__(f"relator {relator} does not act trivially")
        self.relator = relator


class InversionDetected(ActionError):
    def __init__(self, element: str, edge: tuple[int, int]):
        super().__init__(f"{element} inverts edge {edge}")
        self.element = element
        self.edge = edge


class LemmaViolation(AssertionError):
    """A counterexample to a tree lemma; would mean the engine is wrong."""


@dataclass(frozen=True)
class TreeAction:
    presentation: Presentation
    tree: Tree
    assignment: GeneratorAssignment = field(compare=False)

    def element(self, w: Word) -> TreeIsometry:
        return evaluate_word(w, self.assignment)


_ACTION_CAP = 100_000


def check_action(p: Presentation, t: Tree, phi: GeneratorAssignment, cap: int = _ACTION_CAP) -> TreeAction:
    """Validate that ``phi`` defines an action of ``p`` on ``t`` without inversions.

    Relators must act trivially and no element of the image inverts an edge.
    The image is a subgroup of the (finite) automorphism group of ``t`` and
    is enumerated in full, up to ``cap`` elements.
    """
    if phi.kind != "tree-isometry":
        raise ActionError(f"assignment targets {phi.kind}, not tree-isometry")
    for i in range(p.ngens):
        if i not in phi.images:
            raise ActionError(f"generator {p.generators[i]} has no image")
        if phi.images[i].tree != t:
            raise ActionError(f"image of {p.generators[i]} acts on a different tree")
    for r in p.relators:
        if not evaluate_word(r, phi).is_identity:
            raise RelatorViolation(format_word(r, p.generators))
    gens = [phi.images[i] for i in range(p.ngens)]
    for i, g in enumerate(gens):
        e = g.inverted_edge()
        if e is not None:
            raise InversionDetected(p.generators[i], e)
    one = TreeIsometry.identity(t)
    seen = {one: Word()}
    queue = deque([one])
    while queue:
        x = queue.popleft()
        for i, g in enumerate(gens):
            y = x * g
            if y in seen:
                continue
            w = seen[x] * Word.gen(i)
            e = y.inverted_edge()
            if e is not None:
                raise InversionDetected(format_word(w, p.generators), e)
            seen[y] = w
            if len(seen) > cap:
                raise CapExceeded("check_action", cap, len(seen))
            queue.append(y)
    return TreeAction(p, t, phi)


def fixed_set(act: TreeAction, sub_gens: Sequence[Word]) -> Subtree:
    """Vertices fixed by every listed element."""
    n = act.presentation.ngens
    verts = frozenset(range(act.tree.n))
    for w in sub_gens:
        if any(g >= n for g in w.generators()):
            raise ValueError(f"word {w} uses generators outside the presentation")
        verts &= act.element(w).fixed_vertices()
    return Subtree(act.tree, verts)


@dataclass(frozen=True)
class CommutingLemmaResult:
    witness: int | None
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.witness is not None


def verify_commuting_lemma(act: TreeAction, a_gens: Sequence[Word], b_gens: Sequence[Word]) -> CommutingLemmaResult:
    """Find a vertex fixed by both A and B, or name the failing hypothesis.

    Hypotheses: T^A and T^B nonempty, and every listed a commutes with every
    listed b.  If they hold and no common fixed vertex exists, that is a
    counterexample and :class:`LemmaViolation` is raised.
    """
    for a in a_gens:
        for b in b_gens:
            if not act.element(commutator(a, b)).is_identity:
                p = act.presentation
                return CommutingLemmaResult(
                    None, f"[A,B]=1 fails: [{format_word(a, p.generators)}, {format_word(b, p.generators)}] != 1"
                )
    fa = fixed_set(act, a_gens)
    if fa.empty:
        return CommutingLemmaResult(None, "T^A is empty")
    fb = fixed_set(act, b_gens)
    if fb.empty:
        return CommutingLemmaResult(None, "T^B is empty")
    common = fa.vertices & fb.vertices
    if not common:
        raise LemmaViolation(
            f"commuting subgroups without common fixed vertex: tree={act.tree.edges}, "
            f"T^A={sorted(fa.vertices)}, T^B={sorted(fb.vertices)}"
        )
    return CommutingLemmaResult(min(common))


# the line ------------------------------------------------------------------


@dataclass(frozen=True)
class LineIsometry:
    """The isometry x -> (-1)^flip * x + shift of the integer line.

    Acts on the right: ``g * h`` means g first, then h.  This gives the
    composition law ``(f1, s1) * (f2, s2) = (f1 ^ f2, s2 + (-1)^f2 * s1)``.
    """

    flip: bool = False
    shift: int = 0

    def __call__(self, x):
        return (-x if self.flip else x) + self.shift

    def __mul__(self, other: "LineIsometry") -> "LineIsometry":
        s1 = -self.shift if other.flip else self.shift
        return LineIsometry(self.flip != other.flip, other.shift + s1)

    def inverse(self) -> "LineIsometry":
        return LineIsometry(self.flip, self.shift if self.flip else -self.shift)

    def identity_like(self) -> "LineIsometry":
        return LineIsometry()

    @property
    def is_identity(self) -> bool:
        return not self.flip and self.shift == 0


@dataclass(frozen=True)
class LineClass:
    kind: str  # "translation" or "reflection"
    value: float | int

    @property
    def translation_length(self) -> int:
        return abs(self.value) if self.kind == "translation" else 0


def classify_line_isometry(g: LineIsometry) -> LineClass:
    """Translation by ``shift``, or reflection about the half-integer ``shift / 2``."""
    if g.flip:
        return LineClass("reflection", g.shift / 2)
    return LineClass("translation", g.shift)


def line_action_conclusion(w_gens: Sequence[LineIsometry]) -> str:
    """Is the generated action on the line by nontrivial translations?"""
    if any(g.flip for g in w_gens):
        return "contains-flip"
    if any(g.shift for g in w_gens):
        return "translations-nontrivial"
    return "translations-trivial"


# text format -----------------------------------------------------------------


def parse_tree(text: str) -> Tree:
    """First line: vertex count; then one ``u v`` edge per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty tree text")
    n = int(lines[0])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Tree(n, tuple(edges))


def format_tree(t: Tree) -> str:
    return "\n".join([str(t.n)] + [f"{u} {v}" for u, v in t.edges]) + "\n"


# random instances --------------------------------------------------------------


def random_tree(rng: random.Random, n: int) -> Tree:
    """Uniform random labelled tree on ``n`` vertices via a Pruefer sequence."""
    if n == 1:
        return Tree(1, ())
    if n == 2:
        return Tree(2, ((0, 1),))
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return Tree(n, tuple(edges))


def random_connected_subtree(rng: random.Random, t: Tree, must_contain: Sequence[int] = (), extra: int = 2) -> Subtree:
    """Hull of ``must_contain`` plus a few random vertices."""
    pts = list(must_contain) + [rng.randrange(t.n) for _ in range(rng.randint(0, extra))]
    if not pts:
        pts = [rng.randrange(t.n)]
    return hull(t, pts)


def _graft(edges: list[tuple[int, int]], n: int, at: int, shape: Tree) -> tuple[int, list[int]]:
    """Attach a copy of ``shape`` (rooted at its vertex 0) below vertex ``at``."""
    offset = n
    for u, v in shape.edges:
        edges.append((u + offset, v + offset))
    edges.append((at, offset))
    return n + shape.n, [offset + i for i in range(shape.n)]


def _block_permutation(n: int, copies: list[list[int]], perm: Sequence[int]) -> tuple[int, ...]:
    m = list(range(n))
    for i, src in enumerate(copies):
        dst = copies[perm[i]]
        for x, y in zip(src, dst):
            m[x] = y
    return tuple(m)


def random_commuting_instance(rng: random.Random, max_vertices: int = 64):
    """A random tree with commuting finite groups A and B acting on it.

    A permutes identical branches hung at one vertex and B permutes a
    disjoint block of identical branches (at the same or another vertex), so
    the supports are disjoint.  Returns ``(action, a_gens, b_gens)``.
    """
    while True:
        base_n = rng.randint(1, max(1, max_vertices // 3))
        base = random_tree(rng, base_n)
        sa, sb = rng.randint(1, 4), rng.randint(1, 4)
        ka, kb = rng.randint(2, 3), rng.randint(2, 3)
        if base_n + ka * sa + kb * sb <= max_vertices:
            break
    edges = list(base.edges)
    n = base_n
    va, vb = rng.randrange(base_n), rng.randrange(base_n)
    shape_a, shape_b = random_tree(rng, sa), random_tree(rng, sb)
    copies_a, copies_b = [], []
    for _ in range(ka):
        n, c = _graft(edges, n, va, shape_a)
        copies_a.append(c)
    for _ in range(kb):
        n, c = _graft(edges, n, vb, shape_b)
        copies_b.append(c)

    relabel = list(range(n))
    rng.shuffle(relabel)
    t = Tree(n, tuple((relabel[u], relabel[v]) for u, v in edges))

    def iso(copies, perm):
        raw = _block_permutation(n, copies, perm)
        m = [0] * n
        for x in range(n):
            m[relabel[x]] = relabel[raw[x]]
        return TreeIsometry(t, tuple(m))

    def gens_for(k):
        cyc = list(range(1, k)) + [0]
        out = [cyc]
        if k == 3 and rng.random() < 0.5:
            out.append([1, 0, 2])
        return out

    a_isos = [iso(copies_a, perm) for perm in gens_for(ka)]
    b_isos = [iso(copies_b, perm) for perm in gens_for(kb)]
    names = [f"a{i}" for i in range(len(a_isos))] + [f"b{j}" for j in range(len(b_isos))]
    na = len(a_isos)
    rels = tuple(commutator(Word.gen(i), Word.gen(na + j)) for i in range(na) for j in range(len(b_isos)))
    p = Presentation("AxB", tuple(names), rels)
    phi = GeneratorAssignment("tree-isometry", dict(enumerate(a_isos + b_isos)), TreeIsometry.identity(t))
    act = check_action(p, t, phi)
    a_words = [Word.gen(i) for i in range(na)]
    b_words = [Word.gen(na + j) for j in range(len(b_isos))]
    return act, a_words, b_words


def random_helly_instance(rng: random.Random, max_vertices: int = 200) -> tuple[Tree, list[Subtree]]:
    """Three pairwise-intersecting subtrees of a random tree.

    Subtree i is the hull of points p_i, p_{i+1} plus random extras, so
    consecutive pairs share a point by construction.
    """
    t = random_tree(rng, rng.randint(1, max_vertices))
    pts = [rng.randrange(t.n) for _ in range(3)]
    parts = [random_connected_subtree(rng, t, [pts[i], pts[(i + 1) % 3]], extra=3) for i in range(3)]
    return t, parts


def run_lemma_suite(seed: int, cases: int, helly_vertices: int = 200, commuting_vertices: int = 64) -> dict:
    """Seeded Helly and commuting-fixed-set checks; counts violations."""
    rng = random.Random(seed)
    helly = 0
    for _ in range(cases):
        _, parts = random_helly_instance(rng, helly_vertices)
        rep = subtree_intersection(parts)
        if not rep.pairwise_nonempty or rep.helly_violated:
            helly += 1
    commuting = 0
    for _ in range(cases):
        act, a_words, b_words = random_commuting_instance(rng, commuting_vertices)
        try:
            res = verify_commuting_lemma(act, a_words, b_words)
        except LemmaViolation:
            commuting += 1
            continue
        if res.witness is None:
            commuting += 1
    return {"helly_violations": helly, "commuting_violations": commuting}
