"""Capped HLT coset enumeration.

Used only to certify finiteness of small presentations and to read off
their regular permutation representations; anything that does not close
within ``max_cosets`` raises :class:`CapExceeded`.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

from .permgroups import CapExceeded, Permutation, PermGroup
from .presentations import Presentation, Word

__all__ = ["enumerate_cosets", "group_order", "regular_representation"]


class _Table:
    def __init__(self, ngens: int, max_cosets: int):
        self.ncols = 2 * ngens
        self.rows: list[list[int | None]] = [[None] * self.ncols]
        self.parent = [0]
        self.max_cosets = max_cosets
        self.queue: deque[tuple[int, int]] = deque()

    @staticmethod
    def inv(x: int) -> int:
        return x ^ 1

    def find(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def alive(self, c: int) -> bool:
        return self.parent[c] == c

    def define(self, c: int, x: int) -> None:
        if len(self.rows) >= self.max_cosets:
            live = sum(1 for i in range(len(self.rows)) if self.alive(i))
            raise CapExceeded("coset enumeration", self.max_cosets, live)
        n = len(self.rows)
        self.rows.append([None] * self.ncols)
        self.parent.append(n)
        self.rows[c][x] = n
        self.rows[n][self.inv(x)] = c

    def merge(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.parent[b] = a
        self.queue.append((b, a))

    def coincidence(self, a: int, b: int) -> None:
        self.merge(a, b)
        while self.queue:
            dead, _ = self.queue.popleft()
            row = self.rows[dead]
            for x in range(self.ncols):
                d = row[x]
                if d is None:
                    continue
                # unhook the back pointer from d
                if self.rows[d][self.inv(x)] == dead:
                    self.rows[d][self.inv(x)] = None
                c1 = self.find(dead)
                d1 = self.find(d)
                if self.rows[c1][x] is not None:
                    self.merge(d1, self.rows[c1][x])
                elif self.rows[d1][self.inv(x)] is not None:
                    self.merge(c1, self.rows[d1][self.inv(x)])
                else:
                    self.rows[c1][x] = d1
                    self.rows[d1][self.inv(x)] = c1

    def scan_and_fill(self, c: int, word: Sequence[int]) -> None:
        f = b = c
        i, j = 0, len(word) - 1
        rows = self.rows
        while True:
            while i <= j and rows[f][word[i]] is not None:
                f = rows[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and rows[b][self.inv(word[j])] is not None:
                b = rows[b][self.inv(word[j])]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                rows[f][word[i]] = b
                rows[b][self.inv(word[i])] = f
                return
            self.define(f, word[i])


def _columns(w: Word) -> list[int]:
    return [2 * g + (0 if s > 0 else 1) for g, s in w.expanded()]


def enumerate_cosets(
    p: Presentation,
    subgroup: Sequence[Word] = (),
    max_cosets: int = 200_000,
) -> list[Permutation]:
    """Permutation action of each generator on the cosets of ``<subgroup>``.

    Cosets are renumbered by BFS from the subgroup's coset (point 0).
    Generator ``g`` sends coset ``Hw`` to ``Hwg^-1``, so that evaluating
    words by function composition is a homomorphism.
    """
    t = _Table(p.ngens, max_cosets)
    rels = [_columns(r) for r in p.relators]
    for w in subgroup:
        t.scan_and_fill(0, _columns(w))
    c = 0
    while c < len(t.rows):
        if t.alive(c):
            for r in rels:
                t.scan_and_fill(c, r)
                if not t.alive(c):
                    break
            if t.alive(c):
                for x in range(t.ncols):
                    if t.rows[c][x] is None:
                        t.define(c, x)
        c += 1

    order: dict[int, int] = {0: 0}
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for x in range(t.ncols):
            b = t.find(t.rows[a][x])
            if b not in order:
                order[b] = len(order)
                queue.append(b)
    n = len(order)
    perms = []
    for g in range(p.ngens):
        img = [0] * n
        for a, i in order.items():
            img[i] = order[t.find(t.rows[a][2 * g + 1])]
        perms.append(Permutation(tuple(img)))
    return perms


def group_order(p: Presentation, max_cosets: int = 200_000) -> int:
    if p.ngens == 0:
        return 1
    return enumerate_cosets(p, (), max_cosets)[0].degree


def regular_representation(p: Presentation, max_cosets: int = 200_000) -> PermGroup:
    """The group of ``p`` acting on itself, generators in presentation order."""
    if p.ngens == 0:
        return PermGroup(1, (), p.name)
    perms = enumerate_cosets(p, (), max_cosets)
    return PermGroup(perms[0].degree, tuple(perms), p.name)
