"""Smith normal form over the integers and abelian invariants of presentations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .presentations import Presentation

__all__ = [
    "IntMatrix",
    "SmithForm",
    "AbelianInvariants",
    "smith_normal_form",
    "relation_matrix",
    "abelian_invariants",
    "hom_to_z_rank",
    "wreath_abelianization",
    "invariants_from_relations",
]


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries count must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(map(int, r)) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]


@dataclass(frozen=True)
class SmithForm:
    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def _snf_diagonal(a: list[list[int]]) -> list[int]:
    """Diagonalize in place and return the nonzero diagonal (not yet chained)."""
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < m and t < n:
        # smallest nonzero |entry| in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, pi, pj = best
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    ri, rt = a[i], a[t]
                    for j in range(t, n):
                        ri[j] -= q * rt[j]
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for i in range(t, m):
                        a[i][j] -= q * a[i][t]
                if a[t][j]:
                    dirty = True
            if not dirty:
                # pivot must divide the remaining block
                bad = next(
                    ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                i = bad[0]
                rt, ri = a[t], a[i]
                for j in range(t, n):
                    rt[j] += ri[j]
                continue
            # a smaller remainder appeared: move it into the pivot position
            best = None
            for i in range(t, m):
                v = a[i][t]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, t)
            for j in range(t, n):
                v = a[t][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), t, j)
            _, pi, pj = best
            if pi != t:
                a[t], a[pi] = a[pi], a[t]
            if pj != t:
                for row in a:
                    row[t], row[pj] = row[pj], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def smith_normal_form(m: IntMatrix | Sequence[Sequence[int]]) -> SmithForm:
    """Invariant factors d1 | d2 | ... (nonzero ones only) of an integer matrix."""
    if not isinstance(m, IntMatrix):
        m = IntMatrix.from_rows(m)
    rows = m.to_rows()
    if m.rows == 0 or m.cols == 0:
        return SmithForm(())
    diag = _snf_diagonal(rows)
    return SmithForm(tuple(diag))


@dataclass(frozen=True)
class AbelianInvariants:
    """Z^free_rank x Z/t1 x ... x Z/tk with t1 | t2 | ... and every ti >= 2."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for t in self.torsion:
            if t < 2:
                raise ValueError("torsion factors must be >= 2")
        for s, t in zip(self.torsion, self.torsion[1:]):
            if t % s:
                raise ValueError(f"torsion {self.torsion} is not a divisibility chain")

    @property
    def finite(self) -> bool:
        return self.free_rank == 0

    @property
    def hom_to_z_rank(self) -> int:
        return self.free_rank

    @property
    def order(self) -> int | None:
        if not self.finite:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    @property
    def trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def invariants_from_relations(ngens: int, rows: Sequence[Sequence[int]]) -> AbelianInvariants:
    """Abelian group Z^ngens modulo the row lattice."""
    snf = smith_normal_form(IntMatrix.from_rows(rows, ngens)) if rows else SmithForm(())
    return AbelianInvariants(ngens - snf.rank, tuple(d for d in snf.invariant_factors if d > 1))


def relation_matrix(p: Presentation) -> IntMatrix:
    return IntMatrix.from_rows([r.exponent_sums(p.ngens) for r in p.relators], p.ngens)


def abelian_invariants(p: Presentation) -> AbelianInvariants:
    return invariants_from_relations(p.ngens, [r.exponent_sums(p.ngens) for r in p.relators])


def hom_to_z_rank(p: Presentation) -> int:
    """Rank of Hom(G, Z); zero exactly when the abelianization is finite."""
    return abelian_invariants(p).free_rank


def wreath_abelianization(a_inv: AbelianInvariants, b_inv: AbelianInvariants, orbit_count: int) -> AbelianInvariants:
    """Abelianization of A wr_X B given A^ab, B^ab and the number of B-orbits on X.

    Valid only when no orbit is a single point; that is the caller's to check.
    """
    if orbit_count < 1:
        raise ValueError("orbit_count must be at least 1")
    free = orbit_count * a_inv.free_rank + b_inv.free_rank
    diag = list(a_inv.torsion) * orbit_count + list(b_inv.torsion)
    rows = [[d if i == j else 0 for j in range(len(diag))] for i, d in enumerate(diag)]
    torsion = invariants_from_relations(len(diag), rows).torsion if diag else ()
    return AbelianInvariants(free, torsion)
