"""Independent brute-force oracles used to derive expected values."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd


def det(m: list[list[int]]) -> int:
    """Exact determinant by fraction-valued Gaussian elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    sign, out = 1, Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        out *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            for k in range(c, n):
                a[r][k] -= f * a[c][k]
    v = sign * out
    assert v.denominator == 1
    return int(v)


def minors_invariant_factors(m: list[list[int]]) -> list[int]:
    """d_k = gcd(k-minors) / gcd((k-1)-minors), for every k with a nonzero k-minor."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    prev, out = 1, []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, det([[m[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def brute_orbits(points: int, perms) -> list[set[int]]:
    seen, out = set(), []
    for p in range(points):
        if p in seen:
            continue
        orb, stack = {p}, [p]
        while stack:
            x = stack.pop()
            for g in perms:
                for y in (g(x), g.inverse()(x)):
                    if y not in orb:
                        orb.add(y)
                        stack.append(y)
        seen |= orb
        out.append(orb)
    return out
