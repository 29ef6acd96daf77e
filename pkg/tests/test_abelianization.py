import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import minors_invariant_factors

from arborfa.abelianization import (
    AbelianInvariants,
    IntMatrix,
    abelian_invariants,
    hom_to_z_rank,
    smith_normal_form,
    wreath_abelianization,
)
from arborfa.presentations import Presentation, parse_presentation

matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-10, 10), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def test_oracle_frozen_values():
    # outputs of the gcd-of-minors oracle
    assert minors_invariant_factors([[2, 0], [0, 3]]) == [1, 6]
    assert minors_invariant_factors([[1, 0], [0, 1]]) == [1, 1]
    assert minors_invariant_factors([[0] * 3] * 3) == []
    assert minors_invariant_factors([[2, 0], [0, 3], [0, 0]]) == [1, 6]


def test_snf_examples():
    sf = smith_normal_form([[2, 0], [0, 3]])
    assert sf.invariant_factors == (1, 6) and sf.rank == 2
    assert smith_normal_form([[1, 0], [0, 1]]).invariant_factors == (1, 1)
    zero = smith_normal_form([[0] * 3] * 3)
    assert zero.invariant_factors == () and zero.rank == 0
    assert smith_normal_form(IntMatrix(0, 0, ())).invariant_factors == ()


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_snf_matches_minors_oracle(rows):
    sf = smith_normal_form(rows)
    assert list(sf.invariant_factors) == minors_invariant_factors(rows)
    f = sf.invariant_factors
    assert all(b % a == 0 for a, b in zip(f, f[1:]))


def test_snf_product_is_det():
    from oracles import det

    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(1, 4)
        m = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
        d = det(m)
        if d == 0:
            continue
        prod = 1
        for x in smith_normal_form(m).invariant_factors:
            prod *= x
        assert prod == abs(d)


def test_big_entries_no_overflow():
    m = [[10**30, 3], [7, 10**25]]
    assert list(smith_normal_form(m).invariant_factors) == minors_invariant_factors(m)


def test_abelian_invariants_examples():
    assert abelian_invariants(parse_presentation("group A { gens: a; rels: a^2; }")).to_json() == {"free_rank": 0, "torsion": [2]}
    f2 = parse_presentation("group F { gens: a, b; }")
    assert abelian_invariants(f2) == AbelianInvariants(2, ())
    p = parse_presentation("group C { gens: a, b; rels: a^2, b^3, [a,b]; }")
    assert abelian_invariants(p) == AbelianInvariants(0, (6,))


def test_hom_to_z_rank_examples():
    assert hom_to_z_rank(parse_presentation("group A { gens: a; rels: a^2; }")) == 0
    assert hom_to_z_rank(parse_presentation("group F { gens: a, b; }")) == 2
    assert hom_to_z_rank(parse_presentation("group E { gens: a, b; rels: a^2 b^-4; }")) == 1
    assert abelian_invariants(parse_presentation("group E { gens: a, b; rels: a^2 b^-4; }")).torsion == (2,)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=8), min_size=1, max_size=4), st.randoms())
def test_invariance_under_reorder_and_conjugation(rels, rnd):
    from arborfa.presentations import Word

    words = [Word.from_signed(r) for r in rels]
    words = [w for w in words if not w.is_identity]
    p = Presentation("G", ("a", "b"), tuple(words))
    shuffled = list(words)
    rnd.shuffle(shuffled)
    conj = Word.gen(1) * Word.gen(0, -2)
    conjugated = [conj * w * conj.inverse() for w in shuffled]
    q = Presentation("G", ("a", "b"), tuple(shuffled))
    r = Presentation("G", ("a", "b"), tuple(conjugated))
    inv = abelian_invariants(p)
    assert abelian_invariants(q) == inv == abelian_invariants(r)
    assert (hom_to_z_rank(p) == 0) == inv.finite


def test_invariants_validation():
    with pytest.raises(ValueError):
        AbelianInvariants(0, (1,))
    with pytest.raises(ValueError):
        AbelianInvariants(0, (2, 3))


def test_wreath_abelianization_examples():
    z2, z3 = AbelianInvariants(0, (2,)), AbelianInvariants(0, (3,))
    assert wreath_abelianization(z2, z3, 1).torsion == (6,)
    assert wreath_abelianization(AbelianInvariants(0, ()), z3, 4) == z3
    assert wreath_abelianization(z2, z2, 2).torsion == (2, 2, 2)
    assert wreath_abelianization(AbelianInvariants(1, ()), z2, 2) == AbelianInvariants(2, (2,))
    with pytest.raises(ValueError):
        wreath_abelianization(z2, z3, 0)
