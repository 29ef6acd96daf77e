import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arborfa.bass_serre import (
    BASE,
    Amalgam,
    NoAxis,
    NotNontrivialAmalgam,
    axis_segment,
    ball,
    is_degenerate,
    normal_form,
    translation_length,
    translation_length_bruteforce,
)
from arborfa.permgroups import cyclic_group, symmetric_group, trivial_group
from arborfa.presentations import Word


@pytest.fixture(scope="module")
def dinf():
    z2 = cyclic_group(2)
    return Amalgam(z2, z2, trivial_group(), [], [], ["a"], ["b"])


@pytest.fixture(scope="module")
def z4_z6():
    z4, z6 = cyclic_group(4), cyclic_group(6)
    return Amalgam(z4, z6, cyclic_group(2), [z4.generators[0] ** 2], [z6.generators[0] ** 3], ["x"], ["y"])


@pytest.fixture(scope="module")
def s3_s3():
    # S3 *_{Z/2} S3, indices 3 and 3
    s3 = symmetric_group(3)
    return Amalgam(s3, s3, cyclic_group(2), [s3.generators[0]], [s3.generators[0]], ["p", "q"], ["r", "s"])


def random_word(rng, ngens, length):
    return Word(tuple((rng.randrange(ngens), rng.choice([1, -1, 2])) for _ in range(length)))


def test_normal_form_examples(dinf):
    assert len(normal_form(dinf, dinf.word("a b a b"))) == 4
    assert len(normal_form(dinf, dinf.word("a a"))) == 0
    assert len(normal_form(dinf, dinf.word("a"))) == 1


def test_normal_form_length_zero_iff_in_k(z4_z6):
    assert len(normal_form(z4_z6, z4_z6.word("x^2"))) == 0
    assert len(normal_form(z4_z6, z4_z6.word("y^3"))) == 0
    assert len(normal_form(z4_z6, z4_z6.word("x^2 y^3"))) == 0
    assert len(normal_form(z4_z6, z4_z6.word("x y"))) == 2


@pytest.mark.parametrize("fixture", ["dinf", "z4_z6", "s3_s3"])
def test_normal_form_is_homomorphic_section(fixture, request):
    am = request.getfixturevalue(fixture)
    rng = random.Random(5)
    n = len(am.symbols)
    for _ in range(150):
        u, v = random_word(rng, n, rng.randint(0, 6)), random_word(rng, n, rng.randint(0, 6))
        assert normal_form(am, u * v) == am.nf_times(normal_form(am, u), normal_form(am, v))


def test_ball_dinf(dinf):
    for r in range(11):
        b = ball(dinf, r)
        assert len(b.vertices) == 2 * r + 1
        assert all(b.degree(i) <= 2 for i in range(len(b.vertices)))
    b = ball(dinf, 0)
    assert len(b.vertices) == 1 and b.edges == ()


def test_ball_degrees(z4_z6):
    b = ball(z4_z6, 2)
    assert {(b.labels[i][0], b.degree(i)) for i in b.interior()} == {("H", 2), ("L", 3)}
    b = ball(z4_z6, 4)
    for i in b.interior():
        assert b.degree(i) == (2 if b.labels[i][0] == "H" else 3)
    b.to_tree()  # validates acyclic and connected


def test_ball_export(z4_z6):
    b = ball(z4_z6, 1)
    assert b.sidecar().splitlines()[0] == "0 H[]"
    assert b.to_tree().n == len(b.vertices)


def test_translation_length_examples(dinf):
    assert translation_length(dinf, dinf.word("a b")) == 2
    assert translation_length(dinf, dinf.word("a")) == 0
    assert translation_length(dinf, Word()) == 0


def test_axis_examples(dinf):
    seg = axis_segment(dinf, dinf.word("a b"), 3)
    assert len(seg) == 7
    assert seg == axis_segment(dinf, dinf.word("a b a b"), 3)
    assert translation_length(dinf, dinf.word("a b a b")) == 4
    with pytest.raises(NoAxis):
        axis_segment(dinf, dinf.word("a"), 3)


def test_axis_is_translated(z4_z6):
    w = z4_z6.word("x y")
    seg = axis_segment(z4_z6, w, 4)
    ell = translation_length(z4_z6, w)
    assert ell == 2
    for v in seg:
        assert z4_z6.distance(v, z4_z6.act(w, v)) == ell


@pytest.mark.parametrize("fixture", ["dinf", "z4_z6", "s3_s3"])
def test_translation_length_matches_bruteforce(fixture, request):
    am = request.getfixturevalue(fixture)
    rng = random.Random(11)
    n = len(am.symbols)
    for _ in range(40):
        w = random_word(rng, n, rng.randint(0, 5))
        assert translation_length(am, w) == translation_length_bruteforce(am, w)


@pytest.mark.parametrize("fixture", ["dinf", "z4_z6"])
def test_translation_length_of_powers(fixture, request):
    am = request.getfixturevalue(fixture)
    rng = random.Random(2)
    n = len(am.symbols)
    checked = 0
    while checked < 15:
        w = random_word(rng, n, rng.randint(1, 5))
        ell = translation_length(am, w)
        if ell == 0:
            continue
        checked += 1
        for k in range(1, 5):
            assert translation_length(am, w**k) == k * ell


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_conjugates_of_factor_elements_are_elliptic(seed):
    rng = random.Random(seed)
    z4 = cyclic_group(4)
    am = Amalgam(z4, cyclic_group(6), cyclic_group(2), [z4.generators[0] ** 2], [cyclic_group(6).generators[0] ** 3])
    g = random_word(rng, 2, rng.randint(0, 5))
    h = Word.gen(rng.randrange(2), rng.choice([1, 2, 3]))
    assert translation_length(am, g * h * g.inverse()) == 0


def test_degenerate(dinf, z4_z6):
    assert is_degenerate(dinf) is True
    assert is_degenerate(z4_z6) is False


def test_trivial_amalgam_rejected():
    z2 = cyclic_group(2)
    with pytest.raises(NotNontrivialAmalgam):
        Amalgam(z2, z2, z2, [z2.generators[0]], [z2.generators[0]])
    # H = K but L proper: allowed as an amalgam, rejected by is_degenerate
    z4 = cyclic_group(4)
    am = Amalgam(z2, z4, z2, [z2.generators[0]], [z4.generators[0] ** 2])
    with pytest.raises(NotNontrivialAmalgam):
        is_degenerate(am)


def test_embedding_must_be_injective_hom():
    z2, z4 = cyclic_group(2), cyclic_group(4)
    with pytest.raises(ValueError):
        Amalgam(z4, z4, z2, [z4.generators[0]], [z4.generators[0] ** 2])


def test_action_fixes_base_for_h(z4_z6):
    assert z4_z6.act(z4_z6.word("x"), BASE) == BASE
