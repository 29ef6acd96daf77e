import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arborfa.permgroups import Permutation
from arborfa.presentations import (
    DSLSyntaxError,
    GeneratorAssignment,
    MissingImageError,
    Presentation,
    Word,
    commutator,
    eliminate_trivial_generators,
    evaluate_word,
    format_presentation,
    format_word,
    free_product,
    free_reduce,
    parse_presentation,
    parse_word,
)

signed_letters = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=50)


def naive_reduce(seq):
    out = []
    for x in seq:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return out


def word_of(seq):
    return Word.from_signed(seq)


def test_parse_smallest():
    p = parse_presentation("group A { gens: a; rels: a^2; }")
    assert p.generators == ("a",)
    assert p.relators == (Word.gen(0, 2),)


def test_parse_commutator_sugar():
    p = parse_presentation("group D { gens: a,t; rels: a^2, [a, t a t^-1]; }")
    a, t = Word.gen(0), Word.gen(1)
    # hand expansion: a (t a t^-1) a^-1 (t a t^-1)^-1 = a t a t^-1 a^-1 t a^-1 t^-1
    expected = a * t * a * t.inverse() * a.inverse() * t * a.inverse() * t.inverse()
    assert p.relators == (Word.gen(0, 2), expected)
    assert format_word(p.relators[1], p.generators) == "a t a t^-1 a^-1 t a^-1 t^-1"


def test_parse_free_group():
    p = parse_presentation("group F2 { gens: a,b; }")
    assert p.generators == ("a", "b") and p.relators == ()


def test_free_reduce_examples():
    a, b = Word.gen(0), Word.gen(1)
    assert free_reduce([(0, 1), (0, -1)]).is_identity
    assert free_reduce([(0, 2), (0, -1), (1, 1)]) == a * b
    assert commutator(a, a).is_identity


@settings(max_examples=2000, deadline=None)
@given(signed_letters)
def test_free_reduce_idempotent(seq):
    w = free_reduce([(abs(x) - 1, 1 if x > 0 else -1) for x in seq])
    assert free_reduce(w.letters) == w
    assert [g for g, e in w.expanded()] == [abs(x) - 1 for x in naive_reduce(seq)]


def test_free_reduce_idempotent_seeded_10k():
    rng = random.Random(0)
    for _ in range(10_000):
        seq = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(rng.randint(0, 50))]
        w = word_of(seq)
        assert free_reduce(w.letters) == w


def test_evaluate_examples():
    phi = GeneratorAssignment("permutation", {0: Permutation.from_cycles("(0 1)", 3), 1: Permutation.from_cycles("(1 2)", 3)})
    assert evaluate_word(Word(), phi).is_identity
    assert evaluate_word(Word.gen(0, 2), phi).is_identity
    assert str(evaluate_word(Word.gen(0) * Word.gen(1), phi)) == "(0 1 2)"


def test_evaluate_missing_image():
    phi = GeneratorAssignment("permutation", {0: Permutation.from_cycles("(0 1)", 2)})
    with pytest.raises(MissingImageError):
        evaluate_word(Word.gen(1), phi)


@settings(max_examples=300, deadline=None)
@given(signed_letters, signed_letters)
def test_evaluate_is_homomorphism(u, v):
    phi = GeneratorAssignment(
        "permutation",
        {
            0: Permutation.from_cycles("(0 1 2 3)", 5),
            1: Permutation.from_cycles("(1 4)", 5),
            2: Permutation.from_cycles("(0 2)(3 4)", 5),
        },
    )
    wu, wv = word_of(u), word_of(v)
    assert evaluate_word(wu * wv, phi) == evaluate_word(wu, phi) * evaluate_word(wv, phi)


@settings(max_examples=200, deadline=None)
@given(st.lists(signed_letters.filter(lambda s: naive_reduce(s)), max_size=5))
def test_round_trip(rels):
    p = Presentation("G", ("a", "b", "c"), tuple(word_of(r) for r in rels))
    text = format_presentation(p)
    assert parse_presentation(text) == p
    assert format_presentation(parse_presentation(text)) == text


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("group A { gens: a; rels: b; }", 1, 26),
        ("group A { gens: ; rels: a; }", 1, 19),
        ("group A { gens: a, a; }", 1, 20),
        ("group A {\n gens: a;\n rels: a^; }", 3, 10),
    ],
)
def test_syntax_errors_have_position(text, line, col):
    with pytest.raises(DSLSyntaxError) as exc:
        parse_presentation(text)
    assert exc.value.line == line
    assert exc.value.column == col


def test_parse_word_and_identity():
    assert parse_word("a a^-1", ["a"]).is_identity
    assert format_word(Word(), ["a"]) == "1"


def test_eliminate_trivial_generators():
    p = parse_presentation("group T { gens: a, t; rels: a, t^3; }")
    q = eliminate_trivial_generators(p)
    assert q.generators == ("t",)
    assert q.relators == (Word.gen(0, 3),)


def test_free_product_renames_collisions():
    p = parse_presentation("group P { gens: a; rels: a^2; }")
    q = parse_presentation("group Q { gens: a; rels: a^3; }")
    fp, off = free_product(p, q)
    assert off == 1
    assert fp.generators == ("a", "a'")
    assert fp.relators == (Word.gen(0, 2), Word.gen(1, 3))
