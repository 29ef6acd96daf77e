import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arborfa.presentations import GeneratorAssignment, Word, parse_presentation
from arborfa.trees import (
    InversionDetected,
    LemmaViolation,
    LineIsometry,
    RelatorViolation,
    Subtree,
    Tree,
    TreeIsometry,
    check_action,
    classify_line_isometry,
    fixed_set,
    format_tree,
    geodesic,
    hull,
    parse_tree,
    random_commuting_instance,
    random_helly_instance,
    random_tree,
    run_lemma_suite,
    subtree_intersection,
    verify_commuting_lemma,
    line_action_conclusion,
)


def path(n):
    return Tree(n, tuple((i, i + 1) for i in range(n - 1)))


def star(leaves):
    return Tree(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def sub(t, vs):
    return Subtree(t, frozenset(vs))


def iso(t, cycles):
    return TreeIsometry.from_cycles(t, cycles)


def action(t, rels_text, images):
    p = parse_presentation(rels_text)
    phi = GeneratorAssignment("tree-isometry", dict(enumerate(images)), TreeIsometry.identity(t))
    return check_action(p, t, phi)


def test_tree_validation():
    with pytest.raises(ValueError):
        Tree(3, ((0, 1),))
    with pytest.raises(ValueError):
        Tree(3, ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        Tree(4, ((0, 1), (1, 0), (2, 3)))
    with pytest.raises(ValueError):
        Tree(2, ((0, 0),))


def test_geodesic_examples():
    assert geodesic(path(4), 0, 3) == [0, 1, 2, 3]
    assert geodesic(path(4), 2, 2) == [2]
    assert geodesic(star(2), 1, 2) == [1, 0, 2]
    with pytest.raises(ValueError):
        geodesic(path(2), 0, 5)


def test_text_format_round_trip():
    t = star(3)
    text = format_tree(t)
    assert text == "4\n0 1\n0 2\n0 3\n"
    assert parse_tree(text) == t


def test_intersection_examples():
    t = path(6)
    rep = subtree_intersection([sub(t, range(0, 4)), sub(t, range(2, 6)), sub(t, range(1, 5))])
    assert rep.subtree.vertices == {2, 3} and rep.pairwise_nonempty
    same = sub(t, [1, 2])
    assert subtree_intersection([same, same]).subtree == same
    rep = subtree_intersection([sub(t, [0, 1]), sub(t, [4, 5]), sub(t, [1, 2, 3, 4])])
    assert rep.subtree.empty and not rep.pairwise_nonempty and not rep.helly_violated


def test_intersection_rejects_mixed_trees():
    with pytest.raises(ValueError):
        subtree_intersection([sub(path(3), [0]), sub(star(2), [0])])


def test_subtree_must_be_connected():
    with pytest.raises(ValueError):
        sub(path(4), [0, 2])


def test_fixed_set_examples():
    t = star(3)
    act = action(t, "group G { gens: s, r; rels: s^2, r^3; }", [iso(t, [[1, 2]]), iso(t, [[1, 2, 3]])])
    assert fixed_set(act, []).vertices == set(range(4))
    assert fixed_set(act, [Word.gen(0)]).vertices == {0, 3}
    assert fixed_set(act, [Word.gen(1)]).vertices == {0}


def test_check_action_examples():
    t = star(3)
    action(t, "group A { gens: a; rels: a^2; }", [iso(t, [[1, 2]])])
    with pytest.raises(RelatorViolation) as exc:
        action(t, "group A { gens: a; rels: a^2; }", [iso(t, [[1, 2, 3]])])
    assert "a^2" in str(exc.value)
    edge = path(2)
    with pytest.raises(InversionDetected) as exc:
        action(edge, "group A { gens: a; rels: a^2; }", [iso(edge, [[0, 1]])])
    assert exc.value.edge == (0, 1)


def test_non_isometry_rejected():
    t = path(4)
    with pytest.raises(ValueError):
        iso(t, [[0, 2]])


def test_commuting_lemma_examples():
    t = star(5)
    act = action(t, "group G { gens: a, b; rels: a^2, b^2, [a,b]; }", [iso(t, [[1, 2]]), iso(t, [[3, 4]])])
    a, b = Word.gen(0), Word.gen(1)
    assert verify_commuting_lemma(act, [a], [b]).witness == 0
    res = verify_commuting_lemma(act, [], [b])
    assert res.witness in fixed_set(act, [b]).vertices
    act = action(t, "group G { gens: a, b; rels: a^2, b^2; }", [iso(t, [[1, 2]]), iso(t, [[2, 3]])])
    res = verify_commuting_lemma(act, [a], [b])
    assert res.witness is None and res.failure.startswith("[A,B]=1 fails")


def test_commuting_lemma_raises_on_counterexample(monkeypatch):
    from arborfa import trees

    t = path(3)
    act = action(t, "group G { gens: a, b; rels: a^2, b^2, [a,b]; }", [iso(t, [[0, 2]]), iso(t, [[0, 2]])])
    assert verify_commuting_lemma(act, [Word.gen(0)], [Word.gen(1)]).witness == 1
    # feed disjoint fixed sets to simulate a broken engine
    fake = iter([sub(t, [0]), sub(t, [2])])
    monkeypatch.setattr(trees, "fixed_set", lambda *_: next(fake))
    with pytest.raises(LemmaViolation):
        verify_commuting_lemma(act, [Word.gen(0)], [Word.gen(1)])


def test_line_isometry_law():
    for f1 in (0, 1):
        for f2 in (0, 1):
            for s1 in range(-3, 4):
                for s2 in range(-3, 4):
                    g, h = LineIsometry(bool(f1), s1), LineIsometry(bool(f2), s2)
                    gh = g * h
                    assert gh.flip == (bool(f1) ^ bool(f2))
                    assert gh.shift == s2 + (-1) ** f2 * s1
                    for x in range(-5, 6):
                        assert gh(x) == h(g(x))


def test_line_classification_examples():
    c = classify_line_isometry(LineIsometry(False, 2))
    assert c.kind == "translation" and c.translation_length == 2
    c = classify_line_isometry(LineIsometry(True, 0))
    assert c.kind == "reflection" and c.value == 0
    r0, r1 = LineIsometry(True, 0), LineIsometry(True, 2)  # reflections at 0 and 1
    assert classify_line_isometry(r1).value == 1
    assert classify_line_isometry(r0 * r1).translation_length == 2


def test_line_action_examples():
    assert line_action_conclusion([LineIsometry(False, 1), LineIsometry(False, 1)]) == "translations-nontrivial"
    assert line_action_conclusion([LineIsometry(False, 0)]) == "translations-trivial"
    assert line_action_conclusion([LineIsometry(False, 1), LineIsometry(True, 0)]) == "contains-flip"


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_helly_property(seed):
    rng = random.Random(seed)
    t, parts = random_helly_instance(rng, 60)
    rep = subtree_intersection(parts)
    assert rep.pairwise_nonempty and not rep.subtree.empty
    for a, b in combinations(parts, 2):
        assert a.vertices & b.vertices


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_commuting_instances(seed):
    act, aw, bw = random_commuting_instance(random.Random(seed), 40)
    res = verify_commuting_lemma(act, aw, bw)
    assert res.ok
    assert res.witness in fixed_set(act, aw).vertices & fixed_set(act, bw).vertices
    # fixed sets are subtrees and the whole action has a global fixed point
    glob = fixed_set(act, aw + bw)
    assert not glob.empty
    assert act.tree.is_connected_set(glob.vertices)


def test_random_tree_is_tree():
    rng = random.Random(1)
    for n in (1, 2, 3, 10, 200):
        t = random_tree(rng, n)
        assert t.n == n and len(t.edges) == n - 1


def test_hull_is_minimal():
    t = path(6)
    assert hull(t, [1, 4]).vertices == {1, 2, 3, 4}
    assert hull(t, []).empty


def test_lemma_suite_small():
    assert run_lemma_suite(7, 20) == {"helly_violations": 0, "commuting_violations": 0}
