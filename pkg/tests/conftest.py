import pytest

from arborfa.presentations import parse_presentation


@pytest.fixture
def z2():
    return parse_presentation("group A { gens: a; rels: a^2; }")


@pytest.fixture
def z3():
    return parse_presentation("group B { gens: t; rels: t^3; }")


@pytest.fixture
def infinite_dihedral():
    return parse_presentation("group Dinf { gens: a, b; rels: a^2, b^2; }")
