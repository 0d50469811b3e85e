# tests/test_oracle.py
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from polyzeta.core import Composition
from polyzeta.errors import DivergentError, PolyzetaError
from polyzeta.oracle import LinComb, dsr, shuffle, shuffle_words, stuffle
from polyzeta.ordering import enumerate_weight

convergent = st.builds(
    lambda head, tail: Composition((head, *tail)),
    st.integers(2, 4),
    st.lists(st.integers(1, 3), max_size=3),
)


def L(*terms):
    return LinComb.from_terms(*terms)


def test_stuffle_two_two():
    assert stuffle((2,), (2,)) == L((1, (4,)), (2, (2, 2)))


def test_stuffle_with_one():
    assert stuffle((1,), (2,)) == L((1, (1, 2)), (1, (2, 1)), (1, (3,)))


def test_shuffle_words():
    assert shuffle_words("01", "01") == {"0101": 2, "0011": 4}


def test_shuffle_examples():
    assert shuffle((2,), (2,)) == L((4, (3, 1)), (2, (2, 2)))
    assert shuffle((2,), (2, 1)) == L((6, (3, 1, 1)), (3, (2, 2, 1)), (1, (2, 1, 2)))
    assert shuffle((2,), (3,)) == L((6, (4, 1)), (3, (3, 2)), (1, (2, 3)))


def test_shuffle_with_one_keeps_divergent_term():
    result = shuffle((1,), (2,))
    assert result == L((1, (1, 2)), (2, (2, 1)))
    assert result.divergent_terms() == [(1, 2)]


def test_dsr_examples():
    assert dsr((2,), (2,)) == L((4, (3, 1)), (-1, (4,)))
    assert dsr((1,), (2,)) == L((1, (2, 1)), (-1, (3,)))


def test_dsr_rejects_divergent_operands():
    with pytest.raises(DivergentError):
        dsr((1, 2), (2,))
    with pytest.raises(DivergentError):
        dsr((2,), (1, 2))


@pytest.mark.parametrize("g", [(1,), (2,), (3,), (2, 1)])
@pytest.mark.parametrize("w", range(2, 7))
def test_dsr_is_integral_and_convergent(g, w):
    for z in enumerate_weight(w):
        rel = dsr(g, z)
        assert not rel.has_divergent()
        assert rel.is_integral()
        assert rel.weight in (None, w + sum(g))


@given(convergent, convergent)
@settings(max_examples=40, deadline=None)
def test_products_commute(x, y):
    assert stuffle(x, y) == stuffle(y, x)
    assert shuffle(x, y) == shuffle(y, x)


@given(convergent, convergent)
@settings(max_examples=40, deadline=None)
def test_shuffle_mass(x, y):
    assert shuffle(x, y).mass() == comb(x.weight + y.weight, x.weight)


def test_unit_of_products():
    z = Composition((3, 1, 2))
    assert stuffle((), z) == LinComb.of(z)
    assert shuffle(z, ()) == LinComb.of(z)


def test_lincomb_arithmetic():
    x = L((4, (3, 1)), (-1, (4,)))
    assert x - x == 0
    assert (2 * x).coeff((3, 1)) == 8
    assert (x * Fraction(1, 2)).coeff((4,)) == Fraction(-1, 2)
    assert x.support() == {(3, 1), (4,)}
    assert x.mass() == 3
    assert str(x) == "-(4) + 4*(3,1)"
    assert str(LinComb()) == "0"


def test_lincomb_rejects_mixed_weights():
    with pytest.raises(PolyzetaError):
        L((1, (2,)), (1, (3,)))


def test_lincomb_json():
    x = L((Fraction(4, 3), (2, 2)), (-1, (4,)))
    data = x.to_json()
    assert data["terms"][0] == {"coeff": {"num": "-1", "den": "1"}, "composition": [4]}
    assert LinComb.from_json(data) == x


small = st.builds(
    lambda head, tail: Composition((head, *tail)),
    st.integers(2, 3),
    st.lists(st.integers(1, 2), max_size=2),
)


@given(small, small, small)
@settings(max_examples=25, deadline=None)
def test_products_are_associative(x, y, z):
    assert stuffle(stuffle(x, y), z) == stuffle(x, stuffle(y, z))
    assert shuffle(shuffle(x, y), z) == shuffle(x, shuffle(y, z))


@given(st.integers(1, 5), convergent)
@settings(max_examples=40, deadline=None)
def test_stuffle_mass_with_depth_one_factor(s, z):
    assert stuffle((s,), z).mass() == 2 * z.depth + 1


@given(convergent, convergent)
@settings(max_examples=40, deadline=None)
def test_products_add_weights_and_shuffle_adds_depths(x, y):
    for c in stuffle(x, y):
        assert c.weight == x.weight + y.weight
        assert max(x.depth, y.depth) <= c.depth <= x.depth + y.depth
    for c in shuffle(x, y):
        assert c.weight == x.weight + y.weight
        assert c.depth == x.depth + y.depth


def test_stuffle_one_with_four_one_one():
    expected = L((1, (5, 1, 1)), (1, (4, 2, 1)), (1, (4, 1, 2)), (1, (1, 4, 1, 1)), (3, (4, 1, 1, 1)))
    assert stuffle((1,), (4, 1, 1)) == expected


def test_shuffle_one_with_three_one_four_one():
    expected = L(
        (3, (3, 1, 1, 4, 1)), (3, (3, 1, 4, 1, 1)), (1, (1, 3, 1, 4, 1)),
        (1, (2, 2, 1, 4, 1)), (1, (3, 1, 3, 2, 1)), (1, (3, 1, 2, 3, 1)),
    )
    assert shuffle((1,), (3, 1, 4, 1)) == expected
