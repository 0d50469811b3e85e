# tests/test_ordering.py
import pytest

from polyzeta.core import Composition
from polyzeta.errors import DivergentError, PolyzetaError, WeightMismatchError
from polyzeta.ordering import Order, compare, enumerate_weight, index_of, successors

W6 = [
    (6,), (5, 1), (4, 2), (3, 3), (2, 4), (4, 1, 1), (3, 2, 1), (2, 3, 1),
    (3, 1, 2), (2, 1, 3), (2, 2, 2), (3, 1, 1, 1), (2, 2, 1, 1), (2, 1, 2, 1),
    (2, 1, 1, 2), (2, 1, 1, 1, 1),
]


def test_enumerate_weight_4():
    assert enumerate_weight(4) == ((4,), (3, 1), (2, 2), (2, 1, 1))


def test_enumerate_weight_6_full_order():
    assert list(enumerate_weight(6)) == W6
    assert index_of(Composition((3, 1, 1, 1))) == 11


def test_small_weights():
    assert enumerate_weight(2) == ((2,),)
    assert enumerate_weight(3) == ((3,), (2, 1))
    with pytest.raises(PolyzetaError):
        enumerate_weight(1)


@pytest.mark.parametrize("w", range(2, 13))
def test_enumeration_is_sorted_and_complete(w):
    cs = enumerate_weight(w)
    assert len(cs) == len(set(cs)) == 2 ** (w - 2)
    assert all(c.convergent() and c.weight == w for c in cs)
    assert all(compare(x, y) is Order.LESS for x, y in zip(cs, cs[1:]))


def test_compare():
    assert compare(Composition((3,)), Composition((2, 1))) is Order.LESS
    assert compare(Composition((2, 2)), Composition((3, 1))) is Order.GREATER
    assert compare(Composition((2, 2)), Composition((2, 2))) is Order.EQUAL


def test_compare_errors():
    with pytest.raises(WeightMismatchError):
        compare(Composition((3,)), Composition((2,)))
    with pytest.raises(DivergentError):
        compare(Composition((1, 2)), Composition((3,)))


def test_successors():
    assert successors(Composition((2, 1))) == ((2, 2), (2, 1, 1))


@pytest.mark.parametrize("w", range(2, 11))
def test_every_polyzeta_has_one_predecessor(w):
    grown = [s for c in enumerate_weight(w) for s in successors(c)]
    assert len(grown) == len(set(grown))
    assert set(grown) == set(enumerate_weight(w + 1))
