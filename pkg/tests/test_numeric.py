# tests/test_numeric.py
import mpmath
import pytest

from polyzeta.core import Composition, dual
from polyzeta.errors import DivergentError, PolyzetaError, ToleranceUnreachable
from polyzeta.numeric import EvalResult, NestedSum, eval_lincomb, eval_mzv
from polyzeta.oracle import LinComb, stuffle
from polyzeta.ordering import enumerate_weight


def Z(*entries):
    return Composition(entries)


@pytest.mark.parametrize("s", [2, 3, 4, 5])
def test_depth_one_against_mpmath(s):
    res = eval_mzv(Z(s), 1e-6)
    assert abs(res.value - float(mpmath.zeta(s))) < 1e-6
    assert res.tail_estimate > 0
    assert res.terms_used >= 2048


def test_euler_relation():
    assert abs(eval_mzv(Z(3), 1e-6).value - eval_mzv(Z(2, 1), 1e-6).value) < 2e-6


def test_stuffle_identity_two_two():
    z2 = eval_mzv(Z(2), 1e-6).value
    z4 = eval_mzv(Z(4), 1e-6).value
    assert abs(eval_mzv(Z(2, 2), 1e-5).value - (z2 * z2 - z4) / 2) < 1e-4


def test_eval_lincomb():
    assert eval_lincomb(LinComb()) == 0.0
    assert abs(eval_lincomb(LinComb.from_terms((1, (2, 1)), (-1, (3,))), 1e-6)) < 1e-5
    assert abs(eval_lincomb(LinComb.from_terms((4, (3, 1)), (-1, (4,))), 1e-6)) < 1e-5


def test_eval_lincomb_rejects_divergent_terms():
    with pytest.raises(DivergentError):
        eval_lincomb(LinComb.from_terms((1, (1, 2)), (1, (3,))))


def test_eval_rejects_bad_input():
    with pytest.raises(DivergentError):
        eval_mzv(Z(1, 2), 1e-6)
    with pytest.raises(PolyzetaError):
        eval_mzv(Z(2), 0.0)
    with pytest.raises(PolyzetaError):
        eval_mzv(Z(2), 1e-12)


def test_tail_shrinks_as_terms_grow():
    acc = NestedSum(Z(2, 1), chunk=1000)
    tails, estimates = [], []
    for n in (1000, 2000, 4000, 8000):
        acc.advance_to(n)
        tails.append(acc.tail())
        estimates.append(acc.partial + acc.tail())
    assert tails == sorted(tails, reverse=True)
    for prev_tail, a, b in zip(tails, estimates, estimates[1:]):
        assert abs(b - a) <= prev_tail


def test_chunking_does_not_change_partial_sums():
    a = NestedSum(Z(3, 1, 2), chunk=7)
    b = NestedSum(Z(3, 1, 2), chunk=4096)
    a.advance_to(500)
    b.advance_to(500)
    assert a.partial == pytest.approx(b.partial, rel=1e-13)


def test_unreachable_tolerance_keeps_best_effort(small_cap):
    with pytest.raises(ToleranceUnreachable) as e:
        eval_mzv(Z(2, 1, 1), 1e-9)
    assert isinstance(e.value.result, EvalResult)
    assert abs(e.value.result.value - float(mpmath.zeta(4))) < 1e-3


@pytest.mark.parametrize("x, y", [((2,), (2,)), ((2,), (3,)), ((3,), (2, 1)), ((2, 1), (2, 1)), ((2,), (4, 1))])
def test_product_consistency(x, y):
    lhs = eval_mzv(Composition(x), 1e-7).value * eval_mzv(Composition(y), 1e-7).value
    assert abs(lhs - eval_lincomb(stuffle(x, y), 1e-7)) < 1e-5


@pytest.mark.parametrize("w", range(2, 8))
def test_duality_numerics(w):
    for z in enumerate_weight(w):
        a = eval_mzv(z, 1e-6).value
        b = eval_mzv(dual(z), 1e-6).value
        assert abs(a - b) < 1e-5, z


def test_tail_is_added_as_a_correction():
    c = Z(2, 1, 1, 1, 1)
    res = eval_mzv(c, 1e-4)
    assert res.error_estimate < 1e-4 * 0.1
    assert abs(res.value - float(mpmath.zeta(6))) < 1e-4
    acc = NestedSum(c, chunk=4096)
    acc.advance_to(res.terms_used)
    assert res.tail_estimate == pytest.approx(acc.tail(), rel=1e-9)
    assert res.value == pytest.approx(acc.partial + acc.tail(), rel=1e-12)


def test_default_stop_ignores_tail_size(small_cap):
    res = eval_mzv(Z(2, 1), 1e-3)
    assert res.tail_estimate > 1e-3
    assert abs(res.value - float(mpmath.zeta(3))) < 1e-3


def test_strict_tail_stop(strict_tail):
    res = eval_mzv(Z(2), 1e-3)
    assert res.tail_estimate < 1e-3
    assert abs(res.value - float(mpmath.zeta(2))) < 1e-3
    with pytest.raises(ToleranceUnreachable) as e:
        eval_mzv(Z(2, 1), 1e-3)
    assert e.value.result.tail_estimate > 1e-3
