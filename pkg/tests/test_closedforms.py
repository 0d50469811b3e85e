# tests/test_closedforms.py
import pytest
from hypothesis import given, settings, strategies as st

from polyzeta import oracle
from polyzeta.closedforms import (
    COMPLETED, DSR_1, FAMILY_TAGS, LEFT_FACTORS, SIX_FAMILIES, Side, annotated_terms, closed,
    closed_dsr, closed_shuffle, closed_stuffle, families, left_key, reconcile, stated, stated_readings,
)
from polyzeta.core import Composition, to_ab
from polyzeta.counting import family_term_counts
from polyzeta.errors import DivergentError, PolyzetaError
from polyzeta.oracle import LinComb
from polyzeta.ordering import enumerate_weight

convergent = st.builds(
    lambda head, tail: Composition((head, *tail)),
    st.integers(2, 5),
    st.lists(st.integers(1, 3), max_size=4),
)

ORACLE = {Side.STUFFLE: oracle.stuffle, Side.SHUFFLE: oracle.shuffle, Side.DSR: oracle.dsr}


def _cases(max_weight):
    for tag in FAMILY_TAGS:
        gw = LEFT_FACTORS[tag.g].weight
        for wz in range(2, max_weight - gw + 1):
            for z in enumerate_weight(wz):
                yield tag, z


def test_left_key():
    assert left_key("2,1") == "21"
    assert left_key((2, 1)) == "21"
    assert left_key(Composition((3,))) == "3"
    with pytest.raises(PolyzetaError):
        left_key("5")


def test_shuffle_two_example():
    expected = LinComb.from_terms((6, (3, 1, 1)), (3, (2, 2, 1)), (1, (2, 1, 2)))
    assert closed_shuffle("2", (2, 1)) == expected
    assert closed_shuffle("2", (2, 1), completion=False) == expected


def test_dsr_two_two():
    assert closed_dsr("2", (2,)) == LinComb.from_terms((4, (3, 1)), (-1, (4,)))


def test_dsr_one_structure():
    assert [fam.shift for fam in DSR_1] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert [fam.sign for fam in DSR_1] == [-1, -1, 1, 1]


@pytest.mark.parametrize("g", ["1", "2"])
@pytest.mark.parametrize("side", list(Side))
def test_stated_forms_are_exact_for_one_and_two(g, side):
    for wz in range(2, 8 - int(g) + 1):
        for z in enumerate_weight(wz):
            assert stated(g, side, z) == ORACLE[side](LEFT_FACTORS[g], z), (g, side, z)


def test_stuffle_with_three_is_exact():
    for wz in range(2, 6):
        for z in enumerate_weight(wz):
            assert closed_stuffle("3", z, completion=False) == oracle.stuffle((3,), z)


def test_completed_forms_match_oracle():
    for tag, z in _cases(8):
        assert closed(tag.g, tag.side, z) == ORACLE[tag.side](tag.left, z), (tag, z)


@pytest.mark.slow
def test_completed_forms_match_oracle_to_twelve():
    for tag, z in _cases(12):
        assert closed(tag.g, tag.side, z) == ORACLE[tag.side](tag.left, z), (tag, z)


def test_closed_dsr_has_no_divergent_terms():
    for g in LEFT_FACTORS:
        for z in enumerate_weight(4):
            assert not closed_dsr(g, z).has_divergent()


def test_closed_rejects_divergent_source():
    with pytest.raises(DivergentError):
        closed_stuffle("1", (1, 2))


def test_annotated_terms_carry_their_signature():
    for tag, z in _cases(7):
        for term in annotated_terms(tag.g, tag.side, z):
            c = term.composition
            assert term.tag == (sum(c), len(c), sum(1 for x in c if x >= 2)), (tag, z, term.family)


@pytest.mark.parametrize("tag", FAMILY_TAGS, ids=str)
def test_annotated_terms_with_completion_sum_to_closed(tag):
    for wz in range(2, 6):
        for z in enumerate_weight(wz):
            terms = annotated_terms(tag.g, tag.side, z, completion=True)
            total = LinComb.from_terms(*((t.coeff, t.composition) for t in terms))
            assert total == closed(tag.g, tag.side, z), (tag, z)


@given(convergent)
@settings(max_examples=60, deadline=None)
def test_six_families_match_counts(z):
    f = to_ab(z)
    counts = family_term_counts(f)
    masses = {name: sum(coef for coef, _ in emit(f)) for name, emit in SIX_FAMILIES.items()}
    assert masses == {
        "F_i|j": counts.n_i_j,
        "F_j1|j2": counts.n_j1_j2,
        "F_jj": counts.n_jj,
        "F_ii": counts.n_ii,
        "F_i1|i2": counts.n_i1_i2,
        "F_j|i": counts.n_j_i,
    }


@pytest.mark.parametrize("g, side", [("1", s) for s in Side] + [("2", s) for s in Side] + [("3", Side.STUFFLE)])
def test_reconcile_exact(g, side):
    reports = reconcile(g, side, 8)
    assert reports
    assert {r.verdict for r in reports} == {"exact"}


@pytest.mark.parametrize("tag", FAMILY_TAGS, ids=str)
def test_reconcile_never_mismatches(tag):
    reports = reconcile(tag.g, tag.side, 8)
    for r in reports:
        assert r.verdict in ("exact", "reconciled"), r
        if r.verdict == "reconciled":
            assert (tag.g, tag.side) in COMPLETED or tag.side is Side.DSR


def test_reconcile_report_lists_differences():
    for r in reconcile("21", "shuffle", 8):
        if r.verdict == "reconciled":
            assert r.missing or r.extra or r.mismatched
        else:
            assert not (r.missing or r.extra or r.mismatched)
        assert set(r.family_masses) == {fam.name for fam in families("21", "shuffle")}


def test_reconcile_weight_bound():
    with pytest.raises(PolyzetaError):
        reconcile("1", "dsr", 13)


def test_stated_readings():
    readings = stated_readings()
    assert any("F_ii" in line for line in readings)
    assert len(readings) >= 5


def test_closed_stuffle_one_with_four_one_one():
    expected = LinComb.from_terms(
        (1, (5, 1, 1)), (1, (4, 2, 1)), (1, (4, 1, 2)), (1, (1, 4, 1, 1)), (3, (4, 1, 1, 1)),
    )
    assert closed_stuffle("1", (4, 1, 1)) == expected == oracle.stuffle((1,), (4, 1, 1))


def test_closed_shuffle_one_with_three_one_four_one():
    expected = LinComb.from_terms(
        (3, (3, 1, 1, 4, 1)), (3, (3, 1, 4, 1, 1)), (1, (1, 3, 1, 4, 1)),
        (1, (2, 2, 1, 4, 1)), (1, (3, 1, 3, 2, 1)), (1, (3, 1, 2, 3, 1)),
    )
    assert closed_shuffle("1", (3, 1, 4, 1)) == expected == oracle.shuffle((1,), (3, 1, 4, 1))
