from fractions import Fraction
from math import ceil, log2

import pytest

from config import PreconditionError, WalkParams
from order_sep import (
    conjectured_separation,
    detector_dominance_check,
    hook_eigenvalue_identity_check,
    lemma_threshold_sweep,
    likelihood_order,
    limiting_order_check,
    n_cycle_deficit,
    separation_comparison,
)
from partitions import CycleType, Partition
from spectrum import cached_table
from walk_dist import distribution_at_time, separation

HALF = Fraction(1, 2)


def test_n4_half_ranking_is_not_cycle_lex():
    order = likelihood_order(WalkParams(n=4, p=HALF), 12)
    assert [str(a) for a in order.classes] == ["1:4", "2:2", "1:2,2:1", "4:1", "1:1,3:1"]
    assert not order.matches_cycle_lex()
    pairs = [(str(a), str(b)) for a, b in order.violations()]
    assert ("1:1,3:1", "4:1") in pairs


def test_lazy_walk_stays_at_identity():
    order = likelihood_order(WalkParams(n=4, p=1), 5)
    assert str(order.classes[0]) == "1:4"
    assert order.ranked[0][1] == 1
    assert len(order.ties) == 1
    assert len(order.ties[0]) == 4
    assert order.matches_cycle_lex()
    assert not order.matches_cycle_lex(strict=True)


def test_ties_broken_cycle_lex_descending():
    order = likelihood_order(WalkParams(n=4, p=HALF), 1)
    zero_group = order.ties[-1]
    assert [str(a) for a in zero_group] == ["1:1,3:1", "4:1"]


def test_n4_half_never_settles():
    report = limiting_order_check(WalkParams(n=4, p=HALF), 64)
    assert report.t_star is None
    assert ("1:1,3:1", "4:1") in report.violating_pairs
    assert not report.holds_at_all_times
    assert report.claim_applies


def test_n4_three_quarters_settles():
    report = limiting_order_check(WalkParams(n=4, p=Fraction(3, 4)), 64)
    assert report.t_star is not None
    assert report.violating_pairs == []


@pytest.mark.parametrize("p", [HALF, Fraction(3, 4)])
def test_cycle_lex_limit_found(p):
    n = 6
    params = WalkParams(n=n, p=p)
    report = limiting_order_check(params, 64)
    assert report.t_star is not None
    assert report.t_star <= 64
    # the least likely class ends up being the n-cycle
    _, argmax = separation(distribution_at_time(params, 64))
    assert argmax == CycleType.from_cycle_lengths([n], n)


def test_n8_half_never_settles_on_balanced_tie():
    # psi_[5,3] = psi_[4,4] = 3/14 keeps one pair inverted at every t
    params = WalkParams(n=8, p=HALF)
    assert cached_table(params)[Partition.of(5, 3)] == Fraction(3, 14)
    assert cached_table(params)[Partition.of(4, 4)] == Fraction(3, 14)
    report = limiting_order_check(params, 64)
    assert report.t_star is None
    assert report.violating_pairs == [("3:1,5:1", "4:2")]
    assert report.claim_applies


@pytest.mark.parametrize("p, t_star", [(Fraction(2, 3), 9), (Fraction(3, 4), 11)])
def test_n8_settles_above_half(p, t_star):
    report = limiting_order_check(WalkParams(n=8, p=p), 64)
    assert report.t_star == t_star
    assert report.violating_pairs == []


def test_limit_horizon_must_be_positive():
    with pytest.raises(PreconditionError, match="t_max must be >= 1"):
        limiting_order_check(WalkParams(n=4, p=HALF), 0)


def test_detectors_n6_half_pass():
    report = detector_dominance_check(WalkParams(n=6, p=HALF))
    assert report.passed
    assert [w["i"] for w in report.witnesses] == [1, 2, 3]


def test_detectors_n4_half_fail_at_i1():
    report = detector_dominance_check(WalkParams(n=4, p=HALF))
    assert not report.passed
    violation = report.violations[0]
    assert violation["i"] == 1
    assert violation["max_detector"] == "2,2"
    assert violation["max_detector_psi"] == "1/2"
    assert violation["psi"] == "1/3"


def test_hook_identity_n4():
    report = hook_eigenvalue_identity_check(4, HALF)
    assert report.passed
    assert report.rows[0]["direct"] == "1/3"


def test_hook_identity_n6_half_zero_tail():
    report = hook_eigenvalue_identity_check(6, HALF)
    assert report.passed
    assert all(row["direct"] == "0/1" for row in report.rows[2:])


@pytest.mark.parametrize("n", [8, 12, 16])
@pytest.mark.parametrize("p", [Fraction(1, 4), HALF, Fraction(2, 3), Fraction(3, 4)])
def test_hook_identity_passes(n, p):
    assert hook_eigenvalue_identity_check(n, p).passed


@pytest.mark.parametrize("t", range(1, 10))
def test_conjecture_n4_is_n_cycle_deficit(t):
    conj = conjectured_separation(4, t)
    assert conj.exact_value == 3 * Fraction(1, 3) ** t
    assert conj.matches_deficit


def test_conjecture_n4_differs_from_separation():
    conj = conjectured_separation(4, 2)
    exact, argmax = separation(distribution_at_time(WalkParams(n=4, p=HALF), 2))
    assert conj.exact == "1/3"
    assert exact == HALF
    assert str(argmax) == "1:1,3:1"


def test_conjecture_n6_t3():
    conj = conjectured_separation(6, 3)
    assert conj.exact_value == 5 * Fraction(2, 5) ** 3 - 6 * Fraction(1, 10) ** 3
    assert conj.value == pytest.approx(0.314)
    assert conj.decreasing
    assert conj.decreasing_claimed


@pytest.mark.parametrize("n", range(4, 21, 2))
def test_conjecture_terms_decrease(n):
    for t in range(ceil(log2(n - 1)), 25):
        conj = conjectured_separation(n, t)
        assert conj.decreasing
        assert conj.tail_bound_holds


def test_n_cycle_deficit_matches_distribution():
    params = WalkParams(n=6, p=Fraction(2, 3))
    for t in range(1, 6):
        d = distribution_at_time(params, t)
        n_cycle = CycleType.from_cycle_lengths([6], 6)
        assert n_cycle_deficit(6, params.p, t) == 1 - 720 * d.probs[n_cycle]


def test_separation_comparison_rows():
    rows = separation_comparison(4, range(2, 5))
    assert [r["match"] for r in rows] == [False, False, False]
    assert all(r["deficit_match"] for r in rows)
    assert (rows[0]["exact_num"], rows[0]["exact_den"]) == (1, 2)


def test_separation_comparison_n6_reports():
    rows = separation_comparison(6, range(3, 8))
    assert len(rows) == 5
    assert all(isinstance(r["match"], bool) for r in rows)


def test_lemma_thresholds():
    thresholds = lemma_threshold_sweep(HALF, 6)
    assert thresholds["decreasing_two_row"] == 6
    assert thresholds["detector_dominance"] == 6
    assert thresholds["two_row_largest"] == 4
    assert thresholds["balanced_two_row_bound"] == 4
