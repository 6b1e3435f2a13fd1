from fractions import Fraction
from math import e

import pytest

from bounds import (
    BoundKind,
    analytic_bound_sweep,
    analytic_lower_bound,
    analytic_psi_bound,
    ds_report,
    ds_upper_bound,
    ds_upper_bound_exact,
    parity_gap_exact,
    parity_lower_bound,
    parity_lower_bound_exact,
    parity_report,
    small_i_psi_bound,
    upper_mixing_bound,
    verify_seaworld,
    wilson_lower_bound,
)
from config import PreconditionError, WalkParams
from conftest import P_GRID
from walk_dist import distribution_at_time, total_variation

HALF = Fraction(1, 2)


@pytest.mark.parametrize("n", [2, 4, 6])
@pytest.mark.parametrize("p", P_GRID)
def test_upper_bound_lemma_dominates_tv_squared(n, p):
    params = WalkParams(n=n, p=p)
    for t in range(13):
        tv = total_variation(distribution_at_time(params, t))
        assert ds_upper_bound_exact(params, t) >= tv ** 2


@pytest.mark.parametrize("p", P_GRID)
def test_upper_bound_lemma_tight_at_n2(p):
    params = WalkParams(n=2, p=p)
    for t in range(8):
        tv = total_variation(distribution_at_time(params, t))
        assert ds_upper_bound_exact(params, t) == tv ** 2


def test_ds_report_fields():
    report = ds_report(WalkParams(n=4, p=HALF), 2)
    assert report.kind is BoundKind.DS_UPPER
    assert report.exact == "13/144"
    assert report.certified
    assert ds_upper_bound(WalkParams(n=4, p=HALF), 2) == report.value


def test_wilson_n4_t1_is_one_seventh():
    report = wilson_lower_bound(WalkParams(n=4, p=HALF), 1)
    assert report.exact == "1/7"
    assert report.witnesses["mean"] == "1/1"
    assert report.witnesses["var_walk"] == "2/1"


@pytest.mark.parametrize("n", [4, 6])
@pytest.mark.parametrize("p", [HALF, Fraction(3, 4)])
def test_wilson_below_exact_tv(n, p):
    params = WalkParams(n=n, p=p)
    for t in range(9):
        report = wilson_lower_bound(params, t)
        assert Fraction(report.exact) <= total_variation(distribution_at_time(params, t))


def test_wilson_needs_n4():
    with pytest.raises(PreconditionError):
        wilson_lower_bound(WalkParams(n=2, p=HALF), 1)


def test_parity_example():
    assert parity_lower_bound_exact(WalkParams(n=4, p=Fraction(1, 10)), 2) == Fraction(128, 625)
    assert parity_lower_bound(WalkParams(n=4, p=Fraction(1, 10)), 2) == pytest.approx(0.2048)


def test_parity_zero_above_half():
    assert parity_lower_bound(WalkParams(n=6, p=Fraction(3, 4)), 4) == 0


def test_parity_rejects_odd_t():
    with pytest.raises(PreconditionError):
        parity_lower_bound(WalkParams(n=4, p=Fraction(1, 4)), 3)


@pytest.mark.parametrize("n", [2, 4, 6])
@pytest.mark.parametrize("p", [Fraction(0), Fraction(1, 10), Fraction(1, 4)])
def test_parity_below_exact_tv(n, p):
    params = WalkParams(n=n, p=p)
    for t in range(0, 11, 2):
        assert parity_lower_bound_exact(params, t) <= total_variation(distribution_at_time(params, t))


def test_parity_gap_exact():
    assert parity_gap_exact(WalkParams(n=4, p=Fraction(3, 4)), 2) == Fraction(1, 16)


def test_parity_small_p_floor():
    report = parity_report(WalkParams(n=4, p=Fraction(1, 40)), 2)
    assert report.hypotheses[2].satisfied
    assert report.witnesses["small_p_floor_holds"] is True

    report = parity_report(WalkParams(n=4, p=Fraction(1, 4)), 2)
    assert not report.hypotheses[2].satisfied
    assert report.witnesses["small_p_floor_holds"] is None


def test_analytic_bound_examples():
    assert analytic_psi_bound(4, 2, HALF) == pytest.approx(Fraction(9, 16) * 6 * e ** 2)
    value = analytic_psi_bound(100, 1, HALF)
    expected = e ** 2 * 2 / 2 ** 2.5 * (99 / 98) ** 1.5 * 0.75
    assert value == pytest.approx(expected)


def test_analytic_bound_rejects_bad_i():
    with pytest.raises(PreconditionError):
        analytic_psi_bound(8, 5, HALF)
    with pytest.raises(PreconditionError):
        analytic_psi_bound(8, 0, HALF)


def test_small_i_bound_guard():
    value = small_i_psi_bound(16, 2, HALF)
    assert value == pytest.approx(28 * 7 / 5 * 15 / (120 * 13))
    with pytest.raises(PreconditionError):
        small_i_psi_bound(16, 8, HALF)
    with pytest.raises(PreconditionError):
        small_i_psi_bound(16, 2, HALF, strict=True)


def test_small_i_bound_without_prefactor():
    assert small_i_psi_bound(100, 1, HALF, with_prefactor=False) == pytest.approx(50)
    assert small_i_psi_bound(100, 1, HALF) == pytest.approx(50 / 99)


def test_analytic_sweep_rows_hold():
    rows = analytic_bound_sweep([8, 12], HALF)
    assert [(r["n"], r["i"]) for r in rows][:4] == [(8, 1), (8, 2), (8, 3), (8, 4)]
    assert all(r["satisfied"] for r in rows)
    assert all(r["small_i_satisfied"] in (True, None) for r in rows)


def test_invup_hypotheses_fail_at_small_n():
    report = upper_mixing_bound(WalkParams(n=8, p=HALF), 0.0)
    assert report.value == 1.0
    assert not report.hypotheses[0].satisfied
    assert not report.certified


def test_invup_lazy_limit():
    report = upper_mixing_bound(WalkParams(n=8, p=1), 2.0)
    assert report.witnesses["t"] is None
    assert report.value == pytest.approx(e ** -1)


def test_invup_i_max_vacuous():
    report = upper_mixing_bound(WalkParams(n=2, p=1), 0.0)
    assert report.witnesses["i_max"] == 0
    assert report.hypotheses[2].satisfied


def test_invlb_report():
    report = analytic_lower_bound(WalkParams(n=10, p=Fraction(3, 4)), 2)
    assert report.kind is BoundKind.INVLB
    assert 0 <= report.value <= 1
    assert report.hypotheses[0].satisfied
    assert report.witnesses["A"] <= 1


def test_invlb_rejects_degenerate_p():
    with pytest.raises(PreconditionError):
        analytic_lower_bound(WalkParams(n=10, p=1), 2)


def test_seaworld_n4_cell():
    report = verify_seaworld(4, 2, HALF)
    assert (report.rhs, report.variant_a, report.variant_b) == ("12/1", "12/1", "10/1")
    assert report.a_matches
    assert not report.b_matches


@pytest.mark.parametrize("n", range(2, 21, 2))
@pytest.mark.parametrize("p", [Fraction(1, 4), HALF, Fraction(3, 4)])
def test_seaworld_variant_a_exact(n, p):
    for i in range(n // 2 + 1):
        assert verify_seaworld(n, i, p).a_matches


def test_seaworld_rejects_p_zero():
    with pytest.raises(PreconditionError):
        verify_seaworld(4, 1, 0)


def test_bound_report_json():
    data = wilson_lower_bound(WalkParams(n=4, p=HALF), 1).model_dump(mode="json")
    assert data["kind"] == "wilson-lower"
    assert data["hypotheses"][0] == {"name": "n >= 4", "satisfied": True}

