from collections import Counter
from fractions import Fraction
from math import comb, factorial, sqrt

import pytest

from config import CapExceededError, PreconditionError, WalkParams
from conftest import P_GRID
from partitions import CycleType, Partition, class_size
from walk_dist import (
    ClassDistribution,
    _structure_counts_characters,
    _structure_counts_enumerated,
    convolution_oracle,
    distribution_at_time,
    generator_distribution,
    monte_carlo_estimate,
    monte_carlo_estimate_async,
    parity_gap,
    permutation_cycle_type,
    sample_generator,
    separation,
    total_variation,
)

HALF = Fraction(1, 2)


def cls(text: str, n: int = 4) -> CycleType:
    return CycleType.parse(text, n)


def test_generator_masses():
    gen = generator_distribution(WalkParams(n=4, p=HALF))
    assert gen.mass(cls("1:4")) == Fraction(1, 4)
    assert gen.mass(cls("1:2,2:1")) == HALF
    assert gen.mass(cls("2:2")) == Fraction(1, 4)
    assert gen.total() == 1


def test_time_zero_is_point_mass():
    d = distribution_at_time(WalkParams(n=6, p=Fraction(1, 3)), 0)
    assert d == ClassDistribution.point_mass(6)


def test_time_one_is_generator():
    params = WalkParams(n=6, p=Fraction(3, 4))
    assert distribution_at_time(params, 1).probs == generator_distribution(params).probs


@pytest.mark.parametrize("t", [2, 3, 5, 12])
def test_n4_half_class_probabilities(t):
    d = distribution_at_time(WalkParams(n=4, p=HALF), t)
    a, b = Fraction(3) ** (1 - t), Fraction(2) ** (1 - t)
    assert d.probs[cls("1:4")] == (1 + 3 * a + 2 * b) / 24
    assert d.probs[cls("1:2,2:1")] == (1 + a) / 24
    assert d.probs[cls("2:2")] == (1 - a + 2 * b) / 24
    assert d.probs[cls("1:1,3:1")] == (1 - b) / 24
    assert d.probs[cls("4:1")] == (1 - a) / 24


@pytest.mark.parametrize("n", [2, 4, 6])
@pytest.mark.parametrize("p", P_GRID)
def test_fourier_matches_convolution(n, p):
    params = WalkParams(n=n, p=p)
    for t in range(7):
        assert distribution_at_time(params, t).probs == convolution_oracle(params, t).probs


def test_structure_counts_two_ways():
    assert _structure_counts_enumerated(4) == _structure_counts_characters(4)


@pytest.mark.parametrize("p", P_GRID)
def test_distributions_are_probability_vectors(p):
    d = distribution_at_time(WalkParams(n=6, p=p), 4)
    assert d.total() == 1
    assert all(q >= 0 for q in d.probs.values())


def test_exact_distribution_cap():
    with pytest.raises(CapExceededError):
        distribution_at_time(WalkParams(n=10, p=HALF), 1)
    distribution_at_time(WalkParams(n=10, p=HALF), 1, unsafe=True)


def test_negative_time_rejected():
    with pytest.raises(PreconditionError):
        distribution_at_time(WalkParams(n=4, p=HALF), -1)


def test_total_variation_n4_t1():
    assert total_variation(distribution_at_time(WalkParams(n=4, p=HALF), 1)) == Fraction(7, 12)


def test_total_variation_uniform_is_zero():
    assert total_variation(ClassDistribution.uniform(6)) == 0


def test_separation_n4_half():
    value, argmax = separation(distribution_at_time(WalkParams(n=4, p=HALF), 2))
    assert value == HALF
    assert argmax == cls("1:1,3:1")


def test_separation_at_time_one_hits_non_involutions():
    value, argmax = separation(distribution_at_time(WalkParams(n=4, p=HALF), 1))
    assert value == 1
    # (3,1) and (4) both have probability 0; the cycle-lex-least one wins
    assert argmax == cls("4:1")


@pytest.mark.parametrize("n", [2, 4, 6])
@pytest.mark.parametrize("p", P_GRID)
def test_parity_gap_closed_form(n, p):
    params = WalkParams(n=n, p=p)
    for t in range(11):
        assert parity_gap(distribution_at_time(params, t)) == (2 * params.p - 1) ** (t * n // 2)


def test_expectation_is_dimension_times_psi_power():
    params = WalkParams(n=4, p=HALF)
    d = distribution_at_time(params, 3)
    assert d.expectation(Partition.of(3, 1)) == 3 * Fraction(1, 3) ** 3


def test_permutation_cycle_type():
    assert permutation_cycle_type((1, 2, 0, 3)) == cls("1:1,3:1")
    assert permutation_cycle_type((1, 0, 3, 2)) == cls("2:2")


def test_sample_generator_reproducible():
    params = WalkParams(n=8, p=HALF)
    a, b = sample_generator(params, 11), sample_generator(params, 11)
    assert a == b
    assert sorted(a.as_permutation()) == list(range(1, 9))
    assert a.cycle_type() == CycleType.involution(8, a.s)


def test_sample_generator_extremes():
    assert sample_generator(WalkParams(n=6, p=1), 3).s == 0
    assert sample_generator(WalkParams(n=6, p=0), 3).s == 3


def test_seed_range():
    with pytest.raises(PreconditionError):
        sample_generator(WalkParams(n=4, p=HALF), -1)


def test_csv_rows_carry_exact_parts():
    rows = distribution_at_time(WalkParams(n=4, p=HALF), 1).csv_rows()
    first = rows[0]
    assert first["class"] == "1:4"
    assert (first["prob_num"], first["prob_den"]) == (1, 4)
    assert first["class_size"] == class_size(cls("1:4"))


@pytest.mark.parametrize("n,t", [(4, 3), (6, 2)])
def test_monte_carlo_within_four_sigma(n, t):
    params = WalkParams(n=n, p=HALF)
    exact = distribution_at_time(params, t)
    estimate = monte_carlo_estimate(params, t, samples=100_000, seed=2024)
    assert sum(estimate.counts.values()) == 100_000
    assert max(abs(z) for z in estimate.z_scores(exact).values()) < 4


def test_monte_carlo_reproducible():
    params = WalkParams(n=6, p=HALF)
    a = monte_carlo_estimate(params, 3, samples=5000, seed=9, block_size=1000)
    b = monte_carlo_estimate(params, 3, samples=5000, seed=9, block_size=1000, workers=1)
    assert a.counts == b.counts


@pytest.mark.asyncio
async def test_monte_carlo_async_identity_walk():
    params = WalkParams(n=4, p=1)
    estimate = await monte_carlo_estimate_async(params, 5, samples=300, seed=1, block_size=128)
    assert estimate.counts["1:4"] == 300
    assert estimate.distribution.probs[cls("1:4")] == 1


def test_monte_carlo_rejects_zero_samples():
    with pytest.raises(PreconditionError):
        monte_carlo_estimate(WalkParams(n=4, p=HALF), 1, samples=0, seed=0)


def test_uniform_distribution_total():
    assert ClassDistribution.uniform(5).total() == 1
    assert ClassDistribution.uniform(5).probs[CycleType.involution(5, 0)] == Fraction(1, factorial(5))


@pytest.mark.parametrize("n", [4, 6])
@pytest.mark.parametrize("p", P_GRID)
def test_distances_shrink_and_separation_dominates(n, p):
    params = WalkParams(n=n, p=p)
    dists = [distribution_at_time(params, t) for t in range(11)]
    tv = [total_variation(d) for d in dists]
    assert all(later <= earlier for earlier, later in zip(tv, tv[1:]))
    for d, distance in zip(dists, tv):
        assert separation(d)[0] >= distance


@pytest.mark.parametrize("t", [1, 2, 3])
def test_fourier_matches_convolution_n8(t):
    params = WalkParams(n=8, p=Fraction(2, 3))
    assert distribution_at_time(params, t).probs == convolution_oracle(params, t).probs


def test_sample_generator_kept_pairs_are_binomial():
    params, samples = WalkParams(n=8, p=Fraction(1, 3)), 100_000
    counts = Counter(sample_generator(params, seed).s for seed in range(samples))
    keep = 1 - float(params.p)
    for s in range(params.half + 1):
        expected = comb(params.half, s) * keep ** s * (1 - keep) ** (params.half - s)
        sigma = sqrt(expected * (1 - expected) / samples)
        assert abs(counts[s] / samples - expected) < 5 * sigma
