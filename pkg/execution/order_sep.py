"""
Likelihood orders of the involution walk and its separation distance.

A likelihood order ranks conjugacy classes by the per-element probability
P^{*t}(g). The walk is expected to settle into cycle-lexicographic order;
these checks measure when (and whether) that happens, exactly.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, log2

from pydantic import BaseModel, Field

from config import PreconditionError, WalkParams, format_rational, get_default
from partitions import CycleType, Partition, cycle_lex_key, enumerate_partitions, is_i_cycle_detector
from spectrum import (
    cached_table,
    eigenvalue_direct,
    hook_eigenvalue_charpoly,
    hook_eigenvalue_half,
    hook_eigenvalue_paths,
    verify_monotonicity,
)
from walk_dist import distribution_at_time, separation

HALF = Fraction(1, 2)


# --- Likelihood order ---

@dataclass
class LikelihoodOrder:
    t: int
    ranked: list[tuple[CycleType, Fraction]]
    ties: list[list[CycleType]] = field(default_factory=list)

    @property
    def classes(self) -> list[CycleType]:
        return [alpha for alpha, _ in self.ranked]

    def violations(self, strict: bool = False) -> list[tuple[CycleType, CycleType]]:
        """
        Pairs (a, b) with a above b in cycle-lex order but not more likely.
        Equal probabilities only count when strict=True.
        """
        prob = dict(self.ranked)
        out = []
        for a, b in combinations(sorted(prob, key=cycle_lex_key, reverse=True), 2):
            if prob[a] < prob[b] or (strict and prob[a] == prob[b]):
                out.append((a, b))
        return out

    def matches_cycle_lex(self, strict: bool = False) -> bool:
        return not self.violations(strict)

    def to_json_dict(self) -> dict:
        return {
            "t": self.t,
            "ranked": [{"class": str(a), "prob": format_rational(q)} for a, q in self.ranked],
            "ties": [[str(a) for a in group] for group in self.ties],
        }


def likelihood_order(params: WalkParams, t: int, unsafe: bool = False) -> LikelihoodOrder:
    """Exact ranking of all classes at time t; ties broken cycle-lex descending."""
    d = distribution_at_time(params, t, unsafe)
    ranked = sorted(d.probs.items(), key=lambda kv: (-kv[1], tuple(-m for m in cycle_lex_key(kv[0]))))

    ties, group = [], [ranked[0][0]]
    for (_, prev), (alpha, q) in zip(ranked, ranked[1:]):
        if q == prev:
            group.append(alpha)
            continue
        if len(group) > 1:
            ties.append(group)
        group = [alpha]
    if len(group) > 1:
        ties.append(group)

    return LikelihoodOrder(t=t, ranked=ranked, ties=ties)


def _pair_strings(pairs) -> list[tuple[str, str]]:
    return [(str(a), str(b)) for a, b in pairs]


class LimitingOrderReport(BaseModel):
    n: int
    p: str
    t_max: int
    t_star: int | None
    claim_applies: bool
    holds_at_all_times: bool
    violating_pairs: list[tuple[str, str]] = Field(default_factory=list)
    early_violations: dict[int, list[tuple[str, str]]] = Field(default_factory=dict)


def limiting_order_check(params: WalkParams, t_max: int | None = None, unsafe: bool = False) -> LimitingOrderReport:
    """
    Smallest t* <= t_max such that the likelihood order is cycle-lex on [t*, t_max].

    t* is measured, not certified. violating_pairs are those still inverted at t_max.
    """
    if t_max is None:
        t_max = int(get_default("t_max", 64))
    if t_max < 1:
        raise PreconditionError(f"t_max must be >= 1, got {t_max}")

    per_t = {t: likelihood_order(params, t, unsafe).violations() for t in range(1, t_max + 1)}

    t_star = None
    for t in range(t_max, 0, -1):
        if per_t[t]:
            break
        t_star = t

    return LimitingOrderReport(
        n=params.n,
        p=format_rational(params.p),
        t_max=t_max,
        t_star=t_star,
        claim_applies=params.p >= HALF,
        holds_at_all_times=t_star == 1,
        violating_pairs=_pair_strings(per_t[t_max]),
        early_violations={t: _pair_strings(v) for t, v in per_t.items() if v},
    )


# --- Detector dominance ---

class DetectorReport(BaseModel):
    n: int
    p: str
    claim_applies: bool
    passed: bool
    witnesses: list[dict] = Field(default_factory=list)
    violations: list[dict] = Field(default_factory=list)


def detector_dominance_check(params: WalkParams, unsafe: bool = False) -> DetectorReport:
    """|psi_[n-i, i]| against every other i-cycle detector, for i = 1..n/2."""
    n = params.n
    table = cached_table(params, unsafe)
    witnesses, violations = [], []
    for i in range(1, n // 2 + 1):
        own = abs(table[Partition.of(n - i, i)])
        rivals = [
            (abs(table[lam]), lam)
            for lam in enumerate_partitions(n)
            if lam.parts != (n - i, i) and is_i_cycle_detector(lam, i)
        ]
        best, best_lam = max(rivals, key=lambda r: r[0], default=(Fraction(0), None))
        row = {
            "i": i,
            "psi": format_rational(own),
            "max_detector": str(best_lam) if best_lam else None,
            "max_detector_psi": format_rational(best),
        }
        witnesses.append(row)
        if best > own:
            violations.append(row)

    return DetectorReport(
        n=n,
        p=format_rational(params.p),
        claim_applies=params.p >= HALF,
        passed=not violations,
        witnesses=witnesses,
        violations=violations,
    )


# --- Hook eigenvalues ---

class HookIdentityReport(BaseModel):
    n: int
    p: str
    passed: bool
    rows: list[dict] = Field(default_factory=list)


def hook_eigenvalue_identity_check(n: int, p) -> HookIdentityReport:
    """Path count, character polynomial and direct eigenvalue agree on every hook [n-i, 1^i]."""
    params = WalkParams(n=n, p=p)
    q = params.p
    rows, passed = [], True
    for i in range(1, n):
        paths = hook_eigenvalue_paths(n, i, q)
        charpoly = hook_eigenvalue_charpoly(n, i, q)
        direct = eigenvalue_direct(Partition.of(n - i, *([1] * i)), params)
        agree = paths == charpoly == direct
        if q == HALF:
            agree = agree and direct == hook_eigenvalue_half(n, i)
        passed = passed and agree
        rows.append({
            "i": i,
            "paths": format_rational(paths),
            "charpoly": format_rational(charpoly),
            "direct": format_rational(direct),
            "agree": agree,
        })
    return HookIdentityReport(n=n, p=format_rational(q), passed=passed, rows=rows)


# --- Separation ---

def n_cycle_deficit(n: int, p, t: int) -> Fraction:
    """1 - n! P^{*t}(n-cycle), from hook eigenvalues only."""
    if n % 2 or n < 2:
        raise PreconditionError(f"n must be even and >= 2, got {n}")
    q = WalkParams(n=n, p=p).p
    return sum(
        ((-1) ** (i + 1) * comb(n - 1, i) * hook_eigenvalue_charpoly(n, i, q) ** t for i in range(1, n)),
        Fraction(0),
    )


class ConjecturedSeparation(BaseModel):
    n: int
    t: int
    value: float
    exact: str
    terms: list[str]
    decreasing: bool
    decreasing_claimed: bool
    tail_bound_holds: bool | None
    n_cycle_deficit: str
    matches_deficit: bool

    @property
    def exact_value(self) -> Fraction:
        return Fraction(self.exact)


def conjectured_separation(n: int, t: int) -> ConjecturedSeparation:
    """
    sum_{i=1}^{floor((n-1)/2)} (-1)^{i+1} C(n-i, i) (C(n/2-1, i)/C(n-1, i))^t at p = 1/2.

    Alongside: whether term magnitudes decrease (claimed once t >= log2(n-1)),
    whether the value sits under 2^{-(t - log2 n)}, and the exact n-cycle deficit.
    """
    if n % 2 or n < 2:
        raise PreconditionError(f"n must be even and >= 2, got {n}")
    if t < 1:
        raise PreconditionError(f"t must be >= 1, got {t}")

    magnitudes = [comb(n - i, i) * hook_eigenvalue_half(n, i) ** t for i in range(1, (n - 1) // 2 + 1)]
    value = sum(((-1) ** (i + 1) * m for i, m in enumerate(magnitudes, start=1)), Fraction(0))
    deficit = n_cycle_deficit(n, HALF, t)

    claimed = n > 2 and t >= log2(n - 1)
    return ConjecturedSeparation(
        n=n,
        t=t,
        value=float(value),
        exact=format_rational(value),
        terms=[format_rational(m) for m in magnitudes],
        decreasing=all(b <= a for a, b in zip(magnitudes, magnitudes[1:])),
        decreasing_claimed=claimed,
        tail_bound_holds=(value <= Fraction(n, 2 ** t)) if claimed else None,
        n_cycle_deficit=format_rational(deficit),
        matches_deficit=value == deficit,
    )


def separation_comparison(n: int, t_values, unsafe: bool = False) -> list[dict]:
    """Conjectured value against the exact separation at p = 1/2, one row per t."""
    params = WalkParams(n=n, p=HALF)
    rows = []
    for t in t_values:
        conj = conjectured_separation(n, t)
        exact, argmax = separation(distribution_at_time(params, t, unsafe))
        rows.append({
            "n": n,
            "t": t,
            "conjectured": conj.value,
            "exact_num": exact.numerator,
            "exact_den": exact.denominator,
            "match": conj.exact_value == exact,
            "argmax": str(argmax),
            "deficit_match": conj.matches_deficit,
        })
    return rows


# --- Threshold sweep ---

THRESHOLD_CHECKS = ("decreasing_two_row", "two_row_largest", "balanced_two_row_bound", "detector_dominance")


def lemma_threshold_sweep(p, n_max: int, unsafe: bool = False) -> dict[str, int | None]:
    """
    For each check, the smallest even n0 >= 4 such that it passes for every even n in [n0, n_max].
    None when it fails at n_max.
    """
    if n_max < 4:
        raise PreconditionError(f"n_max must be >= 4, got {n_max}")
    outcomes: dict[int, dict[str, bool]] = {}
    for n in range(4, n_max + 1, 2):
        params = WalkParams(n=n, p=p)
        report = verify_monotonicity(params, cached_table(params, unsafe))
        outcomes[n] = {
            "decreasing_two_row": report.decreasing_two_row.passed,
            "two_row_largest": report.two_row_largest.passed,
            "balanced_two_row_bound": report.balanced_two_row_bound.passed,
            "detector_dominance": detector_dominance_check(params, unsafe).passed,
        }

    thresholds = {}
    for name in THRESHOLD_CHECKS:
        n0 = None
        for n in range(n_max - n_max % 2, 3, -2):
            if not outcomes[n][name]:
                break
            n0 = n
        thresholds[name] = n0
    return thresholds

