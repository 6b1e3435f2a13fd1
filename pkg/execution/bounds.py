"""
Mixing-time bounds and the identities behind them.

This is the only module that produces floats. Anything compared against an
exact quantity is compared as a rational first; floats are for display.
"""
from enum import Enum
from fractions import Fraction
from math import comb, e, exp, floor, inf, isfinite, log, sqrt

from pydantic import BaseModel, Field

from config import Hypothesis, PreconditionError, WalkParams, format_rational, parse_rational
from partitions import Partition, dimension
from spectrum import cached_table, eigenvalue_direct


class BoundKind(str, Enum):
    DS_UPPER = "ds-upper"
    ANALYTIC_PSI = "analytic-psi"
    INVUP = "invup"
    WILSON_LOWER = "wilson-lower"
    PARITY_LOWER = "parity-lower"
    INVLB = "invlb"


class BoundReport(BaseModel):
    kind: BoundKind
    value: float
    exact: str | None = None  # "num/den" when the bound is rational
    hypotheses: list[Hypothesis] = Field(default_factory=list)
    witnesses: dict = Field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return all(h.satisfied for h in self.hypotheses)


def _hyp(name: str, satisfied: bool) -> Hypothesis:
    return Hypothesis(name=name, satisfied=bool(satisfied))


def _finite_or_none(x: float) -> float | None:
    return x if isfinite(x) else None


# --- Upper bound lemma ---

def ds_upper_bound_exact(params: WalkParams, t: int, unsafe: bool = False) -> Fraction:
    """(1/4) sum over non-trivial lambda of d_lambda^2 psi_lambda^{2t}."""
    if t < 0:
        raise PreconditionError(f"t must be >= 0, got {t}")
    table = cached_table(params, unsafe)
    trivial = Partition.of(params.n)
    total = sum(
        (dimension(lam) ** 2 * psi ** (2 * t) for lam, psi in table.values.items() if lam != trivial),
        Fraction(0),
    )
    return total / 4


def ds_upper_bound(params: WalkParams, t: int, unsafe: bool = False) -> float:
    return float(ds_upper_bound_exact(params, t, unsafe))


def ds_report(params: WalkParams, t: int, unsafe: bool = False) -> BoundReport:
    exact = ds_upper_bound_exact(params, t, unsafe)
    return BoundReport(
        kind=BoundKind.DS_UPPER,
        value=float(exact),
        exact=format_rational(exact),
        hypotheses=[_hyp("full eigenvalue table available", True)],
        witnesses={"n": params.n, "p": format_rational(params.p), "t": t},
    )


# --- Analytic eigenvalue bounds ---

def _check_i(n: int, i: int) -> None:
    if not 1 <= i <= n // 2:
        raise PreconditionError(f"i must lie in [1, n/2], got i={i}, n={n}")


def analytic_psi_bound(n: int, i: int, p) -> float:
    """Analytic upper bound on psi_[n-i, i]; loose at small n."""
    _check_i(n, i)
    rate = log(2 / (1 + float(parse_rational(p))))
    if 2 * i < n:
        prefactor = e ** 2 * (i + 1) / 2 ** 2.5 * ((n - i) / (n - 2 * i)) ** 1.5
        return exp(-i * rate + log(prefactor))
    return exp(-(n / 2) * rate + log(n ** 1.5 * (n + 2) * e ** 2 / 8))


def small_i_psi_bound(n: int, i: int, p, strict: bool = False, with_prefactor: bool = True) -> float:
    """
    Geometric-series bound (2p)^i C(n/2, i) / (1 - i(i-1)/(2p^2(n-2i+2))).

    With the prefactor (n-i+1)/(C(n,i)(n-2i+1)) it bounds psi_[n-i, i].
    strict=True also enforces i <= p sqrt(n-2i+2).
    """
    _check_i(n, i)
    q = float(parse_rational(p))
    if q <= 0:
        raise PreconditionError("small-i bound needs p > 0")
    if strict and i > q * sqrt(n - 2 * i + 2):
        raise PreconditionError(f"i <= p*sqrt(n-2i+2) fails: {i} > {q * sqrt(n - 2 * i + 2):.4g}")
    denom = 1 - i * (i - 1) / (2 * q ** 2 * (n - 2 * i + 2))
    if denom <= 0:
        raise PreconditionError(
            f"i <= p*sqrt(n-2i+2) fails badly enough that the series diverges (i={i}, n={n}, p={q})"
        )
    series = (2 * q) ** i * comb(n // 2, i) / denom
    if not with_prefactor:
        return series
    return series * (n - i + 1) / (comb(n, i) * (n - 2 * i + 1))


def analytic_bound_sweep(n_values, p) -> list[dict]:
    """Rows (n, i, p, exact, bound, small_i_bound, satisfied) against exact psi_[n-i, i]."""
    q = parse_rational(p)
    rows = []
    for n in n_values:
        params = WalkParams(n=n, p=q)
        previous = None
        for i in range(1, n // 2 + 1):
            exact = eigenvalue_direct(Partition.of(n - i, i), params)
            bound = analytic_psi_bound(n, i, q)
            try:
                small = small_i_psi_bound(n, i, q)
            except PreconditionError:
                small = None
            rows.append({
                "n": n,
                "i": i,
                "p": format_rational(q),
                "exact": format_rational(exact),
                "bound": bound,
                "small_i_bound": small,
                "satisfied": Fraction(bound) >= abs(exact),
                "small_i_satisfied": None if small is None else Fraction(small) >= abs(exact),
                "decreasing_in_i": previous is None or bound <= previous,
            })
            previous = bound
    return rows


# --- Upper mixing time ---

def upper_mixing_bound(params: WalkParams, c: float) -> BoundReport:
    """TV <= e^{-c/2} at t = log_{2/(1+p)} n + c / log(2/(1+p)), under the listed hypotheses."""
    n, p = params.n, float(params.p)
    rate = log(2 / (1 + p))
    t = (log(n) + c) / rate if rate > 0 else inf

    growth = 10 * log(n + 2) / (sqrt((n + 2) / 2) - 1)
    i_max = floor(p * sqrt((n + 2) / 2)) - 1
    if i_max < 1:
        case_two = True
    else:
        case_two = n - 2 * i_max + 1 > 0 and 2 / (n - 2 * i_max + 1) <= p ** 2 * rate ** 2

    return BoundReport(
        kind=BoundKind.INVUP,
        value=exp(-c / 2),
        hypotheses=[
            _hyp("10 log(n+2) / (sqrt((n+2)/2) - 1) <= log(2/(1+p))", growth <= rate),
            _hyp("n - 1 > sqrt(n/2) (1 + log n)", n - 1 > sqrt(n / 2) * (1 + log(n))),
            _hyp("2/(n-2i+1) <= p^2 log(2/(1+p))^2 for small i", case_two),
        ],
        witnesses={"n": n, "p": format_rational(params.p), "c": c, "t": _finite_or_none(t), "i_max": i_max},
    )


# --- Lower bounds ---

def wilson_lower_bound(params: WalkParams, t: int) -> BoundReport:
    """
    Second-moment lower bound from the fixed-point statistic chi_[n-1,1].

    Var under the walk uses chi_[n-1,1]^2 = chi_[n] + chi_[n-1,1] + chi_[n-2,2] + chi_[n-2,1,1].
    """
    n = params.n
    if n < 4:
        raise PreconditionError(f"n must be >= 4, got {n}")
    if t < 0:
        raise PreconditionError(f"t must be >= 0, got {t}")

    psi1 = eigenvalue_direct(Partition.of(n - 1, 1), params)
    psi2 = eigenvalue_direct(Partition.of(n - 2, 2), params)
    psi3 = eigenvalue_direct(Partition.of(n - 2, 1, 1), params)

    mean = (n - 1) * psi1 ** t
    var_walk = (
        1
        + (n - 1) * psi1 ** t
        + Fraction(n * (n - 3), 2) * psi2 ** t
        + Fraction((n - 1) * (n - 2), 2) * psi3 ** t
        - mean ** 2
    )
    sigma2 = (var_walk + 1) / 2
    r2 = mean ** 2 / sigma2
    value = r2 / (4 + r2)

    return BoundReport(
        kind=BoundKind.WILSON_LOWER,
        value=float(value),
        exact=format_rational(value),
        hypotheses=[_hyp("n >= 4", True), _hyp("variance from exact eigenvalues", True)],
        witnesses={
            "t": t,
            "mean": format_rational(mean),
            "var_walk": format_rational(var_walk),
            "sigma2": format_rational(sigma2),
            "r2": format_rational(r2),
        },
    )


def analytic_lower_bound(params: WalkParams, t: int) -> BoundReport:
    """
    Closed-form version of the second-moment bound: with e^c = (n-1) p^t and
    A = (1 - (1/p - 1)/(n-1))^t, TV >= 1 - 1/(1 + A^2 e^{2c} - 2/(4 + A e^c)).
    """
    n, p = params.n, float(params.p)
    if not 0 < p < 1:
        raise PreconditionError(f"p must lie strictly between 0 and 1, got {format_rational(params.p)}")
    if n < 4:
        raise PreconditionError(f"n must be >= 4, got {n}")

    c = log(n - 1) + t * log(p)
    a = (1 - (1 / p - 1) / (n - 1)) ** t
    raw = 1 - 1 / (1 + a ** 2 * exp(2 * c) - 2 / (4 + a * exp(c)))
    c_max = 0.5 * (log(n) - log(log(n)) + log(2 * (1 - p) / p))

    return BoundReport(
        kind=BoundKind.INVLB,
        value=min(max(raw, 0.0), 1.0),
        hypotheses=[
            _hyp("p >= 1/2", params.p >= Fraction(1, 2)),
            _hyp("n >= 4", True),
            _hyp("c <= (log n - log log n + log(2(1-p)/p)) / 2", c <= c_max),
            _hyp("1 - log(n)/n <= A <= 1", 1 - log(n) / n <= a <= 1),
        ],
        witnesses={"t": t, "c": c, "c_max": c_max, "A": a, "raw": raw},
    )


def parity_gap_exact(params: WalkParams, t: int) -> Fraction:
    """E chi_[1^n] after t steps: (2p-1)^{tn/2}."""
    return (2 * params.p - 1) ** (t * params.half)


def parity_lower_bound_exact(params: WalkParams, t: int) -> Fraction:
    if t % 2:
        raise PreconditionError(f"t must be even, got {t}")
    if params.p > Fraction(1, 2):
        return Fraction(0)
    return (1 - 2 * params.p) ** (t * params.half) / 2


def parity_lower_bound(params: WalkParams, t: int) -> float:
    """(1/2)(1-2p)^{tn/2} for p <= 1/2, else 0; t must be even."""
    return float(parity_lower_bound_exact(params, t))


def parity_report(params: WalkParams, t: int) -> BoundReport:
    exact = parity_lower_bound_exact(params, t)
    n, p = params.n, params.p
    small_p = p <= Fraction(1, 4) and (p == 0 or t <= Fraction(1, n * n * p))
    floor_value = Fraction(1, 2) - Fraction(1, n)
    return BoundReport(
        kind=BoundKind.PARITY_LOWER,
        value=float(exact),
        exact=format_rational(exact),
        hypotheses=[
            _hyp("t even", True),
            _hyp("p <= 1/2", p <= Fraction(1, 2)),
            _hyp("p <= 1/4 and t <= 1/(n^2 p)", small_p),
        ],
        witnesses={
            "t": t,
            "parity_gap": format_rational(parity_gap_exact(params, t)),
            "small_p_floor": format_rational(floor_value),
            "small_p_floor_holds": (exact >= floor_value) if small_p else None,
        },
    )


# --- Two-part split identity ---

class SeaworldReport(BaseModel):
    n: int
    i: int
    p: str
    rhs: str
    variant_a: str
    variant_b: str
    a_matches: bool
    b_matches: bool


def _binom(m: int, k: int) -> int:
    return comb(m, k) if 0 <= k <= m else 0


def _multinomial(total: int, *parts: int) -> int:
    if any(x < 0 for x in parts) or sum(parts) != total:
        return 0
    out = 1
    rest = total
    for x in parts:
        out *= comb(rest, x)
        rest -= x
    return out


def verify_seaworld(n: int, i: int, p) -> SeaworldReport:
    """
    Both forms of the split sum over (j1, j2) against
    sum_j 2^j p^{-(n/2-j)} multinomial(n/2; j, (n-i-j)/2, (i-j)/2).
    """
    if n % 2 or n < 2:
        raise PreconditionError(f"n must be even and >= 2, got {n}")
    if not 0 <= i <= n // 2:
        raise PreconditionError(f"i must lie in [0, n/2], got i={i}, n={n}")
    q = parse_rational(p)
    if not 0 < q <= 1:
        raise PreconditionError(f"p must lie in (0, 1], got {format_rational(q)}")

    half = n // 2
    ratio = (1 - q) / q
    variant_a = variant_b = Fraction(0)
    for j1 in range(half + 1):
        for j2 in range(half - j1 + 1):
            weight = ratio ** (j1 + j2) * _multinomial(half, j1, j2, half - j1 - j2)
            rest = n - 2 * j1 - 2 * j2
            variant_a += weight * _binom(rest, i - 2 * j2)
            variant_b += weight * _binom(rest, i - 2 * j1 - 2 * j2)

    rhs = Fraction(0)
    for j in range(i + 1):
        if (i - j) % 2 or (n - i - j) % 2:
            continue
        rhs += 2 ** j * q ** (j - half) * _multinomial(half, j, (n - i - j) // 2, (i - j) // 2)

    return SeaworldReport(
        n=n,
        i=i,
        p=format_rational(q),
        rhs=format_rational(rhs),
        variant_a=format_rational(variant_a),
        variant_b=format_rational(variant_b),
        a_matches=variant_a == rhs,
        b_matches=variant_b == rhs,
    )
