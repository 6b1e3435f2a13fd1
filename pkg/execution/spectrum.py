"""
Walk eigenvalues psi_lambda.

Three independent routes:
- direct: average of character ratios over the generator's involution classes
- recursive: peel a domino (or two separated corners) and recurse on the n-2 walk
- closed forms for [n], [n-1,1], [n-2,2], [n-2,1,1], [1^n] and hooks

plus the coefficient-sum identity, full tables and the monotonicity checks.
"""
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from pydantic import BaseModel, ConfigDict, Field

from characters import CharacterTable, involution_character, poly_binomial, transposition_character_ratio
from config import IdentityCheckError, PreconditionError, WalkParams, check_cap, format_rational, parse_rational
from partitions import (
    Partition,
    RemovalKind,
    borderstrip_removals,
    dimension,
    enumerate_partitions,
    majorization_covers,
)

HALF = Fraction(1, 2)


class EigenvalueTable(BaseModel):
    """psi_lambda for every partition of n at fixed (n, p)."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    params: WalkParams
    values: dict = Field(default_factory=dict)  # Partition -> Fraction

    def __getitem__(self, lam: Partition) -> Fraction:
        return self.values[lam]

    def to_json_dict(self) -> dict:
        return {
            "n": self.params.n,
            "p": format_rational(self.params.p),
            "psi": {str(lam): format_rational(v) for lam, v in self.values.items()},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "EigenvalueTable":
        params = WalkParams(n=int(data["n"]), p=data["p"])
        values = {}
        for key, v in data["psi"].items():
            lam = Partition.parse(key)
            if lam.n != params.n:
                raise PreconditionError(f"partition {key} is not a partition of {params.n}")
            values[lam] = parse_rational(v)
        return cls(params=params, values=values)

    def check_invariants(self) -> None:
        """
        Every partition of n present, psi_[n] = 1, |psi| <= 1, agreement with the
        closed forms, and sum_lambda d_lambda^2 psi_lambda = n! p^{n/2} (the mass
        one step puts on the identity).
        """
        n, p = self.params.n, self.params.p
        missing = set(enumerate_partitions(n)) - set(self.values)
        if missing:
            raise IdentityCheckError(f"table for n={n} is missing {len(missing)} partitions")
        if self.values[Partition.of(n)] != 1:
            raise IdentityCheckError(f"psi_[{n}] must be 1")
        for lam, v in self.values.items():
            if abs(v) > 1:
                raise IdentityCheckError(f"|psi_{lam!r}| = {v} exceeds 1")
            closed = eigenvalue_closed_form(lam, self.params)
            if closed is not None and closed != v:
                raise IdentityCheckError(f"psi_{lam!r} = {v} but the closed form gives {closed}")
        mass = sum((dimension(lam) ** 2 * v for lam, v in self.values.items()), Fraction(0))
        if mass != factorial(n) * p ** self.params.half:
            raise IdentityCheckError(f"sum d^2 psi = {mass}, expected {factorial(n)} p^{self.params.half}")


def _check_shape(lam: Partition, params: WalkParams) -> None:
    if lam.n != params.n:
        raise PreconditionError(f"size mismatch: partition of {lam.n} vs walk on S_{params.n}")


# --- Direct ---

def eigenvalue_direct(lam: Partition, params: WalkParams, table: CharacterTable | None = None) -> Fraction:
    """sum_s p^{n/2-s} (1-p)^s C(n/2, s) chi_lambda(1^{n-2s}, 2^s) / d_lambda."""
    _check_shape(lam, params)
    p, half = params.p, params.half
    chi = table.involution_value if table else involution_character
    total = sum(
        p ** (half - s) * (1 - p) ** s * comb(half, s) * chi(lam, s)
        for s in range(half + 1)
    )
    return Fraction(total) / dimension(lam)


# --- Recursive ---

def removal_weight(kind: RemovalKind, p: Fraction) -> Fraction:
    if kind is RemovalKind.HORIZONTAL_DOMINO:
        return Fraction(1)
    if kind is RemovalKind.VERTICAL_DOMINO:
        return 2 * p - 1
    if kind is RemovalKind.DISCONNECTED_PAIR:
        return 2 * p
    raise PreconditionError(f"no recursion weight for {kind.value}")


@lru_cache(maxsize=None)
def _psi_recursive(parts: tuple[int, ...], p: Fraction) -> Fraction:
    if parts == (2,):
        return Fraction(1)
    if parts == (1, 1):
        return 2 * p - 1
    if not parts:
        return Fraction(1)

    lam = Partition(parts)
    total = Fraction(0)
    for removal in borderstrip_removals(lam, 2):
        rho = removal.result
        total += removal_weight(removal.kind, p) * _psi_recursive(rho.parts, p) * dimension(rho)
    return total / dimension(lam)


def eigenvalue_recursive(lam: Partition, params: WalkParams) -> Fraction:
    """Recursion on the n-2 walk; memoized per (partition, p)."""
    _check_shape(lam, params)
    return _psi_recursive(lam.parts, params.p)


def coefficient_sum(lam: Partition, p: Fraction) -> Fraction:
    """Sum of the recursion coefficients; must equal p + (1-p) chi(tau)/d."""
    if lam.n < 2:
        raise PreconditionError(f"n must be >= 2, got {lam.n}")
    d = dimension(lam)
    total = sum(
        (removal_weight(r.kind, p) * Fraction(dimension(r.result), d) for r in borderstrip_removals(lam, 2)),
        Fraction(0),
    )
    expected = p + (1 - p) * transposition_character_ratio(lam)
    if total != expected:
        raise IdentityCheckError(f"coefficient sum for {lam!r} at p={p}: {total} != {expected}")
    return total


# --- Closed forms ---

def _multinomial(total: int, *parts: int) -> int:
    if any(x < 0 for x in parts) or sum(parts) != total:
        return 0
    out = factorial(total)
    for x in parts:
        out //= factorial(x)
    return out


def hook_eigenvalue_paths(n: int, i: int, p: Fraction) -> Fraction:
    """
    psi_[n-i, 1^i] by counting recursion paths down to [2] or [1,1].

    A path uses j separated-corner steps (weight 2p), vertical steps in the
    column (weight 2p-1) and horizontal steps in the row (weight 1).
    """
    half = n // 2
    total = Fraction(0)
    for j in range(i + 1):
        col, row = i - j, n - i - j - 2
        if col >= 0 and row >= 0 and col % 2 == 0 and row % 2 == 0:
            total += _multinomial(half - 1, j, col // 2, row // 2) * (2 * p) ** j * (2 * p - 1) ** (col // 2)
        col, row = i - j - 1, n - i - j - 1
        if col >= 0 and row >= 0 and col % 2 == 0 and row % 2 == 0:
            total += _multinomial(half - 1, j, col // 2, row // 2) * (2 * p) ** j * (2 * p - 1) ** (col // 2 + 1)
    return total / comb(n - 1, i)


def hook_eigenvalue_charpoly(n: int, i: int, p: Fraction) -> Fraction:
    """psi_[n-i, 1^i] from the hook character polynomial summed over the generator law."""
    half = n // 2
    total = Fraction(0)
    for k in range(half + 1):
        for l in range(half - k + 1):
            weight = _multinomial(half, k, l, half - k - l) * p ** (half - l - k) * (1 - p) ** (k + l)
            total += (-1) ** l * weight * poly_binomial(n - 2 * k - 2 * l - 1, i - 2 * l)
    return total / comb(n - 1, i)


def hook_eigenvalue_half(n: int, i: int) -> Fraction:
    """psi_[n-i, 1^i] at p = 1/2; zero once i >= n/2."""
    return Fraction(comb(n // 2 - 1, i), comb(n - 1, i))


def eigenvalue_closed_form(lam: Partition, params: WalkParams) -> Fraction | None:
    """Closed form where one is known, else None."""
    _check_shape(lam, params)
    n, p = params.n, params.p
    parts = lam.parts

    if parts == (n,):
        return Fraction(1)
    if parts == (1,) * n:
        return (2 * p - 1) ** params.half
    if parts == (n - 1, 1):
        return p - (1 - p) / (n - 1)
    if n >= 4 and parts == (n - 2, 2):
        return p ** 2 + (1 - p) ** 2 / (n - 3)
    if n >= 4 and parts == (n - 2, 1, 1):
        return p ** 2 - (1 - p ** 2) / (n - 1)
    if lam.is_hook():
        i = len(parts) - 1
        if p == HALF:
            return hook_eigenvalue_half(n, i)
        return hook_eigenvalue_paths(n, i, p)
    return None


def printed_two_row_form(n: int, p: Fraction) -> Fraction:
    """The [n-2,2] form with a minus sign; disagrees with the exact value unless p = 1."""
    return p ** 2 - (1 - p) ** 2 / (n - 3)


def printed_two_one_one_form(n: int, p: Fraction) -> Fraction:
    """The [n-2,1,1] form carrying an extra -2/((n-1)(n-2)) term."""
    return p ** 2 - (1 - p ** 2) / (n - 1) - Fraction(2, (n - 1) * (n - 2))


# --- Tables ---

def build_table(params: WalkParams, verify: bool = False, unsafe: bool = False) -> EigenvalueTable:
    """Direct-method table over all partitions of n; optionally cross-checked by recursion."""
    check_cap("full_table_n", params.n, unsafe)
    values = {lam: eigenvalue_direct(lam, params) for lam in enumerate_partitions(params.n)}
    if verify:
        for lam, v in values.items():
            rec = eigenvalue_recursive(lam, params)
            if rec != v:
                raise IdentityCheckError(f"direct {v} != recursive {rec} for {lam!r}")
    table = EigenvalueTable(params=params, values=values)
    table.check_invariants()
    return table


@lru_cache(maxsize=128)
def cached_table(params: WalkParams, unsafe: bool = False) -> EigenvalueTable:
    """build_table memoized per (n, p) for sweeps over t."""
    return build_table(params, unsafe=unsafe)


def expected_character(lam: Partition, params: WalkParams, t: int) -> Fraction:
    """E_{P^{*t}} chi_lambda = d_lambda psi_lambda^t."""
    if t < 0:
        raise PreconditionError(f"t must be >= 0, got {t}")
    return dimension(lam) * eigenvalue_direct(lam, params) ** t


# --- Monotonicity ---

class SubReport(BaseModel):
    passed: bool
    witnesses: list[dict] = Field(default_factory=list)
    violations: list[dict] = Field(default_factory=list)


class MonotonicityReport(BaseModel):
    n: int
    p: str
    decreasing_two_row: SubReport
    two_row_largest: SubReport
    balanced_two_row_bound: SubReport
    base_case_ratios: SubReport | None = None
    base_case_nonnegative: SubReport | None = None
    balanced_coefficient_identity: bool

    @property
    def passed(self) -> bool:
        return all(
            r.passed
            for r in (self.decreasing_two_row, self.two_row_largest, self.balanced_two_row_bound)
        )


def _q(v: Fraction) -> str:
    return format_rational(v)


def check_decreasing_two_row(table: EigenvalueTable) -> SubReport:
    """psi_[n-i, i] weakly decreasing for i = 0..n/2."""
    n = table.params.n
    seq = [(i, table[Partition.of(n - i, i)]) for i in range(n // 2 + 1)]
    violations = [
        {"i": i + 1, "psi_prev": _q(a), "psi": _q(b)}
        for (i, a), (_, b) in zip(seq, seq[1:])
        if b > a
    ]
    return SubReport(
        passed=not violations,
        witnesses=[{"i": i, "psi": _q(v)} for i, v in seq],
        violations=violations,
    )


def check_two_row_largest(table: EigenvalueTable) -> SubReport:
    """psi_lambda <= psi_[n-i, i] for every lambda with lambda_1 = n - i."""
    n = table.params.n
    witnesses, violations = [], []
    for i in range(1, n // 2 + 1):
        top = table[Partition.of(n - i, i)]
        for lam, v in table.values.items():
            if lam.row(1) != n - i or lam.parts == (n - i, i):
                continue
            row = {"i": i, "partition": str(lam), "psi": _q(v), "bound": _q(top)}
            witnesses.append(row)
            if v > top:
                violations.append(row)
    return SubReport(passed=not violations, witnesses=witnesses, violations=violations)


def check_balanced_bound(table: EigenvalueTable) -> SubReport:
    """psi_lambda <= psi_[n/2, n/2] whenever lambda'_1 <= lambda_1 < n/2."""
    n = table.params.n
    top = table[Partition.of(n // 2, n // 2)]
    witnesses, violations = [], []
    for lam, v in table.values.items():
        if not lam.conjugate().row(1) <= lam.row(1) < Fraction(n, 2):
            continue
        row = {"partition": str(lam), "psi": _q(v), "bound": _q(top)}
        witnesses.append(row)
        if v > top:
            violations.append(row)
    return SubReport(passed=not violations, witnesses=witnesses, violations=violations)


def _base_case_rows(n: int) -> list[tuple[dict, Fraction, Fraction]]:
    if n != 8:
        raise PreconditionError(f"the [3,3,2] vs [4,4] base case lives at n = 8, got n={n}")
    small, big = Partition.of(3, 3, 2), Partition.of(4, 4)
    d_small, d_big = dimension(small), dimension(big)
    rows = []
    for s in range(n // 2 + 1):
        r_small = Fraction(involution_character(small, s), d_small)
        r_big = Fraction(involution_character(big, s), d_big)
        rows.append(({"s": s, "ratio_332": _q(r_small), "ratio_44": _q(r_big)}, r_small, r_big))
    return rows


def check_base_case_ratios(n: int = 8) -> SubReport:
    """Per-s character ratios: chi_[3,3,2]/d <= chi_[4,4]/d on (1^{8-2s}, 2^s)."""
    rows = _base_case_rows(n)
    violations = [row for row, r_small, r_big in rows if r_small > r_big]
    return SubReport(passed=not violations, witnesses=[row for row, _, _ in rows], violations=violations)


def check_base_case_nonnegative(n: int = 8) -> SubReport:
    """0 <= chi_[3,3,2]/d per s. Fails at s = 4, where the ratio is -1/7."""
    rows = _base_case_rows(n)
    violations = [row for row, r_small, _ in rows if r_small < 0]
    return SubReport(passed=not violations, witnesses=[row for row, _, _ in rows], violations=violations)


def balanced_coefficient_value(n: int, p: Fraction) -> Fraction:
    """3/4 (1 - 1/(n-1)) + (2p-1) 1/4 (1 + 3/(n-1))."""
    return Fraction(3, 4) * (1 - Fraction(1, n - 1)) + (2 * p - 1) * Fraction(1, 4) * (1 + Fraction(3, n - 1))


def verify_monotonicity(params: WalkParams, table: EigenvalueTable | None = None) -> MonotonicityReport:
    """Run the two-row monotonicity checks; violations are reported, never raised."""
    table = table or build_table(params)
    n, p = params.n, params.p
    balanced = Partition.of(n // 2, n // 2)
    return MonotonicityReport(
        n=n,
        p=_q(p),
        decreasing_two_row=check_decreasing_two_row(table),
        two_row_largest=check_two_row_largest(table),
        balanced_two_row_bound=check_balanced_bound(table),
        base_case_ratios=check_base_case_ratios() if n == 8 else None,
        base_case_nonnegative=check_base_case_nonnegative() if n == 8 else None,
        balanced_coefficient_identity=coefficient_sum(balanced, p) == balanced_coefficient_value(n, p),
    )


def verify_coefficient_majorization(n: int, p: Fraction) -> SubReport:
    """coefficient_sum(lower) <= coefficient_sum(upper) along every majorization cover."""
    witnesses, violations = [], []
    for lower, upper in majorization_covers(n):
        lo, hi = coefficient_sum(lower, p), coefficient_sum(upper, p)
        row = {"lower": str(lower), "upper": str(upper), "lower_sum": _q(lo), "upper_sum": _q(hi)}
        witnesses.append(row)
        if lo > hi:
            violations.append(row)
    return SubReport(passed=not violations, witnesses=witnesses, violations=violations)
