"""
Verification suites run by `verify`.

Each suite returns CheckResults. A check is one of:
- asserted: status pass/fail
- expected-fail: a known anomaly (n=4 cases, printed forms that are off);
  it must keep failing, and passing is flagged as unexpected-pass
- report: shown in the output, never affects the exit status
"""
from fractions import Fraction

from pydantic import BaseModel, Field

from bounds import verify_seaworld
from characters import column_orthogonality
from config import CONFIG, CheckResult, IdentityCheckError, PreconditionError, WalkParams, format_rational, get_default
from order_sep import detector_dominance_check, hook_eigenvalue_identity_check
from partitions import Partition, enumerate_partitions
from spectrum import (
    balanced_coefficient_value,
    cached_table,
    check_balanced_bound,
    check_base_case_nonnegative,
    check_base_case_ratios,
    check_decreasing_two_row,
    check_two_row_largest,
    coefficient_sum,
    eigenvalue_closed_form,
    eigenvalue_recursive,
    printed_two_one_one_form,
    printed_two_row_form,
    verify_coefficient_majorization,
)
from walk_dist import convolution_oracle, distribution_at_time

HALF = Fraction(1, 2)
N4_ANOMALY = (HALF, Fraction(2, 3))  # n=4 window [1/2, 2/3) where the two-row lemmas fail

ALL_SUITES = (
    "recursion",
    "closedforms",
    "deci",
    "twopart",
    "n2bound",
    "eigmaj",
    "seaworld",
    "hooks",
    "detectors",
    "orthogonality",
    "oracle",
)


class SuiteResult(BaseModel):
    name: str
    checks: list[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not any(c.asserted_failure for c in self.checks)


class VerifyReport(BaseModel):
    n: int
    p: str
    suites: list[SuiteResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def summary(self) -> dict[str, dict[str, int]]:
        out = {}
        for suite in self.suites:
            counts: dict[str, int] = {}
            for c in suite.checks:
                counts[c.status] = counts.get(c.status, 0) + 1
            out[suite.name] = counts
        return out


def make_check(name: str, ok: bool, detail: dict | None = None,
               expect_fail: bool = False, report_only: bool = False) -> CheckResult:
    if report_only:
        status = "report"
    elif expect_fail:
        status = "unexpected-pass" if ok else "expected-fail"
    else:
        status = "pass" if ok else "fail"
    return CheckResult(name=name, passed=bool(ok), status=status, detail=detail or {})


def _in_n4_window(params: WalkParams) -> bool:
    lo, hi = N4_ANOMALY
    return params.n == 4 and lo <= params.p < hi


# --- Suites ---

def suite_recursion(params: WalkParams, unsafe: bool = False) -> list[CheckResult]:
    table = cached_table(params, unsafe)
    checks = []
    for lam in enumerate_partitions(params.n):
        direct = table[lam]
        recursive = eigenvalue_recursive(lam, params)
        checks.append(make_check(
            f"recursive {lam}",
            direct == recursive,
            {"direct": format_rational(direct), "recursive": format_rational(recursive)},
        ))
        try:
            coefficient_sum(lam, params.p)
            checks.append(make_check(f"coefficient sum {lam}", True))
        except IdentityCheckError as e:
            checks.append(make_check(f"coefficient sum {lam}", False, {"error": str(e)}))
    return checks


def suite_closedforms(params: WalkParams, unsafe: bool = False) -> list[CheckResult]:
    n, p = params.n, params.p
    table = cached_table(params, unsafe)
    checks = []
    for lam in enumerate_partitions(n):
        closed = eigenvalue_closed_form(lam, params)
        if closed is None:
            continue
        checks.append(make_check(
            f"closed form {lam}",
            closed == table[lam],
            {"closed": format_rational(closed), "direct": format_rational(table[lam])},
        ))

    if n >= 4:
        exact = table[Partition.of(n - 2, 2)]
        printed = printed_two_row_form(n, p)
        checks.append(make_check(
            f"printed form {Partition.of(n - 2, 2)}",
            printed == exact,
            {"printed": format_rational(printed), "direct": format_rational(exact)},
            expect_fail=p != 1,
        ))
        exact = table[Partition.of(n - 2, 1, 1)]
        printed = printed_two_one_one_form(n, p)
        checks.append(make_check(
            f"printed form {Partition.of(n - 2, 1, 1)}",
            printed == exact,
            {"printed": format_rational(printed), "direct": format_rational(exact)},
            expect_fail=True,
        ))
    return checks


def _two_row_check(name: str, sub, params: WalkParams, anomaly: bool) -> CheckResult:
    return make_check(
        name,
        sub.passed,
        {"violations": sub.violations},
        expect_fail=anomaly,
        report_only=params.p < HALF,
    )


def suite_deci(params: WalkParams, unsafe: bool = False) -> list[CheckResult]:
    sub = check_decreasing_two_row(cached_table(params, unsafe))
    return [_two_row_check("two-row eigenvalues decrease in i", sub, params, _in_n4_window(params))]


def suite_twopart(params: WalkParams, unsafe: bool = False) -> list[CheckResult]:
    sub = check_two_row_largest(cached_table(params, unsafe))
    return [_two_row_check("[n-i, i] largest among first row n-i", sub, params, False)]


def suite_n2bound(params: WalkParams, unsafe: bool = False) -> list[CheckResult]:
    n, p = params.n, params.p
    if n < 4:
        return [make_check("balanced bound", True, {"skipped": "n < 4"}, report_only=True)]
    sub = check_balanced_bound(cached_table(params, unsafe))
    checks = [_two_row_check("psi below balanced two-row", sub, params, False)]

    balanced = Partition.of(n // 2, n // 2)
    try:
        total = coefficient_sum(balanced, p)
    except IdentityCheckError as e:
        checks.append(make_check("balanced coefficient identity", False, {"error": str(e)}))
    else:
        expected = balanced_coefficient_value(n, p)
        checks.append(make_check(
            "balanced coefficient identity",
            total == expected,
            {"sum": format_rational(total), "expected": format_rational(expected)},
        ))

    if n == 8:
        table = cached_table(params, unsafe)
        small, big = table[Partition.of(3, 3, 2)], table[Partition.of(4, 4)]
        checks.append(make_check(
            "base case psi_[3,3,2] <= psi_[4,4]",
            small <= big,
            {"psi_332": format_rational(small), "psi_44": format_rational(big)},
        ))
        base = check_base_case_ratios(8)
        checks.append(make_check("base case character ratios", base.passed, {"violations": base.violations}))
        nonneg = check_base_case_nonnegative(8)
        checks.append(make_check(
            "base case ratios nonnegative",
            nonneg.passed,
            {"violations": nonneg.violations},
            expect_fail=True,
        ))
    return checks


def suite_eigmaj(params: WalkParams, unsafe: bool = False) -> list[CheckResult]:
    sub = verify_coefficient_majorization(params.n, params.p)
    return [make_check(
        "coefficient sums monotone along majorization covers",
        sub.passed,
        {"covers": len(sub.witnesses), "violations": sub.violations},
        report_only=params.p < HALF,
    )]


def suite_seaworld(params: WalkParams, unsafe: bool = False) -> list[CheckResult]:
    n, p = params.n, params.p
    if p == 0:
        return [make_check("split sum identity", True, {"skipped": "p = 0"}, report_only=True)]
    checks = []
    for i in range(n // 2 + 1):
        r = verify_seaworld(n, i, p)
        detail = {"rhs": r.rhs, "variant_a": r.variant_a, "variant_b": r.variant_b}
        checks.append(make_check(f"split sum i={i}", r.a_matches, detail))
        fixture = n == 4 and i == 2 and p == HALF
        checks.append(make_check(
            f"split sum i={i} (i-2j1-2j2 form)",
            r.b_matches,
            detail,
            expect_fail=fixture,
            report_only=not fixture,
        ))
    return checks


def suite_hooks(params: WalkParams, unsafe: bool = False) -> list[CheckResult]:
    report = hook_eigenvalue_identity_check(params.n, params.p)
    return [make_check(f"hook i={row['i']}", row["agree"], row) for row in report.rows]


def suite_detectors(params: WalkParams, unsafe: bool = False) -> list[CheckResult]:
    report = detector_dominance_check(params, unsafe)
    return [make_check(
        "[n-i, i] dominates i-cycle detectors",
        report.passed,
        {"violations": report.violations},
        expect_fail=_in_n4_window(params),
        report_only=params.p < HALF,
    )]


def suite_orthogonality(params: WalkParams, unsafe: bool = False) -> list[CheckResult]:
    report = column_orthogonality(params.n, unsafe)
    return [
        make_check("column orthogonality", report.passed, {"violations": report.violations}),
        make_check("conjugate shape is sign twist", report.sign_twist_passed),
    ]


def suite_oracle(params: WalkParams, unsafe: bool = False) -> list[CheckResult]:
    t_max = int(get_default("oracle_t_max", 6))
    checks = []
    for t in range(t_max + 1):
        fourier = distribution_at_time(params, t, unsafe)
        convolved = convolution_oracle(params, t, unsafe)
        checks.append(make_check(f"fourier = convolution at t={t}", fourier.probs == convolved.probs))
    return checks


SUITES = {
    "recursion": suite_recursion,
    "closedforms": suite_closedforms,
    "deci": suite_deci,
    "twopart": suite_twopart,
    "n2bound": suite_n2bound,
    "eigmaj": suite_eigmaj,
    "seaworld": suite_seaworld,
    "hooks": suite_hooks,
    "detectors": suite_detectors,
    "orthogonality": suite_orthogonality,
    "oracle": suite_oracle,
}


def parse_suites(text: str | None) -> list[str]:
    if text == "all":
        return list(ALL_SUITES)
    if not text:
        return list(CONFIG.get("verify", {}).get("suites", ALL_SUITES))
    names = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise PreconditionError(f"unknown suite(s): {', '.join(unknown)}")
    return names


def run_suites(params: WalkParams, suites: list[str], unsafe: bool = False) -> VerifyReport:
    report = VerifyReport(n=params.n, p=format_rational(params.p))
    for name in suites:
        if name not in SUITES:
            raise PreconditionError(f"unknown suite: {name}")
        report.suites.append(SuiteResult(name=name, checks=SUITES[name](params, unsafe)))
    return report
