"""
Involution Walk Toolkit - Command Line

Exact eigenvalues, distributions, distances, bounds and likelihood orders for
the random walk on S_n generated by a random involution.

Usage:
    python run_iwalk.py eigen --n 6 --p 1/2                    # Full eigenvalue table (cached)
    python run_iwalk.py eigen --n 4 --p 0/1 --partition 1,1,1,1
    python run_iwalk.py character --partition 3,1 --class 1:2,2:1
    python run_iwalk.py dist --n 4 --p 1/2 --t 3 --method mc --samples 100000 --seed 7
    python run_iwalk.py tv --n 6 --p 1/2 --t 1 --t-max 12 --format csv
    python run_iwalk.py sep --n 4 --p 1/2 --t 2 --conjecture
    python run_iwalk.py bounds --n 4 --p 1/2 --t 1 --kind wilson
    python run_iwalk.py order --n 6 --p 1/2 --find-limit --t-max 64
    python run_iwalk.py verify --n 6 --p 1/2 --suite oracle,recursion
    python run_iwalk.py cache inspect

Exit status: 0 on success, 1 when an asserted check fails, 2 on usage errors.
"""
import argparse
import sys
from pathlib import Path

from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from bounds import (
    analytic_bound_sweep,
    analytic_lower_bound,
    analytic_psi_bound,
    ds_report,
    parity_report,
    upper_mixing_bound,
    wilson_lower_bound,
)
from cache_store import clear_cache, inspect_cache, load_memo, load_or_build_table, save_memo, warm_cache
from characters import character, character_table
from config import (
    PreconditionError,
    WalkParams,
    check_cap,
    format_rational,
    get_default,
    parse_rational,
)
from export_results import emit
from order_sep import (
    conjectured_separation,
    lemma_threshold_sweep,
    likelihood_order,
    limiting_order_check,
    separation_comparison,
)
from partitions import CycleType, Partition
from spectrum import eigenvalue_closed_form, eigenvalue_direct, eigenvalue_recursive
from verify_suites import parse_suites, run_suites
from walk_dist import (
    convolution_oracle,
    distribution_at_time,
    monte_carlo_estimate,
    separation,
    total_variation,
)

console = Console(stderr=True)


class RunConfig(BaseModel):
    """Everything a command needs; built from argv or directly in tests."""
    command: str
    n: int | None = None
    p: str | None = None
    t: int | None = None
    t_max: int | None = None
    seed: int | None = None
    samples: int | None = None
    block_size: int | None = None
    workers: int | None = None
    format: str = "json"
    out: Path | None = None
    cache_dir: Path | None = None
    unsafe_caps: bool = False
    verbose: bool = False

    partition: str | None = None
    cycle_class: str | None = None
    method: str | None = None
    conjecture: bool = False
    kind: str | None = None
    i: int | None = None
    c: float = 0.0
    find_limit: bool = False
    suite: str | None = None
    thresholds: int | None = None
    action: str | None = None
    n_values: str | None = None

    def params(self) -> WalkParams:
        if self.n is None:
            raise PreconditionError("--n is required")
        return WalkParams(n=self.n, p=self.p if self.p is not None else get_default("p", "1/2"))

    def time(self) -> int:
        t = self.t if self.t is not None else int(get_default("t", 1))
        if t < 0:
            raise PreconditionError(f"t must be >= 0, got {t}")
        return t

    def horizon(self) -> int:
        return self.t_max if self.t_max is not None else int(get_default("t_max", 64))

    def sweep(self) -> range:
        """Times t..t_max inclusive; just t when --t-max is absent."""
        t = self.time()
        if self.t_max is None:
            return range(t, t + 1)
        if self.t_max < t:
            raise PreconditionError(f"t_max must be >= t, got t={t}, t_max={self.t_max}")
        return range(t, self.t_max + 1)


def _rational_row(prefix: str, q) -> dict:
    q = parse_rational(q)
    return {f"{prefix}_num": q.numerator, f"{prefix}_den": q.denominator, "float_approx": float(q)}


def _header(title: str) -> None:
    console.print(Panel.fit(f"🧮 [bold]{title}[/]", style="blue"))


# --- Commands ---

def cmd_eigen(config: RunConfig) -> int:
    params = config.params()
    method = config.method or "direct"
    if method not in ("direct", "recursive", "closed"):
        raise PreconditionError(f"unknown eigenvalue method {method!r}")
    _header(f"Eigenvalues n={params.n}, p={format_rational(params.p)} ({method})")

    if config.partition is not None:
        lam = Partition.parse(config.partition)
        check_cap("single_partition_n", lam.n, config.unsafe_caps)
        if method == "direct":
            psi = eigenvalue_direct(lam, params)
        elif method == "recursive":
            psi = eigenvalue_recursive(lam, params)
        else:
            psi = eigenvalue_closed_form(lam, params)
            if psi is None:
                raise PreconditionError(f"no closed form for {lam}")
        data = {"n": params.n, "p": format_rational(params.p), "partition": str(lam), "method": method,
                "psi": format_rational(psi), "float_approx": float(psi)}
        emit(data, config.format, config.out, rows=[{"partition": str(lam), **_rational_row("psi", psi)}])
        return 0

    load_memo(config.cache_dir)
    table = load_or_build_table(params, config.cache_dir, config.verbose, config.unsafe_caps)
    save_memo(config.cache_dir)
    values = dict(table.values)
    if method == "recursive":
        values = {lam: eigenvalue_recursive(lam, params) for lam in values}
    elif method == "closed":
        values = {lam: v for lam in values if (v := eigenvalue_closed_form(lam, params)) is not None}

    data = {"n": params.n, "p": format_rational(params.p),
            "psi": {str(lam): format_rational(v) for lam, v in values.items()}}
    rows = [{"partition": str(lam), **_rational_row("psi", v)} for lam, v in values.items()]
    emit(data, config.format, config.out, rows=rows)
    return 0


def cmd_character(config: RunConfig) -> int:
    if config.partition is None:
        if config.n is None:
            raise PreconditionError("--partition or --n is required")
        check_cap("full_table_n", config.n, config.unsafe_caps)
        table = character_table(config.n)
        data = {str(lam): {str(alpha): v for alpha, v in row.items()} for lam, row in table.items()}
        rows = [{"partition": str(lam), "class": str(alpha), "value": v}
                for lam, row in table.items() for alpha, v in row.items()]
        emit(data, config.format, config.out, rows=rows)
        return 0

    lam = Partition.parse(config.partition)
    if config.cycle_class is None:
        raise PreconditionError("--class is required with --partition")
    alpha = CycleType.parse(config.cycle_class, lam.n)
    check_cap("single_partition_n", lam.n, config.unsafe_caps)
    value = character(lam, alpha)
    data = {"partition": str(lam), "class": str(alpha), "value": value}
    emit(data, config.format, config.out, rows=[data])
    return 0


def cmd_dist(config: RunConfig) -> int:
    params, t = config.params(), config.time()
    method = config.method or "fourier"
    _header(f"Distribution n={params.n}, p={format_rational(params.p)}, t={t} ({method})")

    if method == "fourier":
        d = distribution_at_time(params, t, config.unsafe_caps)
    elif method == "convolve":
        d = convolution_oracle(params, t, config.unsafe_caps)
    elif method == "mc":
        estimate = monte_carlo_estimate(
            params,
            t,
            config.samples or int(get_default("samples", 100000)),
            config.seed if config.seed is not None else int(get_default("seed", 0)),
            config.block_size,
            config.workers,
        )
        emit(estimate.to_json_dict(), config.format, config.out, rows=estimate.distribution.csv_rows())
        return 0
    else:
        raise PreconditionError(f"unknown distribution method {method!r}")

    emit(d.to_json_dict(), config.format, config.out, rows=d.csv_rows())
    return 0


def cmd_tv(config: RunConfig) -> int:
    params = config.params()
    times = config.sweep()
    rows = [
        {"n": params.n, "p": format_rational(params.p), "t": s,
         **_rational_row("tv", total_variation(distribution_at_time(params, s, config.unsafe_caps)))}
        for s in times
    ]
    emit(rows if len(rows) > 1 else rows[0], config.format, config.out, rows=rows)
    return 0


def cmd_sep(config: RunConfig) -> int:
    params, t = config.params(), config.time()
    if config.conjecture and params.p != parse_rational("1/2"):
        raise PreconditionError("--conjecture requires p = 1/2")

    if config.conjecture and config.t_max is not None:
        rows = separation_comparison(params.n, config.sweep(), config.unsafe_caps)
        emit(rows, config.format, config.out, rows=rows)
        return 0

    exact, argmax = separation(distribution_at_time(params, t, config.unsafe_caps))
    data = {"n": params.n, "p": format_rational(params.p), "t": t,
            "exact": format_rational(exact), "argmax": str(argmax), "float_approx": float(exact)}
    if config.conjecture:
        conj = conjectured_separation(params.n, t)
        data.update(
            conjectured=conj.exact,
            match=conj.exact_value == exact,
            n_cycle_deficit=conj.n_cycle_deficit,
            deficit_match=conj.matches_deficit,
            terms=conj.terms,
            decreasing=conj.decreasing,
        )
        if data["match"]:
            console.print("[green]✓ conjecture matches the exact separation[/]")
        else:
            console.print(f"[yellow]⚠ conjecture {conj.exact} vs exact {data['exact']} at {argmax}[/]")
    emit(data, config.format, config.out, rows=[{k: v for k, v in data.items() if k != "terms"}])
    return 0


def cmd_bounds(config: RunConfig) -> int:
    params = config.params()
    kind = config.kind or "ds"
    _header(f"Bounds n={params.n}, p={format_rational(params.p)} ({kind})")

    if kind == "analytic":
        if config.i is not None:
            value = analytic_psi_bound(params.n, config.i, params.p)
            data = {"n": params.n, "i": config.i, "p": format_rational(params.p), "bound": value}
            emit(data, config.format, config.out, rows=[data])
        else:
            rows = analytic_bound_sweep([params.n], params.p)
            emit(rows, config.format, config.out, rows=rows)
        return 0

    if kind == "ds":
        report = ds_report(params, config.time(), config.unsafe_caps)
    elif kind == "wilson":
        report = wilson_lower_bound(params, config.time())
    elif kind == "parity":
        report = parity_report(params, config.time())
    elif kind == "invup":
        report = upper_mixing_bound(params, config.c)
    elif kind == "invlb":
        report = analytic_lower_bound(params, config.time())
    else:
        raise PreconditionError(f"unknown bound kind {kind!r}")

    if not report.certified:
        failed = [h.name for h in report.hypotheses if not h.satisfied]
        console.print(f"[yellow]⚠ Hypotheses not met: {'; '.join(failed)}[/]")
    row = {"kind": report.kind.value, "value": report.value, "exact": report.exact,
           "certified": report.certified}
    emit(report, config.format, config.out, rows=[row])
    return 0


def cmd_order(config: RunConfig) -> int:
    params = config.params()
    if config.find_limit:
        report = limiting_order_check(params, config.horizon(), config.unsafe_caps)
        if report.t_star is None:
            console.print(f"[yellow]⚠ Not cycle-lex within t <= {report.t_max}: {report.violating_pairs}[/]")
        else:
            console.print(f"[green]✓ Cycle-lex from t* = {report.t_star} through {report.t_max}[/]")
        row = {"n": report.n, "p": report.p, "t_max": report.t_max, "t_star": report.t_star,
               "holds_at_all_times": report.holds_at_all_times}
        emit(report, config.format, config.out, rows=[row])
        return 0

    order = likelihood_order(params, config.time(), config.unsafe_caps)
    rows = [{"rank": k, "class": str(alpha), **_rational_row("prob", q)}
            for k, (alpha, q) in enumerate(order.ranked, start=1)]
    emit(order.to_json_dict(), config.format, config.out, rows=rows)
    return 0


def _print_verify_summary(report) -> None:
    table = Table(title=f"verify n={report.n} p={report.p}")
    table.add_column("suite")
    table.add_column("result")
    table.add_column("statuses", style="dim")
    for suite in report.suites:
        counts = report.summary()[suite.name]
        result = "[green]pass[/]" if suite.passed else "[red]FAIL[/]"
        table.add_row(suite.name, result, ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    console.print(table)


def cmd_verify(config: RunConfig) -> int:
    params = config.params()
    suites = parse_suites(config.suite)
    _header(f"Verify n={params.n}, p={format_rational(params.p)}: {', '.join(suites)}")

    report = run_suites(params, suites, config.unsafe_caps)
    _print_verify_summary(report)

    data = report.model_dump(mode="json")
    data["passed"] = report.passed
    if config.thresholds:
        data["thresholds"] = lemma_threshold_sweep(params.p, config.thresholds, config.unsafe_caps)

    rows = [{"suite": s.name, "check": c.name, "status": c.status, "passed": c.passed}
            for s in report.suites for c in s.checks]
    emit(data, config.format, config.out, rows=rows)

    if report.passed:
        console.print("[green]✓ All asserted checks passed[/]")
        return 0
    console.print("[red]✗ Asserted checks failed[/]")
    return 1


def cmd_cache(config: RunConfig) -> int:
    action = config.action or "inspect"
    if action == "warm":
        if config.n_values:
            n_values = [int(x) for x in config.n_values.split(",")]
        elif config.n is not None:
            n_values = [config.n]
        else:
            raise PreconditionError("cache warm needs --n or --n-values")
        p = config.p if config.p is not None else get_default("p", "1/2")
        paths = warm_cache(n_values, p, config.cache_dir, config.unsafe_caps)
        save_memo(config.cache_dir)
        emit({"written": [str(x) for x in paths]}, "json", config.out)
        return 0

    if action == "inspect":
        rows = inspect_cache(config.cache_dir)
        table = Table(title="cache")
        for col in ("file", "n", "p", "entries", "bytes", "valid"):
            table.add_column(col)
        for row in rows:
            table.add_row(*(str(row[col]) for col in ("file", "n", "p", "entries", "bytes", "valid")))
        console.print(table)
        emit(rows, config.format, config.out, rows=rows)
        return 0

    if action == "clear":
        removed = clear_cache(config.cache_dir)
        console.print(f"[green]✓ Removed {removed} cache files[/]")
        return 0

    raise PreconditionError(f"unknown cache action {action!r}")


HANDLERS = {
    "eigen": cmd_eigen,
    "character": cmd_character,
    "dist": cmd_dist,
    "tv": cmd_tv,
    "sep": cmd_sep,
    "bounds": cmd_bounds,
    "order": cmd_order,
    "verify": cmd_verify,
    "cache": cmd_cache,
}


def _one_line(e: Exception) -> str:
    if isinstance(e, ValidationError):
        msg = e.errors()[0].get("msg", str(e))
        return msg.removeprefix("Value error, ")
    return str(e)


def run(config: RunConfig) -> int:
    """Dispatch one command; returns the process exit status."""
    handler = HANDLERS.get(config.command)
    if handler is None:
        console.print(f"[red]error:[/] unknown command {config.command!r}")
        return 2
    if config.format not in ("json", "csv"):
        console.print(f"[red]error:[/] format must be json or csv, got {config.format!r}")
        return 2
    try:
        return handler(config)
    except (PreconditionError, ValidationError) as e:
        console.print(f"[red]error:[/] {_one_line(e)}")
        return 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="Even group degree")
    common.add_argument("--p", help='Laziness, "num/den" or decimal')
    common.add_argument("--t", type=int, help="Walk length")
    common.add_argument("--t-max", type=int, help="Sweep horizon")
    common.add_argument("--seed", type=int, help="Monte Carlo seed")
    common.add_argument("--samples", type=int, help="Monte Carlo samples")
    common.add_argument("--block-size", type=int, help="Monte Carlo block size")
    common.add_argument("--workers", type=int, help="Concurrent Monte Carlo blocks")
    common.add_argument("--format", choices=("json", "csv"), default=get_default("format", "json"))
    common.add_argument("--out", type=Path, help="Write here instead of stdout")
    common.add_argument("--cache-dir", type=Path, help="Override IWALK_CACHE_DIR")
    common.add_argument("--unsafe-caps", action="store_true", help="Lift the size caps")
    common.add_argument("--verbose", action="store_true", help="Timing and cache lines")

    parser = argparse.ArgumentParser(description="Involution walk toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", parents=[common], help="Eigenvalue table or single partition")
    p.add_argument("--partition", help='e.g. "4,2"')
    p.add_argument("--method", choices=("direct", "recursive", "closed"), default="direct")

    p = sub.add_parser("character", parents=[common], help="Character values")
    p.add_argument("--partition")
    p.add_argument("--class", dest="cycle_class", help='Cycle type, e.g. "1:2,2:1"')

    p = sub.add_parser("dist", parents=[common], help="Class distribution at time t")
    p.add_argument("--method", choices=("fourier", "convolve", "mc"), default="fourier")

    sub.add_parser("tv", parents=[common], help="Total variation distance")

    p = sub.add_parser("sep", parents=[common], help="Separation distance")
    p.add_argument("--conjecture", action="store_true", help="Compare with the alternating-sum form")

    p = sub.add_parser("bounds", parents=[common], help="Mixing bounds")
    p.add_argument("--kind", choices=("ds", "wilson", "parity", "analytic", "invup", "invlb"), default="ds")
    p.add_argument("--i", type=int, help="Row index for --kind analytic")
    p.add_argument("--c", type=float, default=0.0, help="Offset for --kind invup")

    p = sub.add_parser("order", parents=[common], help="Likelihood order")
    p.add_argument("--find-limit", action="store_true", help="Search for the cycle-lex onset")

    p = sub.add_parser("verify", parents=[common], help="Verification suites")
    p.add_argument("--suite", help="Comma-separated suites, or all")
    p.add_argument("--thresholds", type=int, metavar="N_MAX", help="Also sweep lemma thresholds up to N_MAX")

    p = sub.add_parser("cache", parents=[common], help="Eigenvalue cache")
    p.add_argument("action", choices=("warm", "inspect", "clear"))
    p.add_argument("--n-values", help='e.g. "4,6,8" for warm')

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(**{k: v for k, v in vars(args).items() if v is not None})
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
