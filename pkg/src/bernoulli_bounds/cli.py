"""
bernoulli_bounds CLI
====================

Command-line access to the bound evaluators, the exact tail engine, the
verification sweeps, the planning queries and the table / figure data.

Exit codes: 0 success, 1 check failure or a precondition / regime
violation, 2 usage error, 3 inconclusive verdicts under ``--strict``.
Records go to stdout (or ``--out``); diagnostics go to stderr.
"""

import asyncio
import functools
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from . import __version__
from .bounds import BoundFamily, evaluate
from .config import BoundsSettings, SweepRanges
from .errors import BoundsError, RegimeError
from .exact_binomial import (
    BOUNDARIES,
    SIDES,
    BernoulliGrid,
    DiscreteGrid,
    as_fraction,
    group_decomposition,
    group_decomposition_float,
    tail_probability,
    tail_probability_float,
)
from .ledger import VerificationLedger
from .reporting import OutputRecord, rational_text, to_json, write_record
from .reproduce import PANELS, figure_data, fixed_decimal, table1, table2
from .samplesize import PlanQuery, best_family, solve
from .sweep import SUITES, SweepResult, run_sweep, sweep_rows

logger = logging.getLogger(__name__)

console = Console(stderr=True)

FAMILIES = [f.value for f in BoundFamily if f is not BoundFamily.NORMALIZED_ASYMPTOTIC]
FORMATS = click.Choice(["csv", "json"])


class RationalParam(click.ParamType):
    """Accepts "a/b", integers and decimal literals as exact rationals."""

    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return as_fraction(str(value))
        except BoundsError:
            self.fail(f"{value!r} is not a rational number", param, ctx)


RATIONAL = RationalParam()


def _fraction_text(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else str(value)


def handle_errors(command):
    """Map package errors to exit code 1 with the message on stderr."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except RegimeError as e:
            condition = f" ({e.condition})" if e.condition else ""
            console.print(f"[red]regime violation{condition}:[/red] {escape(str(e))}")
            raise SystemExit(1)
        except BoundsError as e:
            console.print(f"[red]error:[/red] {escape(str(e))}")
            raise SystemExit(1)

    return wrapper


def emit(record: OutputRecord, fmt: str, out: Optional[Path]) -> None:
    text = write_record(record, fmt, out)
    if out is None:
        click.echo(text, nl=False)
    else:
        console.print(f"wrote {record.command} to {out}")


@click.group()
@click.version_option(__version__, prog_name="bernoulli-bounds")
def cli():
    """Exact Bernoulli deviation probabilities and exponential tail bounds."""


# ---------------------------------------------------------------------------
# bound / tail / decompose
# ---------------------------------------------------------------------------

@cli.command()
@click.option("--family", type=click.Choice(FAMILIES), required=True)
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--eps", type=RATIONAL, required=True, help="Deviation, e.g. 2/33 or 0.1")
@click.option("--p", type=RATIONAL, default=None, help="Success probability")
@click.option("--format", "fmt", type=FORMATS, default="csv")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def bound(family: str, n: int, eps: Fraction, p: Optional[Fraction], fmt: str, out: Optional[Path]):
    """Evaluate one bound family at (n, eps[, p])."""
    value = evaluate(BoundFamily(family), n, eps, p)
    if not value.certified:
        console.print(f"[yellow]{family} at n={n}, eps={eps} lies outside its proven regime[/yellow]")
    record = OutputRecord(
        command="bound",
        parameters={"family": family, "n": n, "eps": str(eps), "p": _fraction_text(p)},
        rows=[{
            "family": family,
            "n": n,
            "eps": str(eps),
            "p": _fraction_text(p),
            "value": value.value,
            "alpha": value.alpha,
            "beta": value.beta,
            "certified": value.certified,
        }],
        metadata=BoundsSettings.from_env().metadata(),
    )
    emit(record, fmt, out)


@cli.command()
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--p", type=RATIONAL, required=True)
@click.option("--eps", type=RATIONAL, required=True)
@click.option("--side", type=click.Choice(SIDES), default="two")
@click.option("--boundary", type=click.Choice(BOUNDARIES), default="strict")
@click.option("--digits", type=click.IntRange(min=1, max=200), default=6)
@click.option("--exact", "force_exact", is_flag=True, help="Exact rational even above the backend threshold")
@click.option("--format", "fmt", type=FORMATS, default="csv")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def tail(
    n: int, p: Fraction, eps: Fraction, side: str, boundary: str, digits: int,
    force_exact: bool, fmt: str, out: Optional[Path],
):
    """Deviation probability of the sample mean; exact up to the backend threshold."""
    settings = BoundsSettings.from_env(boundary=boundary)
    parameters = {"n": n, "p": str(p), "eps": str(eps), "side": side, "boundary": boundary, "digits": digits}
    if force_exact or n <= settings.backend_threshold:
        value = tail_probability(n, p, eps, side, boundary)
        backend, exact, decimal = "exact", rational_text(value), fixed_decimal(value, digits)
    else:
        approx = tail_probability_float(n, p, eps, side, boundary, settings.backend_threshold)
        backend, exact, decimal = "log-gamma", None, fixed_decimal(Fraction(approx), digits)
    record = OutputRecord(
        command="tail",
        parameters=parameters,
        rows=[{**parameters, "backend": backend, "exact": exact, "decimal": decimal}],
        metadata=settings.metadata(),
    )
    emit(record, fmt, out)


@cli.command()
@click.option("--k", "k", type=click.IntRange(min=1), required=True, help="Group size")
@click.option("--r", "r", type=click.IntRange(min=1), default=None)
@click.option("--s", "s", type=click.IntRange(min=1), default=None)
@click.option("--n", "n", type=click.IntRange(min=2), default=None, help="Discrete grid: number of trials")
@click.option("--m", "m", type=click.IntRange(min=1), default=None, help="Discrete grid: centre")
@click.option("--digits", type=click.IntRange(min=1, max=200), default=6)
@click.option("--exact", "force_exact", is_flag=True, help="Exact rationals even above the backend threshold")
@click.option("--format", "fmt", type=FORMATS, default="csv")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def decompose(k, r, s, n, m, digits, force_exact, fmt, out):
    """List P0 and every group S_j, Z_j of a Bernoulli (k, r, s) or discrete (n, m, k) grid."""
    if r is not None and s is not None and n is None and m is None:
        grid = BernoulliGrid(k, r, s)
    elif n is not None and m is not None and r is None and s is None:
        grid = DiscreteGrid(n, m, k)
    else:
        raise click.UsageError("give either --r and --s or --n and --m")
    settings = BoundsSettings.from_env()
    if force_exact or grid.n <= settings.backend_threshold:
        backend, parts = "exact", group_decomposition(grid)
        total = rational_text(parts.total())
    else:
        backend, parts = "log-gamma", group_decomposition_float(grid)
        total = fixed_decimal(Fraction(parts.total()), digits)

    def row(name: str, value, short: bool = False) -> Dict[str, Any]:
        return {
            "part": name,
            "short": short,
            "exact": rational_text(value) if backend == "exact" else None,
            "decimal": fixed_decimal(Fraction(value), digits),
        }

    rows = [row("p0", parts.p0)]
    for j, value in enumerate(parts.left, start=1):
        rows.append(row(f"S{j}", value, j > parts.full_left))
    for j, value in enumerate(parts.right, start=1):
        rows.append(row(f"Z{j}", value, j > parts.full_right))
    record = OutputRecord(
        command="decompose",
        parameters={"grid": grid.key, "digits": digits},
        rows=rows,
        metadata={
            **settings.metadata(),
            "backend": backend,
            "total": total,
            "short_groups": parts.has_short_groups,
        },
    )
    emit(record, fmt, out)


# ---------------------------------------------------------------------------
# planning
# ---------------------------------------------------------------------------

@cli.command()
@click.option("--family", type=click.Choice(FAMILIES), default=None, help="Omit to rank every family")
@click.option("--target", type=float, required=True, help="Required bound on the deviation probability")
@click.option("--eps", type=float, default=None)
@click.option("--n", "n", type=click.IntRange(min=1), default=None)
@click.option("--p", type=float, default=None)
@click.option("--format", "fmt", type=FORMATS, default="csv")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def samplesize(family, target, eps, n, p, fmt, out):
    """Smallest n for a given eps, or smallest eps for a given n."""
    parameters = {"family": family, "target": target, "eps": eps, "n": n, "p": p}
    if family is None:
        results = best_family(target, n=n, eps=eps, p=p)
    else:
        try:
            query = PlanQuery(target=target, family=BoundFamily(family), eps=eps, n=n, p=p)
        except ValidationError as e:
            raise click.UsageError(str(e))
        results = [solve(query)]
    record = OutputRecord(
        command="samplesize",
        parameters=parameters,
        rows=[result.model_dump(mode="json") for result in results],
        metadata=BoundsSettings.from_env().metadata(),
    )
    emit(record, fmt, out)


# ---------------------------------------------------------------------------
# reproduction
# ---------------------------------------------------------------------------

@cli.command(name="table1")
@click.option("--format", "fmt", type=FORMATS, default="csv")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def table1_command(fmt, out):
    """True probability against the general discrete and Hoeffding bounds, n = 33."""
    emit(table1(BoundsSettings.from_env(boundary="weak")), fmt, out)


@cli.command(name="table2")
@click.option("--format", "fmt", type=FORMATS, default="csv")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def table2_command(fmt, out):
    """Continuous-case correction factors."""
    emit(table2(BoundsSettings.from_env()), fmt, out)


@cli.command(name="figure-data")
@click.option("--panel", type=click.Choice(PANELS), required=True)
@click.option("--format", "fmt", type=FORMATS, default="csv")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def figure_data_command(panel, fmt, out):
    """Point list behind one figure panel."""
    emit(figure_data(panel, BoundsSettings.from_env()), fmt, out)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def _summary_table(result: SweepResult) -> Table:
    table = Table(title=f"{result.suite}: {result.configs_checked} configurations")
    table.add_column("verdict")
    table.add_column("checks", justify="right")
    table.add_column("boundary", justify="right")
    for verdict, count in result.summary.items():
        table.add_row(verdict, str(count), str(result.boundary_summary.get(verdict, 0)))
    table.add_row("errors", str(len(result.errors)), "")
    return table


def _verify_record(result: SweepResult, fmt: str) -> OutputRecord:
    if fmt == "json":
        rows: List[Dict[str, Any]] = [report.model_dump(mode="json") for report in result.reports]
    else:
        rows = sweep_rows(result)
    return OutputRecord(
        command="verify",
        parameters={k: v for k, v in result.parameters.items() if k not in ("precision_bits", "backend_threshold", "boundary")},
        rows=rows,
        metadata={
            "precision_bits": result.parameters.get("precision_bits"),
            "backend_threshold": result.parameters.get("backend_threshold"),
            "boundary": result.parameters.get("boundary"),
            "status": result.status.value,
            "summary": result.summary,
            "boundary_summary": result.boundary_summary,
            "configs_checked": result.configs_checked,
            "errors": [error.model_dump() for error in result.errors],
        },
    )


async def _record_in_ledger(path: Path, result: SweepResult, report_json: str) -> Dict[str, Any]:
    ledger = VerificationLedger(path)
    return await ledger.record_run(
        result.suite, result.parameters, result.summary, result.status.value, report_json
    )


@cli.command()
@click.option("--suite", type=click.Choice(SUITES), required=True)
@click.option("--kmax", type=click.IntRange(min=1), default=None)
@click.option("--rsmax", type=click.IntRange(min=1), default=None)
@click.option("--nmax", type=click.IntRange(min=2), default=None)
@click.option("--one-sided-kmax", type=click.IntRange(min=1), default=None)
@click.option("--one-sided-rsmax", type=click.IntRange(min=1), default=None)
@click.option("--lemma-nmax", type=click.IntRange(min=1), default=None)
@click.option("--table1", "table1_only", is_flag=True, help="Corollaries over the n = 33 table grids only")
@click.option("--all-checks", is_flag=True, help="Emit every report, not only the noteworthy ones")
@click.option("--precision-bits", type=click.IntRange(min=16), default=None)
@click.option("--jobs", type=click.IntRange(min=1), default=None)
@click.option("--strict", is_flag=True, help="Exit 3 when any verdict is inconclusive")
@click.option("--ledger", "ledger_path", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--format", "fmt", type=FORMATS, default="json")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def verify(suite, kmax, rsmax, nmax, one_sided_kmax, one_sided_rsmax, lemma_nmax,
           table1_only, all_checks, precision_bits, jobs, strict, ledger_path, fmt, out):
    """Run a verification sweep and report PASS / FAIL / INCONCLUSIVE verdicts."""
    settings = BoundsSettings.from_env(precision_bits=precision_bits, jobs=jobs)
    overrides = {
        "kmax": kmax,
        "rsmax": rsmax,
        "nmax": nmax,
        "one_sided_kmax": one_sided_kmax,
        "one_sided_rsmax": one_sided_rsmax,
        "lemma_nmax": lemma_nmax,
    }
    try:
        ranges = SweepRanges(**{**settings.sweep.model_dump(), **{k: v for k, v in overrides.items() if v is not None}})
    except ValidationError as e:
        raise click.UsageError(str(e))

    result = asyncio.run(run_sweep(suite, settings, ranges, table1=table1_only, all_checks=all_checks))
    record = _verify_record(result, fmt)
    emit(record, fmt, out)
    console.print(_summary_table(result))

    if ledger_path is not None:
        entry = asyncio.run(_record_in_ledger(ledger_path, result, to_json(record)))
        console.print(f"ledger: run {entry['run_id']} at position {entry['chain_position']}")

    code = result.exit_code(strict)
    if code:
        raise SystemExit(code)


@cli.command(name="ledger-check")
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def ledger_check(path: Path):
    """Recompute the hash chain of a verification ledger."""
    outcome = asyncio.run(VerificationLedger(path).verify_integrity())
    for problem in outcome["problems"]:
        console.print(f"[red]{escape(problem)}[/red]")
    click.echo(f"{outcome['overall_status']} ({outcome['checks'].get('entries', 0)} runs)")
    if outcome["overall_status"] != "verified":
        raise SystemExit(1)


def main():
    cli(prog_name="bernoulli-bounds")


if __name__ == "__main__":
    main()
