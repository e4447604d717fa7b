"""
Verification Sweeps
===================

Runs one verification suite over its whole parameter range. Configurations
are split into batches that run on an executor (a process pool when more
than one job is requested); the batches are awaited together and their
outcomes merged. A configuration whose check raises is logged and recorded
as an error entry instead of aborting the sweep.

Reports are sorted by configuration key before they are returned, so the
result does not depend on scheduling.
"""

import asyncio
import logging
from collections import Counter
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .config import DEFAULT_SETTINGS, BoundsSettings, SweepRanges
from .errors import DomainError
from .exact_binomial import BernoulliGrid, iter_bernoulli_grids, iter_discrete_grids
from .verify import (
    LEMMA_FUNCTIONS,
    VerificationReport,
    Verdict,
    check_corollaries,
    check_gbound,
    check_lemma1,
    check_median,
    check_one_sided,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    check_theorem4,
    gbound_deltas,
    normalized_limit_report,
    proposition1_report,
    table1_grids,
)

logger = logging.getLogger(__name__)

SUITES = (
    "theorem1",
    "theorem2",
    "theorem3",
    "theorem4",
    "corollaries",
    "one-sided",
    "median",
    "lemma1",
    "gbound",
    "proposition1",
    "normalized",
)
# suites whose single report carries a table; always emitted
TABLE_SUITES = ("proposition1", "normalized")

DEFAULT_BATCH_SIZE = 512


class SweepError(BaseModel):
    model_config = ConfigDict(frozen=True)

    config: str
    error_type: str
    message: str


class SweepResult(BaseModel):
    """Merged outcome of one suite over its configurations."""

    model_config = ConfigDict(frozen=True)

    suite: str
    configs_checked: int
    summary: Dict[str, int]
    boundary_summary: Dict[str, int]
    reports: List[VerificationReport] = Field(default_factory=list)
    errors: List[SweepError] = Field(default_factory=list)
    parameters: Dict[str, Any] = Field(default_factory=dict)

    @property
    def status(self) -> Verdict:
        if self.summary.get(Verdict.FAIL.value, 0):
            return Verdict.FAIL
        if self.summary.get(Verdict.INCONCLUSIVE.value, 0):
            return Verdict.INCONCLUSIVE
        return Verdict.PASS

    def exit_code(self, strict: bool = False) -> int:
        """0 clean, 1 on any FAIL or error, 3 on INCONCLUSIVE under ``strict``."""
        if self.status is Verdict.FAIL or self.errors:
            return 1
        if strict and self.status is Verdict.INCONCLUSIVE:
            return 3
        return 0


# ---------------------------------------------------------------------------
# Configurations
# ---------------------------------------------------------------------------

def _one_sided_configs(ranges: SweepRanges) -> List[Tuple[BernoulliGrid, int]]:
    configs = []
    for k in range(1, ranges.one_sided_kmax + 1):
        for r in range(1, ranges.one_sided_rsmax + 1):
            for s in range(1, r + 1):
                grid = BernoulliGrid(k, r, s)
                configs.extend((grid, nu) for nu in range(1, s + 1))
    return configs


def suite_configs(suite: str, ranges: SweepRanges, table1: bool = False) -> List[Any]:
    """Every configuration a suite checks over ``ranges``."""
    if suite in ("theorem1", "theorem2", "median"):
        return list(iter_bernoulli_grids(ranges.kmax, ranges.rsmax))
    if suite in ("theorem3", "theorem4"):
        return list(iter_discrete_grids(ranges.nmax))
    if suite == "corollaries":
        if table1:
            return list(table1_grids())
        return list(iter_bernoulli_grids(ranges.kmax, ranges.rsmax)) + list(
            iter_discrete_grids(ranges.nmax)
        )
    if suite == "one-sided":
        return _one_sided_configs(ranges)
    if suite == "lemma1":
        return [
            (kind, phi, n)
            for phi, kind in sorted(LEMMA_FUNCTIONS.items())
            for n in range(1, ranges.lemma_nmax + 1)
        ]
    if suite == "gbound":
        return gbound_deltas()
    if suite in TABLE_SUITES:
        return [suite]
    raise DomainError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")


def config_key(suite: str, config: Any) -> str:
    if isinstance(config, tuple) and suite == "one-sided":
        grid, nu = config
        return f"{grid.key},nu={nu:03d}"
    if isinstance(config, tuple):
        _, phi, n = config
        return f"lemma1:{phi}:n={n:04d}"
    if isinstance(config, Fraction):
        return f"gbound:delta={config}"
    if isinstance(config, str):
        return config
    return config.key


def run_check(
    suite: str, config: Any, precision_bits: int, keep_checks: bool = True
) -> VerificationReport:
    """Dispatch one configuration to the check of ``suite``."""
    if suite == "theorem1":
        return check_theorem1(config, precision_bits, keep_checks)
    if suite == "theorem2":
        return check_theorem2(config, precision_bits, keep_checks)
    if suite == "theorem3":
        return check_theorem3(config, precision_bits, keep_checks)
    if suite == "theorem4":
        return check_theorem4(config, precision_bits, keep_checks)
    if suite == "corollaries":
        return check_corollaries(config, precision_bits, keep_checks)
    if suite == "one-sided":
        grid, nu = config
        return check_one_sided(grid, nu, precision_bits, keep_checks)
    if suite == "median":
        return check_median(config, keep_checks)
    if suite == "lemma1":
        kind, phi, n = config
        return check_lemma1(kind, phi, n, precision_bits, keep_checks)
    if suite == "gbound":
        return check_gbound(config, precision_bits, keep_checks)
    if suite == "proposition1":
        return proposition1_report(precision_bits=precision_bits)
    if suite == "normalized":
        return normalized_limit_report()
    raise DomainError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")


# ---------------------------------------------------------------------------
# Batches
# ---------------------------------------------------------------------------

def _noteworthy(report: VerificationReport) -> bool:
    if report.status is not Verdict.PASS or report.suite in TABLE_SUITES:
        return True
    if any(report.boundary_summary.get(v.value, 0) for v in (Verdict.FAIL, Verdict.INCONCLUSIVE)):
        return True
    return report.details.get("weak_holds") is False


def run_batch(
    suite: str, configs: List[Any], precision_bits: int, all_checks: bool = False
) -> Dict[str, Any]:
    """
    Check a batch of configurations.

    Module-level so it can be shipped to a process pool. Only noteworthy
    reports are returned unless ``all_checks`` is set; verdict counts always
    cover the whole batch.
    """
    counts: Counter = Counter()
    boundary: Counter = Counter()
    reports: List[VerificationReport] = []
    errors: List[SweepError] = []
    for config in configs:
        try:
            report = run_check(suite, config, precision_bits, keep_checks=all_checks)
        except Exception as e:
            key = config_key(suite, config)
            logger.error(f"{suite} check failed for {key}: {str(e)}")
            errors.append(SweepError(config=key, error_type=type(e).__name__, message=str(e)))
            continue
        counts.update(report.summary)
        boundary.update(report.boundary_summary)
        if all_checks or _noteworthy(report):
            reports.append(report)
    return {
        "counts": dict(counts),
        "boundary": dict(boundary),
        "reports": reports,
        "errors": errors,
    }


def _executor(jobs: int) -> Executor:
    if jobs > 1:
        return ProcessPoolExecutor(max_workers=jobs)
    return ThreadPoolExecutor(max_workers=1)


async def run_sweep(
    suite: str,
    settings: Optional[BoundsSettings] = None,
    ranges: Optional[SweepRanges] = None,
    table1: bool = False,
    all_checks: bool = False,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> SweepResult:
    """Run ``suite`` over its configurations and merge the batch outcomes."""
    settings = settings or DEFAULT_SETTINGS
    ranges = ranges or settings.sweep
    configs = suite_configs(suite, ranges, table1)
    batches = [configs[i:i + batch_size] for i in range(0, len(configs), batch_size)]
    logger.info(
        f"Starting {suite} sweep: {len(configs)} configurations in {len(batches)} batches "
        f"({settings.jobs} job(s), {settings.precision_bits}-bit enclosures)"
    )

    loop = asyncio.get_running_loop()
    executor = _executor(settings.jobs)
    try:
        tasks = [
            loop.run_in_executor(
                executor, run_batch, suite, batch, settings.precision_bits, all_checks
            )
            for batch in batches
        ]
        outcomes = await asyncio.gather(*tasks, return_exceptions=True)
    finally:
        executor.shutdown(wait=True)

    counts: Counter = Counter({v.value: 0 for v in Verdict})
    boundary: Counter = Counter({v.value: 0 for v in Verdict})
    reports: List[VerificationReport] = []
    errors: List[SweepError] = []
    for batch, outcome in zip(batches, outcomes):
        if isinstance(outcome, BaseException):
            logger.error(f"{suite} batch failed: {str(outcome)}")
            errors.extend(
                SweepError(
                    config=config_key(suite, config),
                    error_type=type(outcome).__name__,
                    message=str(outcome),
                )
                for config in batch
            )
            continue
        counts.update(outcome["counts"])
        boundary.update(outcome["boundary"])
        reports.extend(outcome["reports"])
        errors.extend(outcome["errors"])

    result = SweepResult(
        suite=suite,
        configs_checked=len(configs),
        summary={v.value: counts[v.value] for v in Verdict},
        boundary_summary={v.value: boundary[v.value] for v in Verdict},
        reports=sorted(reports, key=lambda report: report.config),
        errors=sorted(errors, key=lambda error: error.config),
        parameters={
            "suite": suite,
            "table1": table1,
            "all_checks": all_checks,
            "ranges": ranges.model_dump(),
            **settings.metadata(),
        },
    )
    logger.info(
        f"Finished {suite} sweep: {result.status.value} "
        f"({result.summary}, {len(result.errors)} error(s))"
    )
    return result


def sweep_rows(result: SweepResult) -> List[Dict[str, Any]]:
    """One flat row per check of the emitted reports, for CSV output."""
    rows: List[Dict[str, Any]] = []
    for report in result.reports:
        ratio_checks = list(report.checks) + list(report.boundary_checks)
        if report.consequence is not None:
            ratio_checks.append(report.consequence)
        for check in ratio_checks:
            rows.append({
                "config": report.config,
                "kind": "ratio" if check.full_size else "boundary",
                "j": check.j,
                "label": check.label,
                "lhs": check.lhs,
                "required": check.required,
                "verdict": check.verdict.value,
                "margin": check.margin,
            })
        for tail in report.tail_vs_bound:
            rows.append({
                "config": report.config,
                "kind": "tail",
                "j": "",
                "label": tail.label,
                "lhs": tail.tail_decimal,
                "required": tail.bound,
                "verdict": tail.verdict.value,
                "margin": tail.margin,
            })
        for prop in report.property_checks:
            rows.append({
                "config": report.config,
                "kind": "property",
                "j": "",
                "label": prop.label,
                "lhs": prop.value if prop.value is not None else "",
                "required": "",
                "verdict": prop.verdict.value,
                "margin": "",
            })
    return rows
