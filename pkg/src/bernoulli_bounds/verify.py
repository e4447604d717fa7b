"""
Verification Harness
====================

Exact-arithmetic certification of the group-ratio theorems, the tail
corollaries, the one-sided and median inequalities, the convexity lemma and
the logarithm inequality, one configuration at a time. Running a check over a
whole parameter range is the job of ``sweep``.

Every transcendental threshold is bracketed by an ``Enclosure``. A check
passes only when the exact left-hand side clears the whole enclosure, fails
only when it misses the whole enclosure, and is inconclusive otherwise.
"""

import logging
import math
from collections import Counter
from decimal import ROUND_HALF_UP, Decimal, localcontext
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .bounds import (
    bernoulli_sharp_bound,
    continuous_bound,
    general_discrete_bound,
    hoeffding_bound,
    normalized_hoeffding_bound,
    normalized_sum_bound,
)
from .config import DEFAULT_SETTINGS
from .enclosure import Enclosure, exp_enclosure, log_enclosure, sqrt_enclosure
from .errors import DomainError, RegimeError
from .exact_binomial import (
    BernoulliGrid,
    DiscreteGrid,
    Grid,
    RationalLike,
    as_fraction,
    central_pmf_ratio,
    range_probability,
    scaled_groups,
    tail_probability,
)

logger = logging.getLogger(__name__)

DECIMAL_DIGITS = 20
PROPOSITION1_NS = (10, 100, 1000, 10000)
NORMALIZED_NS = (100, 10_000, 1_000_000)
LEMMA_FUNCTIONS: Dict[str, str] = {
    "reciprocal": "convex",
    "neglog": "convex",
    "log": "concave",
    "sqrt": "concave",
}


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class RatioCheck(BaseModel):
    """A certified inequality lhs >= required, e.g. λ_j = Z_j/Z_{j+1} >= b."""

    model_config = ConfigDict(frozen=True)

    j: int
    label: str
    lhs: str
    required: float
    verdict: Verdict
    margin: Optional[float] = None
    enclosure_width: float = 0.0
    full_size: bool = True


class TailCheck(BaseModel):
    """An exact tail probability compared against a bound value."""

    model_config = ConfigDict(frozen=True)

    label: str
    tail: str
    tail_decimal: str
    bound: float
    verdict: Verdict
    margin: Optional[float] = None
    enclosure_width: float = 0.0


class PropertyCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    verdict: Verdict
    value: Optional[str] = None


class VerificationReport(BaseModel):
    """
    Verdicts for one configuration of one suite.

    ``summary`` counts ratio, consequence, tail and property verdicts;
    ``boundary_summary`` counts the checks involving a short terminal group,
    which are reported but not covered by the theorems.
    """

    model_config = ConfigDict(frozen=True)

    config: str
    suite: str
    checks: List[RatioCheck] = Field(default_factory=list)
    boundary_checks: List[RatioCheck] = Field(default_factory=list)
    consequence: Optional[RatioCheck] = None
    tail_vs_bound: List[TailCheck] = Field(default_factory=list)
    property_checks: List[PropertyCheck] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)
    summary: Dict[str, int] = Field(default_factory=dict)
    boundary_summary: Dict[str, int] = Field(default_factory=dict)

    @property
    def status(self) -> Verdict:
        if self.summary.get(Verdict.FAIL.value, 0):
            return Verdict.FAIL
        if self.summary.get(Verdict.INCONCLUSIVE.value, 0):
            return Verdict.INCONCLUSIVE
        return Verdict.PASS


class _ReportBuilder:
    """Collects verdicts; materializes check models only when they are kept."""

    def __init__(self, config: str, suite: str, keep_checks: bool = True):
        self.config = config
        self.suite = suite
        self.keep_checks = keep_checks
        self.counts: Counter = Counter()
        self.boundary_counts: Counter = Counter()
        self.checks: List[RatioCheck] = []
        self.boundary: List[RatioCheck] = []
        self.consequence: Optional[RatioCheck] = None
        self.tails: List[TailCheck] = []
        self.properties: List[PropertyCheck] = []
        self.notes: List[str] = []
        self.details: Dict[str, Any] = {}

    def _keep(self, verdict: Verdict) -> bool:
        return self.keep_checks or verdict is not Verdict.PASS

    def ratio(self, verdict: Verdict, build: Callable[[], RatioCheck], boundary: bool = False):
        if boundary:
            self.boundary_counts[verdict.value] += 1
            if self._keep(verdict):
                self.boundary.append(build())
            return
        self.counts[verdict.value] += 1
        if self._keep(verdict):
            self.checks.append(build())

    def set_consequence(self, verdict: Verdict, build: Callable[[], RatioCheck], boundary: bool):
        if boundary:
            self.ratio(verdict, build, boundary=True)
            return
        self.counts[verdict.value] += 1
        if self._keep(verdict):
            self.consequence = build()

    def tail(self, verdict: Verdict, build: Callable[[], TailCheck]):
        self.counts[verdict.value] += 1
        if self._keep(verdict):
            self.tails.append(build())

    def prop(self, label: str, verdict: Verdict, value: Optional[str] = None):
        self.counts[verdict.value] += 1
        self.properties.append(PropertyCheck(label=label, verdict=verdict, value=value))

    def note(self, message: str):
        self.notes.append(message)

    def build(self) -> VerificationReport:
        report = VerificationReport(
            config=self.config,
            suite=self.suite,
            checks=self.checks,
            boundary_checks=self.boundary,
            consequence=self.consequence,
            tail_vs_bound=self.tails,
            property_checks=self.properties,
            notes=self.notes,
            details=self.details,
            summary={v.value: self.counts[v.value] for v in Verdict},
            boundary_summary={v.value: self.boundary_counts[v.value] for v in Verdict},
        )
        if report.status is not Verdict.PASS:
            logger.warning(f"{self.suite} {self.config}: {report.status.value}")
        return report


# ---------------------------------------------------------------------------
# Certified comparisons
# ---------------------------------------------------------------------------

def _precision(precision_bits: Optional[int]) -> int:
    return precision_bits or DEFAULT_SETTINGS.precision_bits


@lru_cache(maxsize=8192)
def exp_threshold(x: Fraction, precision_bits: int) -> Enclosure:
    """Cached enclosure of exp(x); sweeps reuse one factor across many grids."""
    return exp_enclosure(x, precision_bits)


def decimal_string(numerator: int, denominator: int, digits: int = DECIMAL_DIGITS) -> str:
    """numerator/denominator rounded half away from zero to ``digits`` significant digits."""
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_UP
        return str(Decimal(numerator) / Decimal(denominator))


def _exp_float(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _log_ratio(numerator: int, denominator: int) -> Optional[float]:
    if numerator == 0:
        return None
    return math.log(numerator) - math.log(denominator)


def certify_at_least(
    numerator: int, denominator: int, x: Fraction, precision_bits: int
) -> Tuple[Verdict, Optional[float], Enclosure]:
    """Verdict for numerator/denominator >= exp(x), with the log-domain margin."""
    enc = exp_threshold(x, precision_bits)
    upper, lower = enc.upper, enc.lower
    if numerator * upper.denominator >= upper.numerator * denominator:
        verdict = Verdict.PASS
    elif numerator * lower.denominator < lower.numerator * denominator:
        verdict = Verdict.FAIL
    else:
        verdict = Verdict.INCONCLUSIVE
    log_lhs = _log_ratio(numerator, denominator)
    margin = None if log_lhs is None else log_lhs - float(x)
    return verdict, margin, enc


def certify_below(
    numerator: int, denominator: int, x: Fraction, precision_bits: int, strict: bool = True
) -> Tuple[Verdict, Optional[float], Enclosure]:
    """Verdict for numerator/denominator < exp(-x) (or <= when not ``strict``)."""
    enc = exp_threshold(-x, precision_bits)
    lhs_lower = numerator * enc.lower.denominator
    rhs_lower = enc.lower.numerator * denominator
    lhs_upper = numerator * enc.upper.denominator
    rhs_upper = enc.upper.numerator * denominator
    if strict:
        below = lhs_lower < rhs_lower
        above = lhs_upper >= rhs_upper
    else:
        below = lhs_lower <= rhs_lower
        above = lhs_upper > rhs_upper
    verdict = Verdict.PASS if below else Verdict.FAIL if above else Verdict.INCONCLUSIVE
    log_lhs = _log_ratio(numerator, denominator)
    margin = None if log_lhs is None else -float(x) - log_lhs
    return verdict, margin, enc


# ---------------------------------------------------------------------------
# Group ratio theorems
# ---------------------------------------------------------------------------

def _ratio_checks(
    builder: _ReportBuilder,
    groups: Sequence[int],
    full: int,
    x: Fraction,
    precision_bits: int,
    label: str,
) -> None:
    required = _exp_float(float(x))
    for j in range(1, len(groups)):
        num, den = groups[j - 1], groups[j]
        verdict, margin, enc = certify_at_least(num, den, x, precision_bits)
        full_size = j + 1 <= full

        def build(j=j, num=num, den=den, verdict=verdict, margin=margin, enc=enc, full_size=full_size):
            return RatioCheck(
                j=j,
                label=label,
                lhs=decimal_string(num, den),
                required=required,
                verdict=verdict,
                margin=margin,
                enclosure_width=float(enc.width),
                full_size=full_size,
            )

        builder.ratio(verdict, build, boundary=not full_size)


def _consequence_check(
    builder: _ReportBuilder,
    groups: Sequence[int],
    full: int,
    x: Fraction,
    precision_bits: int,
    label: str,
) -> None:
    """(b - 1)·P2 <= P1, certified as (P1 + P2)/P2 >= b."""
    if len(groups) < 2:
        return
    near, far = groups[0], sum(groups[1:])
    verdict, margin, enc = certify_at_least(near + far, far, x, precision_bits)

    def build():
        return RatioCheck(
            j=0,
            label=label,
            lhs=decimal_string(near, far),
            required=_exp_float(float(x)) - 1.0,
            verdict=verdict,
            margin=margin,
            enclosure_width=float(enc.width),
            full_size=len(groups) <= full,
        )

    builder.set_consequence(verdict, build, boundary=len(groups) > full)


def _vacuous(builder: _ReportBuilder, reason: str) -> VerificationReport:
    builder.note(f"vacuous: {reason}")
    builder.prop("vacuous", Verdict.PASS)
    return builder.build()


def check_theorem1(
    grid: BernoulliGrid, precision_bits: Optional[int] = None, keep_checks: bool = True
) -> VerificationReport:
    """Z_j >= exp(2ε²n)·Z_{j+1} for j = 1..s-1, plus (b-1)·P+2 <= P+1."""
    precision = _precision(precision_bits)
    builder = _ReportBuilder(grid.key, "theorem1", keep_checks)
    if grid.s < 2:
        return _vacuous(builder, "s = 1 leaves a single right group, so P+2 = 0")
    scaled = scaled_groups(grid)
    x = Fraction(2 * grid.k, grid.r + grid.s)
    builder.details["factor_exponent"] = str(x)
    _ratio_checks(builder, scaled.right, scaled.full_right, x, precision, "lambda")
    _consequence_check(builder, scaled.right, scaled.full_right, x, precision, "upper-consequence")
    return builder.build()


def check_theorem2(
    grid: BernoulliGrid, precision_bits: Optional[int] = None, keep_checks: bool = True
) -> VerificationReport:
    """S_j >= exp(2ε²n)·S_{j+1} for j = 1..r-1, plus (b-1)·P-2 <= P-1."""
    precision = _precision(precision_bits)
    builder = _ReportBuilder(grid.key, "theorem2", keep_checks)
    if grid.r < 2:
        return _vacuous(builder, "r = 1 leaves a single left group, so P-2 = 0")
    scaled = scaled_groups(grid)
    x = Fraction(2 * grid.k, grid.r + grid.s)
    builder.details["factor_exponent"] = str(x)
    _ratio_checks(builder, scaled.left, scaled.full_left, x, precision, "q")
    _consequence_check(builder, scaled.left, scaled.full_left, x, precision, "lower-consequence")
    return builder.build()


def _upper_half(grid: DiscreteGrid, builder: _ReportBuilder) -> DiscreteGrid:
    """Map p < 1/2 onto the mirrored grid, where the discrete theorems are stated."""
    if 2 * grid.m < grid.n:
        mirrored = grid.mirrored()
        builder.note(f"p < 1/2: checked on the mirrored grid {mirrored.key}")
        builder.details["mirrored"] = mirrored.key
        return mirrored
    return grid


def _short_group_note(builder: _ReportBuilder, groups: Sequence[int], full: int, side: str):
    if len(groups) > full:
        builder.note(
            f"{side} side ends in a short group; ratios involving it are boundary checks"
        )


def check_theorem3(
    grid: DiscreteGrid, precision_bits: Optional[int] = None, keep_checks: bool = True
) -> VerificationReport:
    """Right-group ratios of a discrete grid against exp(2ε²n) = exp(2k²/n)."""
    precision = _precision(precision_bits)
    builder = _ReportBuilder(grid.key, "theorem3", keep_checks)
    grid = _upper_half(grid, builder)
    scaled = scaled_groups(grid)
    if len(scaled.right) < 2:
        return _vacuous(builder, "fewer than two right groups")
    x = Fraction(2 * grid.k * grid.k, grid.n)
    builder.details["factor_exponent"] = str(x)
    _short_group_note(builder, scaled.right, scaled.full_right, "right")
    _ratio_checks(builder, scaled.right, scaled.full_right, x, precision, "lambda")
    _consequence_check(builder, scaled.right, scaled.full_right, x, precision, "upper-consequence")
    return builder.build()


def theorem4_exponent(grid: DiscreteGrid) -> Fraction:
    """2ε²n/(1+ε²) = 2k²n/(n²+k²); for k = 1 the stronger 2ε²n = 2/n."""
    n, k = grid.n, grid.k
    if k == 1:
        return Fraction(2, n)
    return Fraction(2 * k * k * n, n * n + k * k)


def check_theorem4(
    grid: DiscreteGrid, precision_bits: Optional[int] = None, keep_checks: bool = True
) -> VerificationReport:
    """Left-group ratios of a discrete grid against exp(2ε²n/(1+ε²))."""
    precision = _precision(precision_bits)
    builder = _ReportBuilder(grid.key, "theorem4", keep_checks)
    grid = _upper_half(grid, builder)
    if grid.k == 1:
        builder.note("k = 1: checked against the stronger factor exp(2ε²n)")
    scaled = scaled_groups(grid)
    if len(scaled.left) < 2:
        return _vacuous(builder, "fewer than two left groups")
    x = theorem4_exponent(grid)
    builder.details["factor_exponent"] = str(x)
    _short_group_note(builder, scaled.left, scaled.full_left, "left")
    _ratio_checks(builder, scaled.left, scaled.full_left, x, precision, "q")
    _consequence_check(builder, scaled.left, scaled.full_left, x, precision, "lower-consequence")
    return builder.build()


# ---------------------------------------------------------------------------
# Tail corollaries
# ---------------------------------------------------------------------------

def _tail_check(
    builder: _ReportBuilder,
    label: str,
    tail: Fraction,
    x: Fraction,
    precision_bits: int,
    factor: int = 1,
    strict: bool = True,
) -> Verdict:
    """tail < exp(-x)/factor (or <=), compared as factor·tail against exp(-x)."""
    scaled = tail * factor
    verdict, margin, enc = certify_below(
        scaled.numerator, scaled.denominator, x, precision_bits, strict=strict
    )

    def build():
        return TailCheck(
            label=label,
            tail=str(tail),
            tail_decimal=decimal_string(tail.numerator, tail.denominator),
            bound=_exp_float(-float(x)) / factor,
            verdict=verdict,
            margin=margin,
            enclosure_width=float(enc.width) / factor,
        )

    builder.tail(verdict, build)
    return verdict


def _central_tail(grid: Grid) -> Fraction:
    """Strict two-sided tail |j - m| > k from the group masses."""
    scaled = scaled_groups(grid)
    inside = scaled.p0 + scaled.left[0] + scaled.right[0]
    return Fraction(scaled.denominator - inside, scaled.denominator)


def check_corollaries(
    grid: Grid, precision_bits: Optional[int] = None, keep_checks: bool = True
) -> VerificationReport:
    """
    Exact strict tail < exp(-2ε²n) on Bernoulli grids, and
    < exp(-2ε²n/(1+ε²)) on discrete grids with 2 <= k < n.
    """
    precision = _precision(precision_bits)
    builder = _ReportBuilder(grid.key, "corollaries", keep_checks)
    if isinstance(grid, DiscreteGrid):
        oriented = _upper_half(grid, builder)
        bernoulli = oriented.as_bernoulli()
        if bernoulli is not None:
            builder.note(f"k = 1: checked as {bernoulli.key} against exp(-2ε²n)")
            x = Fraction(2, grid.n)
            target = bernoulli
        else:
            x = theorem4_exponent(oriented)
            target = oriented
    else:
        x = Fraction(2 * grid.k, grid.r + grid.s)
        target = grid
    builder.details["bound_exponent"] = str(-x)
    _tail_check(builder, "two-sided strict", _central_tail(target), x, precision)
    return builder.build()


def table1_grids() -> List[DiscreteGrid]:
    """The fourteen rows of the n = 33, p = 15/33 table, mirrored to m = 18."""
    return [DiscreteGrid(33, 15, k).mirrored() for k in range(2, 16)]


# ---------------------------------------------------------------------------
# One-sided and median inequalities
# ---------------------------------------------------------------------------

def one_sided_exponent(grid: BernoulliGrid, nu: int) -> Fraction:
    """nδ²/(2p(1-p)) = kν²(r+s)/(2rs) for δ = ν/(r+s)."""
    return Fraction(grid.k * nu * nu * (grid.r + grid.s), 2 * grid.r * grid.s)


def check_one_sided(
    grid: BernoulliGrid, nu: int, precision_bits: Optional[int] = None, keep_checks: bool = True
) -> VerificationReport:
    """
    P(X̄ - p > δ) <= ½·exp(-nδ²/(2p(1-p))) for r >= s, and the lower-tail
    form for r <= s; both forms are checked when r = s.
    """
    if nu < 1:
        raise DomainError(f"nu must be a natural number, got {nu}")
    precision = _precision(precision_bits)
    builder = _ReportBuilder(f"{grid.key},nu={nu:03d}", "one-sided", keep_checks)
    n, m, shift = grid.n, grid.m, grid.k * nu
    x = one_sided_exponent(grid, nu)
    builder.details["bound_exponent"] = str(-x)
    if grid.r >= grid.s:
        upper = range_probability(n, grid.p, m + shift + 1, n)
        _tail_check(builder, "upper", upper, x, precision, factor=2, strict=False)
    if grid.r <= grid.s:
        lower = range_probability(n, grid.p, 0, m - shift - 1)
        _tail_check(builder, "lower", lower, x, precision, factor=2, strict=False)
    return builder.build()


def check_median(grid: Grid, keep_checks: bool = True) -> VerificationReport:
    """
    P(X̄ > p) <= 1/2 for p >= 1/2, by exact evaluation.

    The weak form P(X̄ >= p) is recorded alongside; grids where only the
    strict form holds are flagged in the notes. The minimum ratio of the
    point masses placed symmetrically about the centre must exceed 1.
    """
    builder = _ReportBuilder(grid.key, "median", keep_checks)
    if 2 * grid.m < grid.n:
        grid = grid.mirrored()
        builder.note(f"p < 1/2: checked on the mirrored grid {grid.key}")
    n, m, p = grid.n, grid.m, grid.p
    strict = range_probability(n, p, m + 1, n)
    weak = strict + range_probability(n, p, m, m)
    half = Fraction(1, 2)
    builder.prop(
        "strict-at-most-half",
        Verdict.PASS if strict <= half else Verdict.FAIL,
        decimal_string(strict.numerator, strict.denominator),
    )
    min_ratio = min(central_pmf_ratio(grid, i) for i in range(1, n - m + 1))
    builder.prop(
        "symmetric-pairs-dominate",
        Verdict.PASS if min_ratio > 1 else Verdict.FAIL,
        decimal_string(min_ratio.numerator, min_ratio.denominator),
    )
    builder.details.update({
        "strict": str(strict),
        "weak": str(weak),
        "weak_holds": weak <= half,
    })
    if weak > half:
        builder.note("only the strict form holds: P(X̄ >= p) > 1/2")
    return builder.build()


# ---------------------------------------------------------------------------
# Convexity lemma and the logarithm inequality
# ---------------------------------------------------------------------------

def _lemma_verdict(phi: str, n: int, precision_bits: int) -> Tuple[Verdict, float, float, float]:
    """(verdict, lhs, rhs, enclosure width) for the sum inequality of ``phi``."""
    if phi == "reciprocal":
        # Σ 1/j >= 2n/(n+1)
        scale = math.lcm(*range(1, n + 1))
        numerator = sum(scale // j for j in range(1, n + 1))
        verdict = Verdict.PASS if numerator * (n + 1) >= 2 * n * scale else Verdict.FAIL
        return verdict, numerator / scale, 2 * n / (n + 1), 0.0
    if phi == "neglog":
        # -log n! >= -n log((n+1)/2)  <=>  n!·2^n <= (n+1)^n
        holds = math.factorial(n) * 2 ** n <= (n + 1) ** n
        return (
            Verdict.PASS if holds else Verdict.FAIL,
            -math.lgamma(n + 1),
            -n * math.log((n + 1) / 2),
            0.0,
        )
    if phi == "log":
        # log n! >= (n/2) log n  <=>  (n!)² >= n^n
        holds = math.factorial(n) ** 2 >= n ** n
        return Verdict.PASS if holds else Verdict.FAIL, math.lgamma(n + 1), n * math.log(n) / 2, 0.0
    if phi == "sqrt":
        # Σ sqrt(j) >= n(1 + sqrt(n))/2; the two sides coincide term by term for n <= 2
        lhs_float = math.fsum(math.sqrt(j) for j in range(1, n + 1))
        rhs_float = n * (1 + math.sqrt(n)) / 2
        if n <= 2:
            return Verdict.PASS, lhs_float, rhs_float, 0.0
        terms = [sqrt_enclosure(Fraction(j), precision_bits) for j in range(1, n + 1)]
        lhs = Enclosure(sum(t.lower for t in terms), sum(t.upper for t in terms))
        root = sqrt_enclosure(Fraction(n), precision_bits)
        rhs = Enclosure((1 + root.lower) * n / 2, (1 + root.upper) * n / 2)
        if lhs.lower >= rhs.upper:
            verdict = Verdict.PASS
        elif lhs.upper < rhs.lower:
            verdict = Verdict.FAIL
        else:
            verdict = Verdict.INCONCLUSIVE
        return verdict, lhs_float, rhs_float, float(lhs.width + rhs.width)
    raise DomainError(f"unknown function {phi!r}; choose from {sorted(LEMMA_FUNCTIONS)}")


def check_lemma1(
    kind: str, phi: str, n: int, precision_bits: Optional[int] = None, keep_checks: bool = True
) -> VerificationReport:
    """
    Σ_{j=1}^n φ(j) >= n·φ((n+1)/2) for the convex functions and
    Σ φ(j) >= n·(φ(1)+φ(n))/2 for the concave ones.
    """
    if phi not in LEMMA_FUNCTIONS:
        raise DomainError(f"unknown function {phi!r}; choose from {sorted(LEMMA_FUNCTIONS)}")
    if LEMMA_FUNCTIONS[phi] != kind:
        raise DomainError(f"function {phi!r} is {LEMMA_FUNCTIONS[phi]}, not {kind}")
    if n < 1:
        raise DomainError(f"n must be a natural number, got {n}")
    builder = _ReportBuilder(f"lemma1:{phi}:n={n:04d}", "lemma1", keep_checks)
    verdict, lhs, rhs, width = _lemma_verdict(phi, n, _precision(precision_bits))

    def build():
        return RatioCheck(
            j=n,
            label=kind,
            lhs=f"{lhs:.15g}",
            required=rhs,
            verdict=verdict,
            margin=lhs - rhs,
            enclosure_width=width,
        )

    builder.ratio(verdict, build)
    return builder.build()


def gbound_deltas(upper: int = 100, steps_per_unit: int = 100) -> List[Fraction]:
    """The δ-grid 0, 1/steps, 2/steps, ..., upper."""
    return [Fraction(i, steps_per_unit) for i in range(upper * steps_per_unit + 1)]


def check_gbound(
    delta: RationalLike, precision_bits: Optional[int] = None, keep_checks: bool = True
) -> VerificationReport:
    """log(1+δ) >= 2δ/(2+δ) for δ >= 0, with the logarithm enclosed."""
    delta = as_fraction(delta)
    if delta < 0:
        raise DomainError(f"delta must be non-negative, got {delta}")
    builder = _ReportBuilder(f"gbound:delta={delta}", "gbound", keep_checks)
    rhs = 2 * delta / (2 + delta)
    enc = log_enclosure(1 + delta, _precision(precision_bits))
    if enc.lower >= rhs:
        verdict = Verdict.PASS
    elif enc.upper < rhs:
        verdict = Verdict.FAIL
    else:
        verdict = Verdict.INCONCLUSIVE

    def build():
        return RatioCheck(
            j=0,
            label="log1p",
            lhs=f"{math.log1p(float(delta)):.15g}",
            required=float(rhs),
            verdict=verdict,
            margin=float(enc.lower - rhs),
            enclosure_width=float(enc.width),
        )

    builder.ratio(verdict, build)
    return builder.build()


# ---------------------------------------------------------------------------
# Deviation sequence with vanishing ε²n
# ---------------------------------------------------------------------------

class Proposition1Row(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    eps: str
    deviation: str
    eps_squared_n: str
    p0: Optional[str] = None
    p0_bound: float
    p0_bound_verdict: Optional[Verdict] = None
    near_points: int


class Proposition1Table(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: str
    rows: List[Proposition1Row]
    deviation_non_decreasing: bool
    eps_squared_n_decreasing: bool
    max_deviation: str


def _p0_bound_enclosure(n: int, p: Fraction, precision_bits: int) -> Enclosure:
    """(p^p (1+p)^(1-p))^n enclosed through its logarithm."""
    log_value = (
        log_enclosure(p, precision_bits + 16).scale(n * p)
        + log_enclosure(1 + p, precision_bits + 16).scale(n * (1 - p))
    )
    return Enclosure(
        exp_enclosure(log_value.lower, precision_bits).lower,
        exp_enclosure(log_value.upper, precision_bits).upper,
    )


def _near_points(n: int, p: Fraction) -> int:
    """Lattice points j != np with |j - np| <= 1/2, i.e. within ε = 1/(2n) of p."""
    centre = n * p
    half = Fraction(1, 2)
    lo, hi = math.ceil(centre - half), math.floor(centre + half)
    return sum(1 for j in range(lo, hi + 1) if j != centre)


def check_proposition1(
    n_list: Sequence[int] = PROPOSITION1_NS,
    p: RationalLike = Fraction(1, 2),
    precision_bits: Optional[int] = None,
) -> Proposition1Table:
    """
    Exact deviation probabilities at ε = 1/(2n), which tend to 1 while
    ε²n = 1/(4n) tends to 0.

    Each row also carries the central mass P0 (when np is a lattice point)
    and the verdict of P0 <= (p^p (1+p)^(1-p))^n. That verdict is a
    diagnostic: the inequality does not hold for every n.
    """
    p = as_fraction(p)
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    precision = _precision(precision_bits)
    rows: List[Proposition1Row] = []
    deviations: List[Fraction] = []
    for n in n_list:
        if n < 1:
            raise DomainError(f"n must be a natural number, got {n}")
        eps = Fraction(1, 2 * n)
        deviation = tail_probability(n, p, eps, "two", "strict")
        deviations.append(deviation)
        bound = _p0_bound_enclosure(n, p, precision)
        centre = n * p
        p0_text, verdict = None, None
        if centre.denominator == 1:
            p0 = range_probability(n, p, int(centre), int(centre))
            p0_text = decimal_string(p0.numerator, p0.denominator)
            if p0 <= bound.lower:
                verdict = Verdict.PASS
            elif p0 > bound.upper:
                verdict = Verdict.FAIL
            else:
                verdict = Verdict.INCONCLUSIVE
        near = _near_points(n, p)
        if near:
            logger.info(f"n={n}: {near} lattice point(s) within eps of np")
        rows.append(Proposition1Row(
            n=n,
            eps=str(eps),
            deviation=decimal_string(deviation.numerator, deviation.denominator),
            eps_squared_n=str(eps * eps * n),
            p0=p0_text,
            p0_bound=bound.midpoint,
            p0_bound_verdict=verdict,
            near_points=near,
        ))
    eps2n = [Fraction(1, 4 * n) for n in n_list]
    best = max(deviations) if deviations else Fraction(0)
    return Proposition1Table(
        p=str(p),
        rows=rows,
        deviation_non_decreasing=all(a <= b for a, b in zip(deviations, deviations[1:])),
        eps_squared_n_decreasing=all(a > b for a, b in zip(eps2n, eps2n[1:])),
        max_deviation=decimal_string(best.numerator, best.denominator),
    )


def proposition1_report(
    n_list: Sequence[int] = PROPOSITION1_NS,
    p: RationalLike = Fraction(1, 2),
    precision_bits: Optional[int] = None,
) -> VerificationReport:
    table = check_proposition1(n_list, p, precision_bits)
    builder = _ReportBuilder(f"proposition1:p={table.p}", "proposition1")
    builder.prop(
        "deviation-non-decreasing",
        Verdict.PASS if table.deviation_non_decreasing else Verdict.FAIL,
    )
    builder.prop(
        "eps-squared-n-decreasing",
        Verdict.PASS if table.eps_squared_n_decreasing else Verdict.FAIL,
    )
    builder.prop(
        "deviation-exceeds-0.9",
        Verdict.PASS if Decimal(table.max_deviation) > Decimal("0.9") else Verdict.FAIL,
        table.max_deviation,
    )
    builder.details["rows"] = [row.model_dump(mode="json") for row in table.rows]
    for row in table.rows:
        if row.p0_bound_verdict is Verdict.FAIL:
            builder.note(f"n={row.n}: P0 exceeds (p^p (1+p)^(1-p))^n")
        if row.near_points:
            builder.note(f"n={row.n}: {row.near_points} lattice point(s) within eps of np")
    return builder.build()


# ---------------------------------------------------------------------------
# Normalized-sum limit
# ---------------------------------------------------------------------------

class NormalizedLimitRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    eps: float
    bernoulli_sharp: float
    general_discrete: float
    continuous: Optional[float] = None
    hoeffding: float


class NormalizedLimitTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float
    t: float
    limit: float
    hoeffding_limit: float
    rows: List[NormalizedLimitRow]

    def max_gap(self) -> float:
        """Largest distance from the limits in the last row."""
        if not self.rows:
            return 0.0
        last = self.rows[-1]
        gaps = [
            abs(last.bernoulli_sharp - self.limit),
            abs(last.general_discrete - self.limit),
            abs(last.hoeffding - self.hoeffding_limit),
        ]
        if last.continuous is not None:
            gaps.append(abs(last.continuous - self.limit))
        return max(gaps)


def check_normalized_limit(
    p: float, t: float, n_list: Sequence[int] = NORMALIZED_NS
) -> NormalizedLimitTable:
    """
    Bounds at ε = t·sqrt(p(1-p)/n) for growing n, next to their limits
    exp(-2t²p(1-p)) and, for Hoeffding's α = 2, twice that.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t}")
    rows = []
    for n in n_list:
        eps = t * math.sqrt(p * (1.0 - p) / n)
        try:
            continuous = continuous_bound(n, p, eps).value
        except RegimeError as e:
            logger.debug(f"continuous bound skipped at n={n}: {e}")
            continuous = None
        rows.append(NormalizedLimitRow(
            n=n,
            eps=eps,
            bernoulli_sharp=bernoulli_sharp_bound(n, eps).value,
            general_discrete=general_discrete_bound(n, eps).value,
            continuous=continuous,
            hoeffding=hoeffding_bound(n, eps).value,
        ))
    return NormalizedLimitTable(
        p=p,
        t=t,
        limit=normalized_sum_bound(t, p),
        hoeffding_limit=normalized_hoeffding_bound(t, p),
        rows=rows,
    )


def normalized_limit_report(
    p: float = 0.5, t: float = 1.0, n_list: Sequence[int] = NORMALIZED_NS, tolerance: float = 1e-3
) -> VerificationReport:
    table = check_normalized_limit(p, t, n_list)
    builder = _ReportBuilder(f"normalized:p={p},t={t}", "normalized")
    gap = table.max_gap()
    builder.prop(
        f"within-{tolerance:g}-of-limit",
        Verdict.PASS if gap <= tolerance else Verdict.FAIL,
        f"{gap:.3e}",
    )
    builder.details["rows"] = [row.model_dump(mode="json") for row in table.rows]
    builder.details["limit"] = table.limit
    builder.details["hoeffding_limit"] = table.hoeffding_limit
    return builder.build()
