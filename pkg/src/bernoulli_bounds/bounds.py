"""
Exponential Tail Bounds
=======================

Closed-form evaluators for every bound family on
P(|X̄ - p| > eps) for the mean of n Bernoulli(p) variables:

- ClassicalBernoulli   1/(1+C) with Bernoulli's constant C
- Uspensky             2·exp(-0.5·eps²·n)
- Hoeffding            2·exp(-2·eps²·n)
- BernoulliSharp       exp(-2·eps²·n)            (lattice p = r/(r+s))
- GeneralDiscrete      exp(-2·eps²·n/(1+eps²))   (lattice p = m/n, eps = k/n)
- ContinuousCorrected  exp(eps·phi(n,eps) - 2·eps²·n/(1+eps²))
- OneSidedHalf         0.5·exp(-n·delta²/(2p(1-p)))
- NormalizedAsymptotic exp(-2t²p(1-p))

Evaluators accept parameters outside the regime where the bound is proven
and tag the result as ``heuristic`` instead of refusing; only the
continuous-case bound raises, because its correction factor is undefined for
n·eps <= 1.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .errors import DomainError, RegimeError
from .exact_binomial import RationalLike, as_fraction, continuous_partition

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)


class BoundFamily(str, Enum):
    CLASSICAL_BERNOULLI = "classical-bernoulli"
    USPENSKY = "uspensky"
    HOEFFDING = "hoeffding"
    BERNOULLI_SHARP = "bernoulli-sharp"
    GENERAL_DISCRETE = "general-discrete"
    CONTINUOUS_CORRECTED = "continuous"
    ONE_SIDED_HALF = "one-sided"
    NORMALIZED_ASYMPTOTIC = "normalized"


class Regime(str, Enum):
    CERTIFIED = "certified"
    HEURISTIC = "heuristic"


class BoundValue(BaseModel):
    """An evaluated bound alpha·exp(-beta·eps²·n)."""

    model_config = ConfigDict(frozen=True)

    family: BoundFamily
    alpha: float
    beta: float
    value: float = Field(ge=0.0)
    regime: Regime = Regime.CERTIFIED
    details: Dict[str, float] = Field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.regime is Regime.CERTIFIED


class CrossoverResult(BaseModel):
    """Deviation level mu(n) where exp(-2ε²n/(1+ε²)) meets 2·exp(-2ε²n)."""

    model_config = ConfigDict(frozen=True)

    n: int
    phi: float
    mu: float
    mu_squared: float


@dataclass(frozen=True)
class ClassicalBoundParams:
    """Bernoulli's exponents and constant for a (k, r, s) grid."""

    xi1: Fraction
    xi2: Fraction
    C: float
    left_branch: float
    right_branch: float
    simplified_C: float


def _eps_float(eps: RationalLike) -> float:
    value = float(as_fraction(eps)) if not isinstance(eps, float) else eps
    if value < 0 or not math.isfinite(value):
        raise DomainError(f"eps must be a finite non-negative number, got {eps!r}")
    return value


def _check_n(n: int) -> None:
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")


def _regime(flag: bool) -> Regime:
    return Regime.CERTIFIED if flag else Regime.HEURISTIC


# ---------------------------------------------------------------------------
# Regime predicates
# ---------------------------------------------------------------------------

def in_bernoulli_regime(n: int, eps: RationalLike, p: Optional[RationalLike] = None) -> bool:
    """True when eps = 1/(r+s), n = k(r+s) and (if given) p = r/(r+s)."""
    eps = as_fraction(eps)
    if eps <= 0 or eps.numerator != 1 or eps.denominator < 2:
        return False
    width = eps.denominator
    if n % width:
        return False
    if p is None:
        return True
    scaled = as_fraction(p) * width
    return scaled.denominator == 1 and 1 <= scaled < width


def in_discrete_regime(n: int, eps: RationalLike, p: Optional[RationalLike] = None) -> bool:
    """True when eps = k/n with 2 <= k < n and (if given) p = m/n, 0 < m < n."""
    k = as_fraction(eps) * n
    if k.denominator != 1 or not 2 <= k < n:
        return False
    if p is None:
        return True
    m = as_fraction(p) * n
    return m.denominator == 1 and 0 < m < n


def in_one_sided_regime(n: int, p: RationalLike, delta: RationalLike) -> bool:
    """True when p = r/(r+s), n = k(r+s), delta = ν/(r+s) for natural k, ν."""
    p, delta = as_fraction(p), as_fraction(delta)
    if not 0 < p < 1 or delta <= 0:
        return False
    width = math.lcm(p.denominator, delta.denominator)
    return n % width == 0 and (delta * width).denominator == 1


# ---------------------------------------------------------------------------
# Evaluators
# ---------------------------------------------------------------------------

def classical_bernoulli_bound(
    k: int, r: int, s: int, simplified: bool = False
) -> Tuple[ClassicalBoundParams, BoundValue]:
    """
    Bernoulli's bound 1/(1+C) for p = r/(r+s), n = k(r+s), eps = 1/(r+s).

    With ``simplified`` the exponents ξ1, ξ2 are replaced by nε² = k/(r+s).
    """
    if min(k, r, s) < 1:
        raise DomainError(f"k, r, s must be natural numbers, got ({k}, {r}, {s})")
    if s < 2:
        raise DomainError("s must be at least 2: the factor 1/(s-1) has a vanishing denominator")
    if r < 2:
        raise DomainError("r must be at least 2: the factor 1/(r-1) has a vanishing denominator")
    xi1 = Fraction(k * (r + 1) + s, r + s + 1)
    xi2 = Fraction(k * (s + 1) + r, r + s + 1)
    floor = Fraction(k, r + s)

    def branches(e1: Fraction, e2: Fraction) -> Tuple[float, float]:
        left = math.exp(float(e1) * math.log((r + 1) / r)) / (s - 1)
        right = math.exp(float(e2) * math.log((s + 1) / s)) / (r - 1)
        return left, right

    left, right = branches(xi1, xi2)
    simple_left, simple_right = branches(floor, floor)
    params = ClassicalBoundParams(
        xi1=xi1,
        xi2=xi2,
        C=min(left, right),
        left_branch=left,
        right_branch=right,
        simplified_C=min(simple_left, simple_right),
    )
    constant = params.simplified_C if simplified else params.C
    value = 1.0 / (1.0 + constant)
    bound = BoundValue(
        family=BoundFamily.CLASSICAL_BERNOULLI,
        alpha=value,
        beta=0.0,
        value=value,
        details={"C": constant, "xi1": float(xi1), "xi2": float(xi2)},
    )
    return params, bound


def uspensky_bound(n: int, eps: RationalLike) -> BoundValue:
    _check_n(n)
    e = _eps_float(eps)
    return BoundValue(
        family=BoundFamily.USPENSKY, alpha=2.0, beta=0.5,
        value=2.0 * math.exp(-0.5 * e * e * n),
    )


def hoeffding_bound(n: int, eps: RationalLike) -> BoundValue:
    _check_n(n)
    e = _eps_float(eps)
    return BoundValue(
        family=BoundFamily.HOEFFDING, alpha=2.0, beta=2.0,
        value=2.0 * math.exp(-2.0 * e * e * n),
    )


def bernoulli_sharp_bound(
    n: int, eps: RationalLike, p: Optional[RationalLike] = None
) -> BoundValue:
    _check_n(n)
    e = _eps_float(eps)
    return BoundValue(
        family=BoundFamily.BERNOULLI_SHARP, alpha=1.0, beta=2.0,
        value=math.exp(-2.0 * e * e * n),
        regime=_regime(in_bernoulli_regime(n, eps, p)),
    )


def exponent_coefficient(eps: RationalLike) -> float:
    """Admissible beta of the general discrete case, min{2, 2/(1+ε²), 8/(4+ε²)}."""
    e = _eps_float(eps)
    return min(2.0, 2.0 / (1.0 + e * e), 8.0 / (4.0 + e * e))


def general_discrete_bound(
    n: int, eps: RationalLike, p: Optional[RationalLike] = None
) -> BoundValue:
    _check_n(n)
    e = _eps_float(eps)
    beta = 2.0 / (1.0 + e * e)
    return BoundValue(
        family=BoundFamily.GENERAL_DISCRETE, alpha=1.0, beta=beta,
        value=math.exp(-beta * e * e * n),
        regime=_regime(in_discrete_regime(n, eps, p)),
    )


def phi_correction(n: int, eps: RationalLike) -> float:
    """
    The continuous-case correction exponent phi(n, eps).

    exp(eps·phi) is the factor multiplying the general discrete bound when p
    and eps are not lattice values.
    """
    _check_n(n)
    e = _eps_float(eps)
    ne = n * e
    if ne <= 1:
        raise RegimeError(f"phi(n, eps) needs n·eps > 1, got {ne} (ascond2)", condition="ascond2")
    e2 = e * e
    numerator = ne * (1 + e2) / (ne - 1) + e * (2 + 6 * e + 9 / (2 * n))
    denominator = (1 + e2) * (1 + e2 + (1 / n) * (1 + 3 * e + 9 / (4 * n)))
    return numerator / denominator


def correction_factor(n: int, eps: RationalLike) -> float:
    """exp(eps·phi(n, eps))."""
    return math.exp(_eps_float(eps) * phi_correction(n, eps))


def continuous_gamma(n: int, eps: RationalLike, theta: float) -> float:
    """Most restrictive exponent coefficient of the continuous case."""
    e = _eps_float(eps)
    return (2 - theta / (n * e)) / (1 + e * e + (1 / n) * (1 + 3 * e + 9 / (4 * n)))


def continuous_bound(n: int, p: RationalLike, eps: RationalLike) -> BoundValue:
    """Bound for arbitrary real 0 < p < 1 and 1/n < eps <= min(p, 1-p)."""
    _check_n(n)
    partition = continuous_partition(n, float(as_fraction(p)), _eps_float(eps))
    e = _eps_float(eps)
    alpha = correction_factor(n, e)
    beta = 2.0 / (1.0 + e * e)
    return BoundValue(
        family=BoundFamily.CONTINUOUS_CORRECTED,
        alpha=alpha,
        beta=beta,
        value=math.exp(e * phi_correction(n, e) - beta * e * e * n),
        details={
            "theta": partition.theta,
            "p_tilde": partition.p_tilde,
            "gamma": continuous_gamma(n, e, partition.theta),
        },
    )


def one_sided_bound(n: int, p: RationalLike, delta: RationalLike) -> BoundValue:
    """
    0.5·exp(-n·delta²/(2p(1-p))).

    Bounds the upper deviation when p >= 1/2 and the lower deviation when
    p <= 1/2.
    """
    _check_n(n)
    p_value = float(as_fraction(p))
    if not 0.0 < p_value < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    d = _eps_float(delta)
    beta = 1.0 / (2.0 * p_value * (1.0 - p_value))
    return BoundValue(
        family=BoundFamily.ONE_SIDED_HALF, alpha=0.5, beta=beta,
        value=0.5 * math.exp(-beta * d * d * n),
        regime=_regime(in_one_sided_regime(n, p, delta)),
    )


def normalized_sum_bound(t: float, p: float) -> float:
    """Limit exp(-2t²p(1-p)) of the alpha = 1 bounds at eps = t·sqrt(p(1-p)/n)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    if t > 1:
        logger.debug(f"normalized_sum_bound evaluated outside 0 <= t <= 1 (t={t})")
    return math.exp(-2.0 * t * t * p * (1.0 - p))


def normalized_hoeffding_bound(t: float, p: float) -> float:
    """Hoeffding's analogue of the normalized-sum limit, with alpha = 2."""
    return 2.0 * normalized_sum_bound(t, p)


def crossover_epsilon(n: int) -> CrossoverResult:
    """mu(n) with mu² = φ/2 + sqrt(φ(1 + φ/4)), φ = log 2/(2n)."""
    _check_n(n)
    phi = LOG2 / (2.0 * n)
    mu_squared = phi / 2.0 + math.sqrt(phi * (1.0 + phi / 4.0))
    return CrossoverResult(n=n, phi=phi, mu=math.sqrt(mu_squared), mu_squared=mu_squared)


def hoeffding_advantage_threshold(eps: RationalLike) -> int:
    """Smallest n for which Hoeffding's bound is below the general discrete bound."""
    e = _eps_float(eps)
    if e <= 0:
        raise DomainError("eps must be positive")
    n = max(1, math.floor(LOG2 * (1 + e * e) / (2 * e ** 4)) + 1)
    while n > 1 and crossover_epsilon(n - 1).mu < e:
        n -= 1
    while crossover_epsilon(n).mu >= e:
        n += 1
    return n


def log1p_lower(delta: float) -> float:
    """2δ/(2+δ), a lower bound of log(1+δ) for δ >= 0."""
    if delta < 0:
        raise DomainError(f"delta must be non-negative, got {delta}")
    return 2.0 * delta / (2.0 + delta)


def p0_upper_bound(n: int, p: float) -> float:
    """(p^p (1+p)^(1-p))^n, upper bound on the central mass; reported per n by ``check_proposition1``."""
    return math.exp(n * (_xlogx(p) + (1.0 - p) * math.log1p(p)))


def p0_bound_base(p: float) -> float:
    """f(p) = p^p (1+p)^(1-p) on [0, 1]; f(0) = f(1) = 1."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    return math.exp(_xlogx(p) + (1.0 - p) * math.log1p(p))


def _xlogx(x: float) -> float:
    return 0.0 if x == 0.0 else x * math.log(x)


# ---------------------------------------------------------------------------
# Family registry
# ---------------------------------------------------------------------------

def _classical_from_lattice(n: int, eps: RationalLike, p: Optional[RationalLike]) -> BoundValue:
    if p is None or not in_bernoulli_regime(n, eps, p):
        raise RegimeError(
            "classical Bernoulli bound needs p = r/(r+s), n = k(r+s), eps = 1/(r+s)",
            condition="bernoulli-grid",
        )
    width = as_fraction(eps).denominator
    r = int(as_fraction(p) * width)
    return classical_bernoulli_bound(n // width, r, width - r)[1]


def _continuous(n: int, eps: RationalLike, p: Optional[RationalLike]) -> BoundValue:
    if p is None:
        raise RegimeError("continuous bound needs p (ascond1)", condition="ascond1")
    return continuous_bound(n, p, eps)


def _one_sided(n: int, eps: RationalLike, p: Optional[RationalLike]) -> BoundValue:
    if p is None:
        raise DomainError("one-sided bound needs p")
    return one_sided_bound(n, p, eps)


EVALUATORS: Dict[BoundFamily, Callable[[int, RationalLike, Optional[RationalLike]], BoundValue]] = {
    BoundFamily.CLASSICAL_BERNOULLI: _classical_from_lattice,
    BoundFamily.USPENSKY: lambda n, eps, p=None: uspensky_bound(n, eps),
    BoundFamily.HOEFFDING: lambda n, eps, p=None: hoeffding_bound(n, eps),
    BoundFamily.BERNOULLI_SHARP: bernoulli_sharp_bound,
    BoundFamily.GENERAL_DISCRETE: general_discrete_bound,
    BoundFamily.CONTINUOUS_CORRECTED: _continuous,
    BoundFamily.ONE_SIDED_HALF: _one_sided,
}


def evaluate(
    family: BoundFamily, n: int, eps: RationalLike, p: Optional[RationalLike] = None
) -> BoundValue:
    """Evaluate ``family`` at (n, eps[, p])."""
    family = BoundFamily(family)
    if family is BoundFamily.NORMALIZED_ASYMPTOTIC:
        raise DomainError("the normalized-sum limit takes (t, p); use normalized_sum_bound")
    return EVALUATORS[family](n, eps, p)
