"""
Sample-size planning
====================

Inverts the bound families: the smallest n that pushes a bound below a
target deviation probability at fixed ε, or the smallest ε reachable at
fixed n. Elementary families are inverted in closed form and the result is
then confirmed by direct evaluation; the continuous-case bound, whose
correction depends on n, is inverted by integer bisection (for n) or by
Brent's method (for ε).

A tie with the target counts as meeting it.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import brentq

from .bounds import (
    BoundFamily,
    BoundValue,
    Regime,
    bernoulli_sharp_bound,
    general_discrete_bound,
    hoeffding_bound,
    one_sided_bound,
    phi_correction,
    uspensky_bound,
)
from .errors import DomainError, PlanningError

logger = logging.getLogger(__name__)

# integer bisection gives up past this bracket
MAX_SAMPLE_SIZE = 1 << 62
DEFAULT_FAMILIES = (
    BoundFamily.USPENSKY,
    BoundFamily.HOEFFDING,
    BoundFamily.BERNOULLI_SHARP,
    BoundFamily.GENERAL_DISCRETE,
    BoundFamily.CONTINUOUS_CORRECTED,
)


class PlanQuery(BaseModel):
    """A planning question; exactly one of ``eps`` and ``n`` is given."""

    model_config = ConfigDict(frozen=True)

    target: float = Field(gt=0.0, lt=1.0)
    family: BoundFamily
    eps: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    n: Optional[int] = Field(default=None, ge=1)
    p: Optional[float] = Field(default=None, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _one_unknown(self) -> "PlanQuery":
        if (self.eps is None) == (self.n is None):
            raise ValueError("give exactly one of eps and n")
        return self


class PlanResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: BoundFamily
    target: float
    n_min: Optional[int] = None
    eps_min: Optional[float] = None
    achieved_bound: float
    certified: bool
    method: str
    note: Optional[str] = None


# ---------------------------------------------------------------------------
# Family evaluation
# ---------------------------------------------------------------------------

def _continuous_log_value(n: int, eps: float) -> float:
    """log of exp(ε·φ(n, ε) - 2ε²n/(1+ε²)); defined for nε > 1."""
    return eps * phi_correction(n, eps) - 2.0 * eps * eps * n / (1.0 + eps * eps)


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _continuous_value(n: int, eps: float, p: Optional[float]) -> BoundValue:
    in_regime = n * eps > 1 and (p is None or eps <= min(p, 1.0 - p))
    beta = 2.0 / (1.0 + eps * eps)
    return BoundValue(
        family=BoundFamily.CONTINUOUS_CORRECTED,
        alpha=_safe_exp(eps * phi_correction(n, eps)),
        beta=beta,
        value=_safe_exp(_continuous_log_value(n, eps)),
        regime=Regime.CERTIFIED if in_regime else Regime.HEURISTIC,
    )


def _require_p(family: BoundFamily, p: Optional[float]) -> float:
    if p is None:
        raise PlanningError(f"{family.value} planning needs p")
    return p


def family_bound(family: BoundFamily, n: int, eps: float, p: Optional[float] = None) -> BoundValue:
    """The bound of ``family`` at (n, ε); raises PlanningError for families without an inverse."""
    family = BoundFamily(family)
    if family is BoundFamily.USPENSKY:
        return uspensky_bound(n, eps)
    if family is BoundFamily.HOEFFDING:
        return hoeffding_bound(n, eps)
    if family is BoundFamily.BERNOULLI_SHARP:
        return bernoulli_sharp_bound(n, eps, p)
    if family is BoundFamily.GENERAL_DISCRETE:
        return general_discrete_bound(n, eps, p)
    if family is BoundFamily.CONTINUOUS_CORRECTED:
        return _continuous_value(n, eps, p)
    if family is BoundFamily.ONE_SIDED_HALF:
        return one_sided_bound(n, _require_p(family, p), eps)
    raise PlanningError(
        f"{family.value} is not monotone in n at fixed eps and cannot be inverted"
    )


def _alpha_beta(family: BoundFamily, eps: Optional[float], p: Optional[float]) -> Tuple[float, Optional[float]]:
    """(α, β) of the elementary families; β is None when it depends on ε and ε is unknown."""
    if family is BoundFamily.USPENSKY:
        return 2.0, 0.5
    if family is BoundFamily.HOEFFDING:
        return 2.0, 2.0
    if family is BoundFamily.BERNOULLI_SHARP:
        return 1.0, 2.0
    if family is BoundFamily.GENERAL_DISCRETE:
        return 1.0, None if eps is None else 2.0 / (1.0 + eps * eps)
    if family is BoundFamily.ONE_SIDED_HALF:
        q = _require_p(family, p)
        return 0.5, 1.0 / (2.0 * q * (1.0 - q))
    raise PlanningError(f"{family.value} has no closed-form inverse")


def _check_target(target: float) -> None:
    if not 0.0 < target < 1.0:
        raise DomainError(f"target must lie in (0, 1), got {target}")


# ---------------------------------------------------------------------------
# Minimal n
# ---------------------------------------------------------------------------

def _bisect_n(
    value: Callable[[int], float], target: float, start: int
) -> int:
    """Smallest n >= start with value(n) <= target, for value decreasing in n."""
    if value(start) <= target:
        return start
    lo, hi = start, max(start * 2, start + 1)
    while value(hi) > target:
        lo, hi = hi, hi * 2
        if hi > MAX_SAMPLE_SIZE:
            raise PlanningError(f"no sample size below {MAX_SAMPLE_SIZE} reaches {target}")
    # invariant: value(lo) > target >= value(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if value(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def _result(
    family: BoundFamily, target: float, n: int, eps: float, p: Optional[float],
    method: str, note: Optional[str] = None, solve_for: str = "n",
) -> PlanResult:
    bound = family_bound(family, n, eps, p)
    return PlanResult(
        family=family,
        target=target,
        n_min=n if solve_for == "n" else None,
        eps_min=eps if solve_for == "eps" else None,
        achieved_bound=bound.value,
        certified=bound.certified,
        method=method,
        note=note,
    )


def min_n(
    eps: float,
    target: float,
    family: BoundFamily,
    p: Optional[float] = None,
    force_bisection: bool = False,
) -> PlanResult:
    """Smallest natural n with bound(n, ε) <= target."""
    family = BoundFamily(family)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    _check_target(target)

    def value(n: int) -> float:
        return family_bound(family, n, eps, p).value

    if family is BoundFamily.CONTINUOUS_CORRECTED:
        start = math.floor(1.0 / eps) + 1
        while start * eps <= 1.0:
            start += 1
        # compared in the log domain; the correction overflows near n·eps = 1
        n = _bisect_n(lambda m: _continuous_log_value(m, eps), math.log(target), start)
        note = None
        if n == start:
            note = f"smallest n with n·eps > 1; the bound is undefined below n={start}"
        return _result(family, target, n, eps, p, "bisection", note)

    alpha, beta = _alpha_beta(family, eps, p)
    if target >= alpha:
        return _result(family, target, 1, eps, p, "closed-form", f"target >= alpha = {alpha}")
    if force_bisection:
        n = _bisect_n(value, target, 1)
        return _result(family, target, n, eps, p, "bisection")

    n = max(1, math.ceil(math.log(alpha / target) / (beta * eps * eps)))
    # the ceiling can be off by one in floating point; settle it by direct evaluation
    while n > 1 and value(n - 1) <= target:
        n -= 1
    while value(n) > target:
        n += 1
    logger.debug(f"min_n {family.value}: eps={eps}, target={target} -> {n}")
    return _result(family, target, n, eps, p, "closed-form")


# ---------------------------------------------------------------------------
# Minimal eps
# ---------------------------------------------------------------------------

def _settle_eps(family: BoundFamily, n: int, eps: float, target: float, p: Optional[float]) -> float:
    """Nudge ε up until direct evaluation meets the target."""
    for _ in range(10_000):
        if family_bound(family, n, eps, p).value <= target:
            return eps
        eps = math.nextafter(eps, math.inf)
    raise PlanningError(f"could not settle eps near {eps} for {family.value}")


def min_eps(n: int, target: float, family: BoundFamily, p: Optional[float] = None) -> PlanResult:
    """Smallest ε (to relative tolerance 1e-12) with bound(n, ε) <= target."""
    family = BoundFamily(family)
    if n < 1:
        raise DomainError(f"n must be a natural number, got {n}")
    _check_target(target)

    if family is BoundFamily.CONTINUOUS_CORRECTED:
        lo, hi = (1.0 / n) * (1.0 + 1e-9), 0.5
        if lo >= hi:
            raise PlanningError(f"n={n} leaves no eps with 1/n < eps <= 1/2")

        def gap(eps: float) -> float:
            return _continuous_log_value(n, eps) - math.log(target)

        if gap(hi) > 0:
            raise PlanningError(f"the continuous bound stays above {target} for eps <= 1/2 at n={n}")
        if gap(lo) <= 0:
            eps = lo
            note = "smallest eps with n·eps > 1"
        else:
            eps = brentq(gap, lo, hi, xtol=1e-300, rtol=1e-12, maxiter=500)
            note = None
        eps = _settle_eps(family, n, eps, target, p)
        return _result(family, target, n, eps, p, "brentq", note, solve_for="eps")

    alpha, beta = _alpha_beta(family, None, p)
    if target >= alpha:
        return _result(
            family, target, n, 0.0, p, "closed-form",
            f"target >= alpha = {alpha}: every eps qualifies", solve_for="eps",
        )
    log_ratio = math.log(alpha / target)
    if family is BoundFamily.GENERAL_DISCRETE:
        # ε²/(1+ε²) = x  =>  ε = sqrt(x/(1-x))
        x = log_ratio / (2.0 * n)
        if x >= 1.0:
            raise PlanningError(f"exp(-2n) = {math.exp(-2.0 * n):.3e} is the floor at n={n}; target too small")
        eps = math.sqrt(x / (1.0 - x))
    else:
        eps = math.sqrt(log_ratio / (beta * n))
    eps = _settle_eps(family, n, eps, target, p)
    return _result(family, target, n, eps, p, "closed-form", solve_for="eps")


# ---------------------------------------------------------------------------
# Queries and ranking
# ---------------------------------------------------------------------------

def solve(query: PlanQuery) -> PlanResult:
    if query.eps is not None:
        return min_n(query.eps, query.target, query.family, query.p)
    return min_eps(query.n, query.target, query.family, query.p)


def best_family(
    target: float,
    n: Optional[int] = None,
    eps: Optional[float] = None,
    p: Optional[float] = None,
    families: Optional[Sequence[BoundFamily]] = None,
) -> List[PlanResult]:
    """
    Rank families for a planning question.

    With ε only, families are ranked by n_min; with n only, by eps_min; with
    both, by the bound value at (n, ε).
    """
    if n is None and eps is None:
        raise DomainError("give n, eps or both")
    chosen = list(families) if families is not None else list(DEFAULT_FAMILIES)
    if families is None and p is not None:
        chosen.append(BoundFamily.ONE_SIDED_HALF)
    results: List[PlanResult] = []
    for family in chosen:
        try:
            if n is not None and eps is not None:
                bound = family_bound(family, n, eps, p)
                results.append(PlanResult(
                    family=family,
                    target=target,
                    n_min=n,
                    eps_min=eps,
                    achieved_bound=bound.value,
                    certified=bound.certified,
                    method="evaluation",
                    note=None if bound.value <= target else "misses the target",
                ))
            elif eps is not None:
                results.append(min_n(eps, target, family, p))
            else:
                results.append(min_eps(n, target, family, p))
        except (PlanningError, ValueError) as e:
            logger.debug(f"{BoundFamily(family).value} skipped in ranking: {e}")

    keys: Dict[str, Callable[[PlanResult], tuple]] = {
        "value": lambda r: (r.achieved_bound, r.family.value),
        "n": lambda r: (r.n_min, r.achieved_bound, r.family.value),
        "eps": lambda r: (r.eps_min, r.achieved_bound, r.family.value),
    }
    if n is not None and eps is not None:
        key = keys["value"]
    elif eps is not None:
        key = keys["n"]
    else:
        key = keys["eps"]
    return sorted(results, key=key)
