"""
Exact Binomial Engine
=====================

Exact (big-rational) and log-domain binomial probabilities, the grouping of
binomial point masses into left groups S_j and right groups Z_j around the
centre m, the neighbour-group coefficient ratios A(j)/B(j), and the lattice
partition used when p and eps are arbitrary reals.

All values are immutable. Probabilities in the exact backend are
``fractions.Fraction`` instances (``RationalProb``), always in lowest terms.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, List, Literal, Optional, Tuple, Union

import numpy as np
from scipy.special import gammaln

from .config import DEFAULT_SETTINGS
from .errors import DomainError, RegimeError

logger = logging.getLogger(__name__)

RationalProb = Fraction
Side = Literal["two", "upper", "lower"]
Boundary = Literal["strict", "weak"]
RationalLike = Union[Fraction, int, float, str]

SIDES = ("two", "upper", "lower")
BOUNDARIES = ("strict", "weak")

# exact point masses are cached as prefix sums up to this n
PREFIX_CACHE_LIMIT = 2000


def as_fraction(value: RationalLike) -> Fraction:
    """
    Convert user input to an exact rational.

    Strings may be ``"a/b"`` or decimal literals; floats are read through their
    shortest decimal representation so ``0.1`` means 1/10, not the nearest
    binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError("boolean is not a rational number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise DomainError(f"cannot parse {value!r} as a rational number") from e
    raise DomainError(f"unsupported numeric type {type(value).__name__}")


def _require_probability(p: Fraction, open_interval: bool) -> None:
    if open_interval and not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")


@dataclass(frozen=True)
class LogProb:
    """Natural logarithm of a probability; ``-inf`` encodes zero."""

    log_value: float

    def exp(self) -> float:
        return math.exp(self.log_value)


@dataclass(frozen=True)
class BernoulliGrid:
    """
    Classical setting p = r/(r+s), n = k(r+s), eps = 1/(r+s).

    The centre is m = kr and every group holds exactly k point masses.
    """

    k: int
    r: int
    s: int

    def __post_init__(self):
        for name in ("k", "r", "s"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise DomainError(f"{name} must be a natural number, got {value!r}")

    @property
    def n(self) -> int:
        return self.k * (self.r + self.s)

    @property
    def m(self) -> int:
        return self.k * self.r

    @property
    def group_size(self) -> int:
        return self.k

    @property
    def p(self) -> Fraction:
        return Fraction(self.r, self.r + self.s)

    @property
    def eps(self) -> Fraction:
        return Fraction(1, self.r + self.s)

    @property
    def key(self) -> str:
        return f"bernoulli:k={self.k:03d},r={self.r:03d},s={self.s:03d}"

    def mirrored(self) -> "BernoulliGrid":
        """Grid of the relabelled variable 1 - X."""
        return BernoulliGrid(self.k, self.s, self.r)


@dataclass(frozen=True)
class DiscreteGrid:
    """
    General discrete setting p = m/n, eps = k/n with k, m < n.

    Groups of k point masses are formed from the centre outward; when k does
    not divide m (or n - m) the outermost group on that side is short.
    """

    n: int
    m: int
    k: int

    def __post_init__(self):
        for name in ("n", "m", "k"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise DomainError(f"{name} must be a natural number, got {value!r}")
        if self.k >= self.n:
            raise DomainError(f"k must be smaller than n (k={self.k}, n={self.n})")
        if self.m >= self.n:
            raise DomainError(f"m must be smaller than n (m={self.m}, n={self.n})")

    @property
    def group_size(self) -> int:
        return self.k

    @property
    def p(self) -> Fraction:
        return Fraction(self.m, self.n)

    @property
    def eps(self) -> Fraction:
        return Fraction(self.k, self.n)

    @property
    def key(self) -> str:
        return f"discrete:n={self.n:04d},m={self.m:04d},k={self.k:04d}"

    def mirrored(self) -> "DiscreteGrid":
        return DiscreteGrid(self.n, self.n - self.m, self.k)

    def as_bernoulli(self) -> Optional[BernoulliGrid]:
        """For k = 1 the discrete grid is the Bernoulli grid (1, m, n - m)."""
        if self.k == 1:
            return BernoulliGrid(1, self.m, self.n - self.m)
        return None


Grid = Union[BernoulliGrid, DiscreteGrid]


@dataclass(frozen=True)
class GroupDecomposition:
    """
    P0 plus the left groups S_1..S_r and right groups Z_1..Z_s.

    ``full_left``/``full_right`` count the groups holding exactly
    ``group_size_*`` point masses; any group beyond them is a short terminal
    group.
    """

    p0: Fraction
    left: Tuple[Fraction, ...]
    right: Tuple[Fraction, ...]
    group_size_left: int
    group_size_right: int
    full_left: int
    full_right: int

    def total(self) -> Fraction:
        return self.p0 + sum(self.left, Fraction(0)) + sum(self.right, Fraction(0))

    @property
    def has_short_groups(self) -> bool:
        return len(self.left) > self.full_left or len(self.right) > self.full_right


@dataclass(frozen=True)
class FloatGroupDecomposition:
    """The same split as ``GroupDecomposition`` with log-domain float masses."""

    p0: float
    left: Tuple[float, ...]
    right: Tuple[float, ...]
    full_left: int
    full_right: int

    def total(self) -> float:
        return math.fsum((self.p0, *self.left, *self.right))

    @property
    def has_short_groups(self) -> bool:
        return len(self.left) > self.full_left or len(self.right) > self.full_right


@dataclass(frozen=True)
class DeviationParts:
    """The five exact probabilities P0, P+1, P+2, P-1, P-2 of a grid."""

    p0: Fraction
    upper_near: Fraction
    upper_far: Fraction
    lower_near: Fraction
    lower_far: Fraction

    @property
    def far(self) -> Fraction:
        return self.upper_far + self.lower_far


@dataclass(frozen=True)
class ContinuousPartition:
    """Lattice quantities for arbitrary real p and eps."""

    n: int
    p: float
    eps: float
    m: int
    h: int
    g: int
    p_tilde: float = field(init=False)
    eps1_tilde: float = field(init=False)
    eps2_tilde: float = field(init=False)
    theta: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "p_tilde", self.m / self.n)
        object.__setattr__(self, "eps1_tilde", self.h / self.n)
        object.__setattr__(self, "eps2_tilde", self.g / self.n)
        object.__setattr__(
            self, "theta", max(self.eps / self.eps1_tilde, self.eps / self.eps2_tilde)
        )

    @property
    def theta_bound(self) -> float:
        """nε/(nε − 1), the guaranteed ceiling on theta."""
        return self.n * self.eps / (self.n * self.eps - 1)


# ---------------------------------------------------------------------------
# Point masses
# ---------------------------------------------------------------------------

@lru_cache(maxsize=512)
def _prefix_masses(n: int, p: Fraction) -> Tuple[Tuple[int, ...], int]:
    """
    Prefix sums of the integer numerators C(n,j) a^j (b-a)^(n-j) for p = a/b.

    Entry i holds the scaled mass of indices [0, i); the common denominator
    is b^n.
    """
    a, b = p.numerator, p.denominator
    c = b - a
    prefix = [0]
    running = 0
    for j in range(n + 1):
        running += comb(n, j) * a ** j * c ** (n - j)
        prefix.append(running)
    return tuple(prefix), b ** n


def _scaled_mass(n: int, p: Fraction, lo: int, hi: int) -> int:
    """Numerator (over b^n) of the mass of the index range [lo, hi]."""
    lo, hi = max(lo, 0), min(hi, n)
    if lo > hi:
        return 0
    if n <= PREFIX_CACHE_LIMIT:
        prefix, _ = _prefix_masses(n, p)
        return prefix[hi + 1] - prefix[lo]
    a, b = p.numerator, p.denominator
    c = b - a
    return sum(comb(n, j) * a ** j * c ** (n - j) for j in range(lo, hi + 1))


def _mass(n: int, p: Fraction, lo: int, hi: int) -> Fraction:
    """Exact mass of the index range [lo, hi] (empty when lo > hi)."""
    scaled = _scaled_mass(n, p, lo, hi)
    return Fraction(scaled, p.denominator ** n) if scaled else Fraction(0)


def range_probability(n: int, p: RationalLike, lo: int, hi: int) -> Fraction:
    """P(lo <= X <= hi) for X ~ Binomial(n, p), exactly."""
    p = as_fraction(p)
    _require_probability(p, open_interval=False)
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    if p in (0, 1):
        atom = 0 if p == 0 else n
        return Fraction(1 if lo <= atom <= hi else 0)
    return _mass(n, p, lo, hi)


def binomial_pmf(n: int, j: int, p: RationalLike) -> Fraction:
    """C(n, j) p^j (1-p)^(n-j), exactly."""
    p = as_fraction(p)
    _require_probability(p, open_interval=False)
    if n < 0 or j < 0:
        raise DomainError(f"n and j must be non-negative (n={n}, j={j})")
    if j > n:
        raise DomainError(f"j={j} exceeds n={n}")
    return comb(n, j) * p ** j * (1 - p) ** (n - j)


def log_binomial_pmf(n: int, j: int, p: float) -> LogProb:
    """log C(n,j) + j log p + (n-j) log(1-p) via log-gamma."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1) for the log backend, got {p}")
    if j < 0 or j > n:
        raise DomainError(f"j={j} outside [0, {n}]")
    value = (
        gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)
        + j * math.log(p) + (n - j) * math.log1p(-p)
    )
    return LogProb(float(value))


# ---------------------------------------------------------------------------
# Tails
# ---------------------------------------------------------------------------

def _tail_ranges(
    n: int, p: Fraction, eps: Fraction, side: str, boundary: str
) -> List[Tuple[int, int]]:
    """Index ranges j with |j - np| beyond n*eps on the requested side."""
    centre, radius = n * p, n * eps
    ranges = []
    if side in ("two", "lower"):
        # j < centre - radius (strict) or j <= centre - radius (weak)
        edge = centre - radius
        hi = math.ceil(edge) - 1 if boundary == "strict" else math.floor(edge)
        ranges.append((0, hi))
    if side in ("two", "upper"):
        edge = centre + radius
        lo = math.floor(edge) + 1 if boundary == "strict" else math.ceil(edge)
        ranges.append((lo, n))
    return ranges


def _validate_tail_args(p: Fraction, eps: Fraction, side: str, boundary: str) -> None:
    _require_probability(p, open_interval=True)
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    if side not in SIDES:
        raise DomainError(f"side must be one of {SIDES}, got {side!r}")
    if boundary not in BOUNDARIES:
        raise DomainError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")


def tail_probability(
    n: int,
    p: RationalLike,
    eps: RationalLike,
    side: Side = "two",
    boundary: Boundary = "strict",
) -> Fraction:
    """
    Exact P(|X̄ - p| > eps) (strict) or P(|X̄ - p| >= eps) (weak).

    ``side`` restricts the event to the upper or lower deviation.
    """
    p, eps = as_fraction(p), as_fraction(eps)
    _validate_tail_args(p, eps, side, boundary)
    if n < 1:
        raise DomainError(f"n must be a natural number, got {n}")
    ranges = _tail_ranges(n, p, eps, side, boundary)
    tail_size = sum(max(0, min(hi, n) - max(lo, 0) + 1) for lo, hi in ranges)
    if side == "two" and tail_size > (n + 1) // 2:
        # the central window is shorter than the tail; sum it instead
        (_, lower_hi), (upper_lo, _) = ranges
        return 1 - _mass(n, p, lower_hi + 1, upper_lo - 1)
    return sum((_mass(n, p, lo, hi) for lo, hi in ranges), Fraction(0))


def _log_point_masses(n: int, p: float, indices: np.ndarray) -> np.ndarray:
    return (
        gammaln(n + 1) - gammaln(indices + 1) - gammaln(n - indices + 1)
        + indices * math.log(p) + (n - indices) * math.log1p(-p)
    )


def _fsum_masses(masses: np.ndarray) -> float:
    """Compensated sum in ascending order."""
    return math.fsum(sorted(masses.tolist()))


def range_probability_float(n: int, p: RationalLike, lo: int, hi: int) -> float:
    """P(lo <= X <= hi) from log-domain point masses, for n past the exact backend."""
    p = as_fraction(p)
    _require_probability(p, open_interval=True)
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    lo, hi = max(lo, 0), min(hi, n)
    if lo > hi:
        return 0.0
    return _fsum_masses(np.exp(_log_point_masses(n, float(p), np.arange(lo, hi + 1))))


def tail_probability_float(
    n: int,
    p: RationalLike,
    eps: RationalLike,
    side: Side = "two",
    boundary: Boundary = "strict",
    backend_threshold: Optional[int] = None,
) -> float:
    """
    Tail probability as a float, choosing the backend by n.

    Up to ``backend_threshold`` the exact value is rounded once; above it the
    log-domain point masses are summed in ascending order with compensated
    summation.
    """
    threshold = backend_threshold or DEFAULT_SETTINGS.backend_threshold
    p_exact, eps_exact = as_fraction(p), as_fraction(eps)
    if n <= threshold:
        return float(tail_probability(n, p_exact, eps_exact, side, boundary))
    _validate_tail_args(p_exact, eps_exact, side, boundary)
    logger.debug(f"log-domain tail for n={n}")
    spans = [
        np.arange(max(lo, 0), min(hi, n) + 1)
        for lo, hi in _tail_ranges(n, p_exact, eps_exact, side, boundary)
    ]
    indices = np.concatenate(spans)
    if indices.size == 0:
        return 0.0
    return _fsum_masses(np.exp(_log_point_masses(n, float(p_exact), indices)))


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaledGroups:
    """
    Group masses as integer numerators over one common denominator.

    Ratios and sums of groups can be compared with integer arithmetic only,
    which keeps the verification sweeps free of gcd reductions.
    """

    p0: int
    left: Tuple[int, ...]
    right: Tuple[int, ...]
    denominator: int
    full_left: int
    full_right: int


def _side_groups(n: int, p: Fraction, centre: int, size: int, count: int, step: int):
    groups = []
    for j in range(1, count + 1):
        if step > 0:
            lo = centre + 1 + (j - 1) * size
            hi = min(centre + j * size, n)
        else:
            hi = centre - 1 - (j - 1) * size
            lo = max(centre - j * size, 0)
        groups.append(_scaled_mass(n, p, lo, hi))
    return tuple(groups)


def scaled_groups(grid: Grid) -> ScaledGroups:
    """Numerators of P0, S_1.. and Z_1.. over p.denominator**n."""
    n, m, k, p = grid.n, grid.m, grid.group_size, grid.p
    full_left, short_left = divmod(m, k)
    full_right, short_right = divmod(n - m, k)
    return ScaledGroups(
        p0=_scaled_mass(n, p, m, m),
        left=_side_groups(n, p, m, k, full_left + (1 if short_left else 0), step=-1),
        right=_side_groups(n, p, m, k, full_right + (1 if short_right else 0), step=1),
        denominator=p.denominator ** n,
        full_left=full_left,
        full_right=full_right,
    )


def group_decomposition(grid: Grid) -> GroupDecomposition:
    """
    Split the binomial law of ``grid`` into P0, left groups and right groups.

    S_j covers indices [m - kj, m - 1 - (j-1)k] and Z_j covers
    [m + 1 + (j-1)k, m + kj]; a trailing short group absorbs any remainder.
    """
    scaled = scaled_groups(grid)
    den = scaled.denominator
    decomposition = GroupDecomposition(
        p0=Fraction(scaled.p0, den),
        left=tuple(Fraction(mass, den) for mass in scaled.left),
        right=tuple(Fraction(mass, den) for mass in scaled.right),
        group_size_left=grid.group_size,
        group_size_right=grid.group_size,
        full_left=scaled.full_left,
        full_right=scaled.full_right,
    )
    logger.debug(f"{grid.key}: {len(scaled.left)} left groups, {len(scaled.right)} right groups")
    return decomposition


def group_decomposition_float(grid: Grid) -> FloatGroupDecomposition:
    """``group_decomposition`` from log-domain point masses, for large n."""
    n, m, k = grid.n, grid.m, grid.group_size
    masses = np.exp(_log_point_masses(n, float(grid.p), np.arange(n + 1)))
    full_left, short_left = divmod(m, k)
    full_right, short_right = divmod(n - m, k)
    left = tuple(
        _fsum_masses(masses[max(m - j * k, 0):m - (j - 1) * k])
        for j in range(1, full_left + (1 if short_left else 0) + 1)
    )
    right = tuple(
        _fsum_masses(masses[m + 1 + (j - 1) * k:min(m + j * k, n) + 1])
        for j in range(1, full_right + (1 if short_right else 0) + 1)
    )
    logger.debug(f"{grid.key}: log-domain decomposition")
    return FloatGroupDecomposition(
        p0=float(masses[m]),
        left=left,
        right=right,
        full_left=full_left,
        full_right=full_right,
    )


def deviation_parts(grid: Grid) -> DeviationParts:
    """P0, P+1, P+2, P-1, P-2 with eps = k/n around the centre m."""
    n, m, k, p = grid.n, grid.m, grid.group_size, grid.p
    return DeviationParts(
        p0=_mass(n, p, m, m),
        upper_near=_mass(n, p, m + 1, m + k),
        upper_far=_mass(n, p, m + k + 1, n),
        lower_near=_mass(n, p, m - k, m - 1),
        lower_far=_mass(n, p, 0, m - k - 1),
    )


def _full_groups(grid: Grid) -> Tuple[int, int]:
    return grid.m // grid.group_size, (grid.n - grid.m) // grid.group_size


def coefficient_A(grid: Grid, j: int) -> Fraction:
    """A(j) = C(n, m-j) / C(n, m-k-j) for 1 <= j <= k(r-1)."""
    r, _ = _full_groups(grid)
    k = grid.group_size
    if r < 2:
        raise DomainError(f"A(j) needs at least two left groups, {grid.key} has {r}")
    if not 1 <= j <= k * (r - 1):
        raise DomainError(f"A(j) index j={j} outside [1, {k * (r - 1)}]")
    return Fraction(comb(grid.n, grid.m - j), comb(grid.n, grid.m - k - j))


def coefficient_B(grid: Grid, j: int) -> Fraction:
    """B(j) = C(n, m+j) / C(n, m+k+j) for 1 <= j <= k(s-1)."""
    _, s = _full_groups(grid)
    k = grid.group_size
    if s < 2:
        raise DomainError(f"B(j) needs at least two right groups, {grid.key} has {s}")
    if not 1 <= j <= k * (s - 1):
        raise DomainError(f"B(j) index j={j} outside [1, {k * (s - 1)}]")
    return Fraction(comb(grid.n, grid.m + j), comb(grid.n, grid.m + k + j))


def central_pmf_ratio(grid: Grid, i: int) -> Fraction:
    """
    Ratio of point masses placed symmetrically about the centre:
    C(n, m-i+1)/C(n, m+i) * ((1-p)/p)^(2i-1).
    """
    n, m, p = grid.n, grid.m, grid.p
    if not 1 <= i <= min(n - m, m + 1):
        raise DomainError(f"pair index i={i} outside [1, {min(n - m, m + 1)}]")
    return Fraction(comb(n, m - i + 1), comb(n, m + i)) * ((1 - p) / p) ** (2 * i - 1)


# ---------------------------------------------------------------------------
# Continuous case
# ---------------------------------------------------------------------------

def continuous_partition(n: int, p: float, eps: float) -> ContinuousPartition:
    """
    Lattice partition around the real centre np.

    h counts the integers in [np - nε, np), g those in [np, np + nε], and m
    is the smallest integer not below np.
    """
    if n < 1:
        raise DomainError(f"n must be a natural number, got {n}")
    p_exact, eps_exact = as_fraction(p), as_fraction(eps)
    if not 0 < p_exact < 1:
        raise RegimeError(f"p={p} violates 0 < p < 1 (ascond1)", condition="ascond1")
    if eps_exact * n <= 1:
        raise RegimeError(
            f"eps={eps} violates 1/n < eps (ascond2) for n={n}", condition="ascond2"
        )
    if eps_exact > min(p_exact, 1 - p_exact):
        raise RegimeError(
            f"eps={eps} exceeds min(p, 1-p); only a one-sided deviation exists (ascond2)",
            condition="ascond2",
        )
    centre, radius = n * p_exact, n * eps_exact
    m = math.ceil(centre)
    h = m - math.ceil(centre - radius)
    g = math.floor(centre + radius) - m + 1
    return ContinuousPartition(n=n, p=float(p), eps=float(eps), m=m, h=h, g=g)


def iter_bernoulli_grids(kmax: int, rsmax: int) -> Iterable[BernoulliGrid]:
    """All Bernoulli grids with k <= kmax and r, s <= rsmax."""
    for k in range(1, kmax + 1):
        for r in range(1, rsmax + 1):
            for s in range(1, rsmax + 1):
                yield BernoulliGrid(k, r, s)


def iter_discrete_grids(nmax: int, nmin: int = 2) -> Iterable[DiscreteGrid]:
    """All discrete grids with n <= nmax, 2m >= n and 1 <= k < n."""
    for n in range(max(nmin, 2), nmax + 1):
        for m in range((n + 1) // 2, n):
            for k in range(1, n):
                yield DiscreteGrid(n, m, k)
