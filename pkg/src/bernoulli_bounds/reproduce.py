"""
Table and figure data
=====================

Rebuilds the published comparison tables and the point lists behind the
figure panels. Nothing here renders; every function returns an
``OutputRecord`` the CLI serializes as CSV or JSON.
"""

import logging
import math
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from .bounds import (
    LOG2,
    correction_factor,
    crossover_epsilon,
    general_discrete_bound,
    hoeffding_bound,
    p0_bound_base,
)
from .config import DEFAULT_SETTINGS, BoundsSettings
from .errors import DomainError
from .exact_binomial import tail_probability
from .reporting import OutputRecord

logger = logging.getLogger(__name__)

TABLE1_N = 33
TABLE1_M = 15
TABLE1_KS = tuple(range(2, 16))

TABLE2_NS = (100, 1_000, 100_000)
TABLE2_EPS = (0.02, 0.05, 0.1, 0.2, 0.3, 0.35)

PANELS = ("a", "b", "c", "d")
PANEL_N = {"b": 20, "d": 100}
FIGURE_POINTS = 101


def fixed_decimal(value: Fraction, places: int) -> str:
    """Exact rounding of a rational to ``places`` decimals, ties away from zero, as text."""
    value = Fraction(value)
    scaled = math.floor(abs(value) * 10 ** places + Fraction(1, 2))
    sign = "-" if value < 0 and scaled else ""
    digits = str(scaled).rjust(places + 1, "0")
    if not places:
        return f"{sign}{digits}"
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def quantize(value, places: int) -> float:
    """Round at ``places`` decimals, ties away from zero; floats are rounded from their exact value."""
    return float(fixed_decimal(Fraction(value), places))


def _record(command: str, rows: List[Dict], parameters: Dict, settings: Optional[BoundsSettings]) -> OutputRecord:
    settings = settings or DEFAULT_SETTINGS
    return OutputRecord(command=command, parameters=parameters, rows=rows, metadata=settings.metadata())


def table1(settings: Optional[BoundsSettings] = None) -> OutputRecord:
    """
    True deviation probability against the general discrete and Hoeffding
    bounds for n = 33, p = 15/33 and ε = k/33, k = 2..15.

    The true probability column is the two-sided tail with the weak
    boundary, P(|X̄ - p| >= ε).
    """
    p = Fraction(TABLE1_M, TABLE1_N)
    rows = []
    for k in TABLE1_KS:
        eps = Fraction(k, TABLE1_N)
        tail = tail_probability(TABLE1_N, p, eps, side="two", boundary="weak")
        rows.append({
            "eps": quantize(eps, 4),
            "true_probability": quantize(tail, 6),
            "general_discrete": quantize(general_discrete_bound(TABLE1_N, eps, p).value, 6),
            "hoeffding": quantize(hoeffding_bound(TABLE1_N, eps).value, 6),
        })
    logger.debug(f"table1: {len(rows)} rows")
    return _record(
        "table1", rows,
        {"n": TABLE1_N, "m": TABLE1_M, "k": f"{TABLE1_KS[0]}..{TABLE1_KS[-1]}", "tail_boundary": "weak"},
        settings,
    )


def table2(settings: Optional[BoundsSettings] = None) -> OutputRecord:
    """Correction factor exp(ε·φ(n, ε)) over the published (n, ε) grid, 4 decimals."""
    rows = []
    for n in TABLE2_NS:
        row: Dict[str, float] = {"n": n}
        for eps in TABLE2_EPS:
            row[f"eps={eps}"] = quantize(correction_factor(n, eps), 4)
        rows.append(row)
    return _record("table2", rows, {"n": list(TABLE2_NS), "eps": list(TABLE2_EPS)}, settings)


def _panel_a() -> List[Dict]:
    return [
        {"p": float(p), "f": p0_bound_base(float(p))}
        for p in np.linspace(0.0, 1.0, FIGURE_POINTS)
    ]


def _panel_bounds(n: int) -> List[Dict]:
    rows = []
    for eps in np.linspace(0.0, 1.0, FIGURE_POINTS)[1:]:
        e = float(eps)
        general = general_discrete_bound(n, e).value
        hoeffding = hoeffding_bound(n, e).value
        rows.append({
            "eps": e,
            "general_discrete": general,
            "hoeffding": hoeffding,
            "hoeffding_smaller": hoeffding < general,
        })
    return rows


def _panel_c() -> List[Dict]:
    ns = np.unique(np.geomspace(1, 1_000_000, 61).round().astype(np.int64))
    rows = []
    for n in ns.tolist():
        mu = crossover_epsilon(n)
        rows.append({
            "n": n,
            "mu": mu.mu,
            "mu_squared": mu.mu_squared,
            "n_quarter_mu": n ** 0.25 * mu.mu,
        })
    return rows


def figure_data(panel: str, settings: Optional[BoundsSettings] = None) -> OutputRecord:
    """
    Point list of one figure panel.

    a: f(p) = p^p (1+p)^(1-p) on [0, 1];
    b, d: general discrete and Hoeffding bounds over ε for n = 20 and n = 100;
    c: the crossover level μ(n) and n^(1/4)·μ(n).
    """
    if panel not in PANELS:
        raise DomainError(f"panel must be one of {PANELS}, got {panel!r}")
    parameters: Dict = {"panel": panel}
    if panel == "a":
        rows = _panel_a()
    elif panel == "c":
        rows = _panel_c()
        parameters["n_quarter_mu_limit"] = (LOG2 / 2.0) ** 0.25
    else:
        n = PANEL_N[panel]
        rows = _panel_bounds(n)
        parameters["n"] = n
        parameters["crossover_eps"] = crossover_epsilon(n).mu
    if any(not math.isfinite(v) for row in rows for v in row.values() if isinstance(v, float)):
        logger.warning(f"figure panel {panel} holds non-finite points")
    return _record("figure-data", rows, parameters, settings)
