"""
bernoulli_bounds - Exact Bernoulli Deviation Probabilities and Exponential Tail Bounds
=====================================================================================

Computes exact binomial deviation probabilities, evaluates the exponential
tail bounds for the mean of Bernoulli trials (Bernoulli's classical bound,
Uspensky, Hoeffding and the sharper lattice and continuous-case bounds),
certifies the underlying inequalities over parameter grids with exact
arithmetic, and inverts the bounds for sample-size planning.

Features:
- Big-rational point masses, tails and group decompositions
- Closed-form bound evaluators tagged certified / heuristic
- Exact or outward-rounded verification sweeps with PASS / FAIL / INCONCLUSIVE verdicts
- Hash-chained SQLite ledger of verification runs
- Sample-size and minimal-ε planning
- Table and figure data reproduction as CSV / JSON

Usage:
    from bernoulli_bounds import tail_probability, general_discrete_bound, min_n

    tail_probability(33, "15/33", "2/33", boundary="weak")   # Fraction
    general_discrete_bound(33, "2/33").value                 # 0.785420...
    min_n(0.1, 0.05, "hoeffding").n_min                      # 185

Version: 1.0.0
License: MIT
"""

__version__ = "1.0.0"
__license__ = "MIT"
__description__ = "Exact Bernoulli deviation probabilities, exponential tail bounds and their verification"

# Core imports
from .bounds import (
    BoundFamily,
    BoundValue,
    evaluate,
    general_discrete_bound,
    hoeffding_bound,
    continuous_bound,
    crossover_epsilon,
)
from .config import BoundsSettings
from .errors import BoundsError, DomainError, PlanningError, RegimeError
from .exact_binomial import (
    BernoulliGrid,
    DiscreteGrid,
    group_decomposition,
    tail_probability,
    tail_probability_float,
)
from .ledger import VerificationLedger
from .samplesize import min_eps, min_n
from .sweep import run_sweep
from .verify import Verdict, VerificationReport

# Public API
__all__ = [
    "BoundFamily",
    "BoundValue",
    "BoundsSettings",
    "BoundsError",
    "DomainError",
    "PlanningError",
    "RegimeError",
    "BernoulliGrid",
    "DiscreteGrid",
    "VerificationLedger",
    "Verdict",
    "VerificationReport",
    "continuous_bound",
    "crossover_epsilon",
    "evaluate",
    "general_discrete_bound",
    "group_decomposition",
    "hoeffding_bound",
    "min_eps",
    "min_n",
    "run_sweep",
    "tail_probability",
    "tail_probability_float",
]

# Module configuration
import logging
import os

from rich.console import Console
from rich.logging import RichHandler

# stdout carries output records only; logs go to stderr
logging.basicConfig(
    level=os.getenv("BERNOULLI_BOUNDS_LOG_LEVEL", "WARNING").upper(),
    format="%(name)s - %(message)s",
    handlers=[
        RichHandler(console=Console(stderr=True), show_path=False),
        logging.FileHandler(os.environ["BERNOULLI_BOUNDS_LOG_FILE"])
        if os.getenv("BERNOULLI_BOUNDS_LOG_FILE") else logging.NullHandler(),
    ],
)

logger = logging.getLogger(__name__)
logger.debug(f"bernoulli_bounds v{__version__} initialized")
