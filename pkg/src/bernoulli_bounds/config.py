"""
Runtime configuration
=====================

Defaults for precision, backend selection and sweep ranges. Values can be
overridden through environment variables and, from the CLI, through flags.
"""

import logging
import os
from typing import Any, Dict, Literal

from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)

PRECISION_ENV = "BERNOULLI_BOUNDS_PRECISION_BITS"
BACKEND_ENV = "BERNOULLI_BOUNDS_BACKEND_THRESHOLD"
JOBS_ENV = "BERNOULLI_BOUNDS_JOBS"

SCHEMA_VERSION = "1.0"


class SweepRanges(BaseModel):
    """Default parameter ranges of the verification sweeps."""

    model_config = ConfigDict(frozen=True)

    kmax: int = Field(6, ge=1)
    rsmax: int = Field(12, ge=1)
    nmax: int = Field(200, ge=2)
    one_sided_kmax: int = Field(5, ge=1)
    one_sided_rsmax: int = Field(10, ge=1)
    lemma_nmax: int = Field(1000, ge=1)


class BoundsSettings(BaseModel):
    """Settings shared by the library and the CLI."""

    model_config = ConfigDict(frozen=True)

    precision_bits: int = Field(128, ge=16)
    backend_threshold: int = Field(500, ge=1)
    boundary: Literal["strict", "weak"] = "strict"
    jobs: int = Field(1, ge=1)
    sweep: SweepRanges = SweepRanges()

    @classmethod
    def from_env(cls, **overrides: Any) -> "BoundsSettings":
        """Build settings from the environment, then apply explicit overrides."""
        values: Dict[str, Any] = {}
        for key, env_name in (
            ("precision_bits", PRECISION_ENV),
            ("backend_threshold", BACKEND_ENV),
            ("jobs", JOBS_ENV),
        ):
            raw = os.getenv(env_name)
            if raw:
                try:
                    values[key] = int(raw)
                except ValueError:
                    logger.warning(f"Ignoring non-integer {env_name}={raw!r}")
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def metadata(self) -> Dict[str, Any]:
        """Settings echoed into every output record."""
        return {
            "precision_bits": self.precision_bits,
            "backend_threshold": self.backend_threshold,
            "boundary": self.boundary,
        }


DEFAULT_SETTINGS = BoundsSettings()
