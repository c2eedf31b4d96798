"""
Library and CLI configuration loaded from environment variables.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Any, Dict, List, Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    """Central numerical and runtime settings."""

    # Linear solves
    DENSE_THRESHOLD: int = Field(default=2000, ge=1)
    NEUMANN_TOLERANCE: float = Field(default=1e-12, gt=0)
    NEUMANN_MAX_TERMS: int = Field(default=100_000, ge=1)

    # Policies
    POLICY_TOLERANCE: float = Field(default=1e-9, ge=0)

    # Simplex
    LP_FEASIBILITY_TOLERANCE: float = Field(default=1e-9, gt=0)
    LP_ITERATION_FACTOR: int = Field(default=50, ge=1)
    LP_DIVERSITY_FORMULATION: Literal["direct", "substituted"] = "direct"

    # Dynamics
    TRAJECTORY_CELL_BUDGET: int = Field(default=100_000_000, ge=1)

    # Experiments
    PROBABILITY_CAP: float = Field(default=0.99, gt=0, lt=1)
    SCALE_FACTORS: List[float] = Field(default_factory=lambda: [1.0, 3.0, 10.0, 30.0])
    GRID_POINTS: int = Field(default=10, ge=1)

    # Ingest
    HASHTAG_LIMIT: int = Field(default=2000, ge=1)
    PRIOR_A: float = Field(default=1.0, gt=0)
    PRIOR_B: float = Field(default=100.0, gt=0)
    BETA_SAMPLES: int = Field(default=2, ge=0)

    # Runtime
    THREADS: int = Field(default=1, ge=1)
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = True

    model_config = SettingsConfigDict(
        env_prefix="FEEDDIV_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @field_validator("SCALE_FACTORS")
    @classmethod
    def _positive_scales(cls, value: List[float]) -> List[float]:
        if not value or any(v <= 0 for v in value):
            raise ValueError("scale factors must be a nonempty list of positive numbers")
        return value

    def summary_dict(self) -> Dict[str, Any]:
        """Return settings as a plain dict (for manifests and logs)."""
        return self.model_dump()


@lru_cache
def get_settings() -> Config:
    return Config()
