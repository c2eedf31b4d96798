"""
Pydantic schemas for files, reports and run configuration.
"""
from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# ---------- INSTANCES / POLICIES / STATES ----------

class InstanceDocument(BaseModel):
    """Instance JSON: 0-based edges [i, j] meaning "i follows j"."""

    model_config = ConfigDict(populate_by_name=True)

    n: int = Field(..., ge=1)
    T: int = Field(..., ge=1)
    edges: List[Tuple[int, int]] = Field(default_factory=list)
    p: List[List[float]]
    e: Optional[List[List[float]]] = None


PolicyMethod = Literal["optimal", "delta_uniform", "delta_exact", "lp"]


class PolicyDocument(BaseModel):
    method: PolicyMethod
    instance_hash: str
    delta: Optional[float] = None
    value: Optional[float] = None
    b: List[List[float]]


class StateDocument(BaseModel):
    instance_hash: str
    method: Optional[PolicyMethod] = None
    delta: Optional[float] = None
    x: List[List[float]]


# ---------- GENERATORS ----------

GeneratorKind = Literal["tightness", "random_graph", "homogeneous", "empty"]


class GeneratorSpec(BaseModel):
    kind: GeneratorKind
    n: int = Field(..., ge=1)
    T: int = Field(..., ge=1)
    seed: int
    alpha: Optional[float] = None
    beta: Optional[float] = None
    edge_probability: float = Field(default=0.1, ge=0, le=1)
    p_low: float = Field(default=0.0, ge=0, lt=1)
    p_high: float = Field(default=0.5, ge=0, le=0.99)
    probabilities: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def validate_parameters(self) -> "GeneratorSpec":
        problems: List[str] = []
        if self.kind == "tightness":
            if self.alpha is None or self.beta is None:
                problems.append("tightness needs alpha and beta")
            else:
                if not 0 < self.beta < 1:
                    problems.append(f"beta={self.beta} must lie in (0, 1)")
                if not 0 <= self.alpha <= self.beta:
                    problems.append(f"alpha={self.alpha} must lie in [0, beta]")
            if self.T < 2:
                problems.append("tightness needs T >= 2")
        if self.p_low > self.p_high:
            problems.append(f"p_low={self.p_low} exceeds p_high={self.p_high}")
        if problems:
            raise ValueError("; ".join(problems))
        return self


# ---------- INGEST ----------

class TweetRecord(BaseModel):
    """One JSON-lines record: author, hashtags, retweet flag."""

    user: str = Field(..., min_length=1)
    hashtags: List[str] = Field(default_factory=list)
    retweet: bool = False

    @field_validator("user", mode="before")
    @classmethod
    def _user_as_text(cls, value: Any) -> str:
        return str(value)

    @field_validator("hashtags")
    @classmethod
    def _normalize(cls, value: List[str]) -> List[str]:
        seen: Dict[str, None] = {}
        for tag in value:
            tag = tag.strip().lstrip("#").lower()
            if tag:
                seen.setdefault(tag, None)
        return list(seen)


class PriorConfig(BaseModel):
    a: float = Field(default=1.0, gt=0)
    b: float = Field(default=100.0, gt=0)
    samples: int = Field(default=2, ge=0)
    seed: int = 0


class GraphStats(BaseModel):
    """Degree summary of a reconstructed follower graph."""

    users: int
    edges: int
    mean_following: float
    max_following: int
    mean_followers: float
    max_followers: int


# ---------- REPORTS ----------

class CheckResult(BaseModel):
    name: str
    passed: bool
    measured: float
    bound: Optional[float] = None
    detail: Optional[str] = None


class ConvergenceReport(BaseModel):
    delta: float
    horizon: int
    lam: float
    gamma: float
    opt_delta: float
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class CostBoundsReport(BaseModel):
    instance_hash: str
    alpha: float
    beta: float
    opt_eng: float
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class FrontierRow(BaseModel):
    delta: float
    opt_delta: float
    opt_eng: float
    cost: float
    bound_main: Optional[float]  # None when the objective uses affinities
    bound_worst: float
    eng_uniform: float
    eng_exact: float
    scale: float = 1.0
    prob_source: str = "instance"


FRONTIER_COLUMNS: Tuple[str, ...] = tuple(FrontierRow.model_fields)


class SolveReport(BaseModel):
    instance_hash: str
    opt_eng: float
    point: Optional[FrontierRow] = None


class VerifyEntry(BaseModel):
    label: str
    instance_hash: str
    convergence: ConvergenceReport
    cost_bounds: CostBoundsReport


class VerifyReport(BaseModel):
    passed: bool
    entries: List[VerifyEntry]


# ---------- CLI ----------

Subcommand = Literal["gen", "ingest", "solve", "frontier", "simulate", "verify"]


class RunConfig(BaseModel):
    subcommand: Subcommand
    instances: List[str] = Field(default_factory=list)
    delta: Optional[float] = None
    grid: int = Field(default=10, ge=1)
    with_zero: bool = False
    scales: List[float] = Field(default_factory=lambda: [1.0])
    cap: float = Field(default=0.99, gt=0, lt=1)
    seed: int = 0
    out: str = "out"
    threads: int = Field(default=1, ge=1)
    options: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("scales")
    @classmethod
    def _positive_scales(cls, value: List[float]) -> List[float]:
        if not value or any(v <= 0 for v in value):
            raise ValueError("scales must be positive")
        return value


class Manifest(BaseModel):
    command: str
    config: Dict[str, Any]
    inputs: Dict[str, str] = Field(default_factory=dict)
    instance_hashes: Dict[str, str] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)
    versions: Dict[str, str] = Field(default_factory=dict)
    settings: Dict[str, Any] = Field(default_factory=dict)
    exit_code: int = 0
