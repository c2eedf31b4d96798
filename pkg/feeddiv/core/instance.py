"""
Instance data model, type matrices and injection policies.

An instance is a follower graph (edge (i, j) means "i follows j", so tweets flow
from j to i) plus a T x n matrix of retweet probabilities. Type t propagates
through the sparse matrix A_t with A_t[i, j] = p[t, j] / following(i).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import structlog

from feeddiv.config import get_settings
from feeddiv.core.linalg import SystemSolver
from feeddiv.errors import PolicyError, ProbabilityRangeError, ShapeError

logger = structlog.get_logger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Instance:
    """Follower graph plus per-type retweet probabilities (and optional affinities)."""

    n_users: int
    n_types: int
    edges: np.ndarray  # (m, 2) int, sorted, unique, no self-loops
    p: np.ndarray  # (T, n), entries in [0, 1)
    e: Optional[np.ndarray] = None  # (T, n) nonnegative affinities

    def __post_init__(self) -> None:
        if self.n_users < 1 or self.n_types < 1:
            raise ShapeError(f"need n >= 1 and T >= 1, got n={self.n_users}, T={self.n_types}")

        p = _frozen(self.p)
        if p.shape != (self.n_types, self.n_users):
            raise ShapeError(f"p has shape {p.shape}, expected {(self.n_types, self.n_users)}")
        if not np.all(np.isfinite(p)) or np.any(p < 0) or np.any(p >= 1):
            bad = np.argwhere(~np.isfinite(p) | (p < 0) | (p >= 1))[0]
            raise ProbabilityRangeError(
                f"retweet probability p[{bad[0]}][{bad[1]}]={p[bad[0], bad[1]]!r} outside [0, 1)"
            )
        object.__setattr__(self, "p", p)

        if self.e is not None:
            e = _frozen(self.e)
            if e.shape != p.shape:
                raise ShapeError(f"e has shape {e.shape}, expected {p.shape}")
            if not np.all(np.isfinite(e)) or np.any(e < 0):
                raise ProbabilityRangeError("affinities must be finite and nonnegative")
            object.__setattr__(self, "e", e)

        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= self.n_users:
                raise ShapeError(f"edge endpoint outside [0, {self.n_users})")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ShapeError("self-loop edges are not allowed")
            if len(np.unique(edges, axis=0)) != len(edges):
                raise ShapeError("duplicate edges are not allowed")
        edges = edges.copy()
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(
        cls,
        n_users: int,
        p: Sequence[Sequence[float]] | np.ndarray,
        edges: Iterable[Tuple[int, int]] = (),
        e: Optional[Sequence[Sequence[float]] | np.ndarray] = None,
    ) -> "Instance":
        """Build an instance from raw edge pairs, dropping self-loops and duplicates."""
        p = np.asarray(p, dtype=float)
        if p.ndim != 2:
            raise ShapeError("p must be a T x n matrix")
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        loops = pairs[:, 0] == pairs[:, 1]
        if loops.any():
            logger.warning("instance.self_loops_dropped", count=int(loops.sum()))
            pairs = pairs[~loops]
        unique = np.unique(pairs, axis=0) if len(pairs) else pairs
        if len(unique) != len(pairs):
            logger.warning("instance.duplicate_edges_dropped", count=int(len(pairs) - len(unique)))
        return cls(n_users=n_users, n_types=p.shape[0], edges=unique, p=p, e=e)

    @property
    def weights(self) -> np.ndarray:
        """Objective weights: affinities when set, retweet probabilities otherwise."""
        return self.p if self.e is None else self.e

    @property
    def following(self) -> np.ndarray:
        return np.bincount(self.edges[:, 0], minlength=self.n_users)

    def with_probabilities(self, p: np.ndarray) -> "Instance":
        return Instance(n_users=self.n_users, n_types=self.n_types, edges=self.edges, p=p, e=self.e)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        if (self.e is None) != (other.e is None):
            return False
        return (
            self.n_users == other.n_users
            and self.n_types == other.n_types
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.p, other.p)
            and (self.e is None or np.array_equal(self.e, other.e))
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class TypeMatrices:
    """Per-type CSR matrices A_t with outdegrees and incoming weights inc[t, i]."""

    matrices: Tuple[sp.csr_matrix, ...]
    following: np.ndarray
    inc: np.ndarray
    dense_threshold: int = 2000
    neumann_tolerance: float = 1e-12
    neumann_max_terms: int = 100_000

    @property
    def n_users(self) -> int:
        return int(self.following.shape[0])

    @property
    def n_types(self) -> int:
        return len(self.matrices)

    @cached_property
    def solvers(self) -> Tuple[SystemSolver, ...]:
        # Factorized once, shared by forward (limiting state) and transposed
        # (engagement coefficients, A* rows) solves.
        return tuple(
            SystemSolver(
                matrix,
                dense_threshold=self.dense_threshold,
                tolerance=self.neumann_tolerance,
                max_terms=self.neumann_max_terms,
            )
            for matrix in self.matrices
        )

    def __getitem__(self, t: int) -> sp.csr_matrix:
        return self.matrices[t]


def build_type_matrices(
    instance: Instance,
    *,
    dense_threshold: Optional[int] = None,
    neumann_tolerance: Optional[float] = None,
) -> TypeMatrices:
    """Build A_t[i, j] = p[t, j] / following(i) for every edge (i, j)."""
    if np.any(instance.p >= 1):
        raise ProbabilityRangeError("retweet probabilities must be strictly below 1")

    settings = get_settings()
    n = instance.n_users
    rows, cols = instance.edges[:, 0], instance.edges[:, 1]
    following = instance.following
    matrices: List[sp.csr_matrix] = []
    for t in range(instance.n_types):
        data = instance.p[t, cols] / following[rows] if len(rows) else np.zeros(0)
        matrices.append(sp.csr_matrix((data, (rows, cols)), shape=(n, n)))

    inc = np.vstack([np.asarray(a.sum(axis=1)).ravel() for a in matrices])
    inc.setflags(write=False)
    following = following.copy()
    following.setflags(write=False)

    logger.debug("core.type_matrices_built", n=n, T=instance.n_types, edges=len(rows),
                 max_incoming=float(inc.max()) if inc.size else 0.0)
    return TypeMatrices(
        matrices=tuple(matrices),
        following=following,
        inc=inc,
        dense_threshold=dense_threshold if dense_threshold is not None else settings.DENSE_THRESHOLD,
        neumann_tolerance=neumann_tolerance if neumann_tolerance is not None else settings.NEUMANN_TOLERANCE,
        neumann_max_terms=settings.NEUMANN_MAX_TERMS,
    )


def spectral_radius(matrices: TypeMatrices, t: int, iterations: int = 64) -> float:
    """
    Upper estimate of rho(A_t) via ||A_t^k 1||_inf^(1/k).

    For a nonnegative matrix ||A^k||_inf = ||A^k 1||_inf, so this is the
    Gelfand sequence; it never exceeds the max row sum.
    """
    a = abs(matrices[t])
    vector = np.ones(matrices.n_users)
    estimate = float(matrices.inc[t].max()) if matrices.n_users else 0.0
    for k in range(1, iterations + 1):
        vector = a @ vector
        norm = float(vector.max()) if vector.size else 0.0
        if norm == 0.0:
            return 0.0
        estimate = min(estimate, norm ** (1.0 / k))
    return estimate


# ---------- POLICIES ----------

@dataclass(frozen=True, eq=False)
class InjectionPolicy:
    """Per-type, per-user injected tweet mass b[t, i] (one unit budget per user)."""

    b: np.ndarray

    def __post_init__(self) -> None:
        b = _frozen(self.b)
        if b.ndim != 2:
            raise ShapeError(f"policy must be a T x n matrix, got shape {b.shape}")
        object.__setattr__(self, "b", b)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.b.shape  # type: ignore[return-value]

    def require_valid(self, tolerance: Optional[float] = None) -> "InjectionPolicy":
        report = validate_policy(self, tolerance=tolerance)
        if not report.valid:
            raise PolicyError(f"invalid injection policy: {report.summary()}", report=report)
        return self


@dataclass(frozen=True)
class PolicyViolation:
    kind: str  # "negative" | "budget" | "non_finite"
    user: int
    type_index: Optional[int]
    value: float


@dataclass(frozen=True)
class PolicyReport:
    violations: Tuple[PolicyViolation, ...] = field(default_factory=tuple)

    @property
    def valid(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        head = ", ".join(
            f"{v.kind}(user={v.user}, type={v.type_index}, value={v.value:.6g})"
            for v in self.violations[:5]
        )
        more = len(self.violations) - 5
        return head + (f", ... {more} more" if more > 0 else "")


def validate_policy(policy: InjectionPolicy, tolerance: Optional[float] = None) -> PolicyReport:
    """List every violated policy constraint. Never raises."""
    tol = tolerance if tolerance is not None else get_settings().POLICY_TOLERANCE
    b = policy.b
    violations: List[PolicyViolation] = []

    for t, i in np.argwhere(~np.isfinite(b)):
        violations.append(PolicyViolation("non_finite", int(i), int(t), float(b[t, i])))
    for t, i in np.argwhere(b < 0):
        violations.append(PolicyViolation("negative", int(i), int(t), float(b[t, i])))

    budgets = np.nansum(b, axis=0)
    for i in np.flatnonzero(budgets > 1.0 + tol):
        violations.append(PolicyViolation("budget", int(i), None, float(budgets[i])))

    return PolicyReport(tuple(violations))
