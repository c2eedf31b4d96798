"""
Generic maximization LP: maximize c^T x subject to rows (a, <= or >=, bound), x >= 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from feeddiv.errors import ShapeError


class Relation(str, Enum):
    LE = "<="
    GE = ">="


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    objective: np.ndarray  # (k,)
    matrix: np.ndarray  # (m, k)
    relations: Tuple[Relation, ...]
    rhs: np.ndarray  # (m,)
    formulation: str = "generic"
    layout: Optional[Tuple[int, int]] = None  # (T, n) when variables are b[t, i] or y[t, i]

    def __post_init__(self) -> None:
        objective = np.asarray(self.objective, dtype=float).ravel()
        matrix = np.asarray(self.matrix, dtype=float).reshape(-1, objective.size)
        rhs = np.asarray(self.rhs, dtype=float).ravel()
        if matrix.shape[0] != rhs.size or len(self.relations) != rhs.size:
            raise ShapeError(
                f"{matrix.shape[0]} constraint rows, {len(self.relations)} relations, {rhs.size} bounds"
            )
        if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(rhs)) and np.all(np.isfinite(objective))):
            raise ShapeError("LP data must be finite")
        for name, value in (("objective", objective), ("matrix", matrix), ("rhs", rhs)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "relations", tuple(Relation(r) for r in self.relations))

    @classmethod
    def from_rows(
        cls,
        objective: Sequence[float],
        rows: Sequence[Tuple[Sequence[float], str, float]],
        **kwargs,
    ) -> "LinearProgram":
        objective = np.asarray(objective, dtype=float)
        matrix = np.array([np.asarray(a, dtype=float) for a, _, _ in rows]).reshape(-1, objective.size)
        return cls(
            objective=objective,
            matrix=matrix,
            relations=tuple(Relation(r) for _, r, _ in rows),
            rhs=np.array([bound for _, _, bound in rows], dtype=float),
            **kwargs,
        )

    @property
    def n_variables(self) -> int:
        return int(self.objective.size)

    @property
    def n_constraints(self) -> int:
        return int(self.rhs.size)

    @property
    def constraints(self) -> List[Tuple[np.ndarray, Relation, float]]:
        return [(self.matrix[r], self.relations[r], float(self.rhs[r])) for r in range(self.n_constraints)]

    def evaluate(self, values: np.ndarray) -> float:
        return float(self.objective @ values)

    def max_violation(self, values: np.ndarray) -> float:
        """Largest violation over constraints and nonnegativity (0 when feasible)."""
        values = np.asarray(values, dtype=float)
        lhs = self.matrix @ values
        ge = np.array([r is Relation.GE for r in self.relations], dtype=bool)
        gaps = np.where(ge, self.rhs - lhs, lhs - self.rhs)
        worst = float(gaps.max()) if gaps.size else 0.0
        if values.size:
            worst = max(worst, float(-values.min()))
        return max(worst, 0.0)


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    values: Optional[np.ndarray]
    objective: Optional[float]
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL
