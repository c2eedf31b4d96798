"""
Solves against (I - A) for a nonnegative, row-substochastic sparse A.

Small systems are LU-factorized once and reused for forward and transposed
solves. Large systems use the Neumann series sum_l A^l b, which converges
because rho(A) < 1.
"""
from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import structlog

from feeddiv.errors import NumericalError

logger = structlog.get_logger(__name__)


class SystemSolver:
    """Solve (I - A) x = rhs or (I - A)^T x = rhs."""

    def __init__(
        self,
        matrix: sp.csr_matrix,
        *,
        dense_threshold: int = 2000,
        tolerance: float = 1e-12,
        max_terms: int = 100_000,
    ) -> None:
        self.matrix = matrix.tocsr()
        self.size = matrix.shape[0]
        self.tolerance = tolerance
        self.max_terms = max_terms
        self.mode = "dense" if self.size <= dense_threshold else "neumann"
        self._lu = None

    def _factorization(self):
        if self._lu is None:
            system = np.eye(self.size) - self.matrix.toarray()
            with warnings.catch_warnings():
                warnings.simplefilter("error", la.LinAlgWarning)
                try:
                    self._lu = la.lu_factor(system, check_finite=True)
                except (la.LinAlgWarning, ValueError) as exc:
                    raise NumericalError(f"I - A is singular to working precision: {exc}") from exc
            if np.any(np.abs(np.diag(self._lu[0])) < 1e-14):
                raise NumericalError("I - A is singular to working precision")
        return self._lu

    def solve(self, rhs: np.ndarray, *, transpose: bool = False) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[0] != self.size:
            raise NumericalError(f"right-hand side has {rhs.shape[0]} rows, system has {self.size}")
        if self.size == 0:
            return rhs.copy()
        if self.mode == "dense":
            result = la.lu_solve(self._factorization(), rhs, trans=1 if transpose else 0)
        else:
            result = self._neumann(rhs, transpose)
        if not np.all(np.isfinite(result)):
            raise NumericalError("solve produced non-finite values")
        return result

    def _neumann(self, rhs: np.ndarray, transpose: bool) -> np.ndarray:
        operator = self.matrix.T.tocsr() if transpose else self.matrix
        term = rhs.copy()
        total = rhs.copy()
        for count in range(1, self.max_terms + 1):
            term = operator @ term
            total += term
            if np.abs(term).sum() < self.tolerance:
                logger.debug("linalg.neumann_converged", terms=count, size=self.size)
                return total
        raise NumericalError(f"Neumann series did not converge within {self.max_terms} terms")
