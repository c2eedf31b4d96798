"""
Fixed-layout MPS export for cross-checking against external solvers.

MPS minimizes, so the objective row carries the negated coefficients.
"""
from __future__ import annotations

from pathlib import Path
from typing import List

import numpy as np

from feeddiv.errors import InputOutputError
from feeddiv.lp.program import LinearProgram, Relation


def _number(value: float) -> str:
    for digits in range(12, 0, -1):
        text = f"{value:.{digits}g}"
        if len(text) <= 12:
            return text
    return f"{value:.1e}"


def _entry(name: str, row: str, value: float) -> str:
    return f"    {name:<8}  {row:<8}  {_number(value):>12}"


def to_mps(lp: LinearProgram, name: str = "FEEDDIV") -> str:
    rows = [f"R{r:07d}" for r in range(lp.n_constraints)]
    cols = [f"X{j:07d}" for j in range(lp.n_variables)]
    lines: List[str] = [
        "* maximization problem: objective row negated",
        f"NAME          {name[:8]}",
        "ROWS",
        " N  COST",
    ]
    lines += [f" {'L' if rel is Relation.LE else 'G'}  {row}" for row, rel in zip(rows, lp.relations)]

    lines.append("COLUMNS")
    for j, col in enumerate(cols):
        if lp.objective[j] != 0.0:
            lines.append(_entry(col, "COST", -float(lp.objective[j])))
        for r in np.flatnonzero(lp.matrix[:, j]):
            lines.append(_entry(col, rows[r], float(lp.matrix[r, j])))

    lines.append("RHS")
    for r in np.flatnonzero(lp.rhs):
        lines.append(_entry("RHS", rows[r], float(lp.rhs[r])))
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def write_mps(lp: LinearProgram, path: Path | str, name: str = "FEEDDIV") -> Path:
    path = Path(path)
    try:
        path.write_text(to_mps(lp, name), encoding="utf-8")
    except OSError as exc:
        raise InputOutputError(f"cannot write MPS file {path}: {exc}") from exc
    return path
