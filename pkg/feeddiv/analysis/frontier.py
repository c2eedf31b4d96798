"""
Cost of δ-diversity, probability scaling and the engagement-diversity frontier.
"""
from __future__ import annotations

import csv
from concurrent.futures import Executor
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np
import structlog

from feeddiv.analysis.bounds import alpha_beta, main_bound
from feeddiv.config import get_settings
from feeddiv.core.instance import Instance, build_type_matrices
from feeddiv.core.state import engagement, limiting_state
from feeddiv.errors import ConfigError, FeeddivError, FrontierError, InputOutputError
from feeddiv.lp.builders import opt_delta
from feeddiv.policies import (
    check_delta,
    delta_exact,
    delta_uniform,
    engagement_coefficients,
    optimal_policy,
)
from feeddiv.schemas import FRONTIER_COLUMNS, FrontierRow

logger = structlog.get_logger(__name__)


def default_grid(n_types: int, points: Optional[int] = None, include_zero: bool = False) -> List[float]:
    """δ = i / (points * T) for i = 1..points (from 0 with ``include_zero``)."""
    points = points or get_settings().GRID_POINTS
    start = 0 if include_zero else 1
    return [i / (points * n_types) for i in range(start, points + 1)]


def cost_of_diversity(instance: Instance, delta: float, *, opt_eng: Optional[float] = None) -> float:
    """1 - OPT_δ / OPT_eng, defined as 0 when OPT_eng = 0."""
    check_delta(delta, instance.n_types)
    matrices = build_type_matrices(instance)
    coefficients = engagement_coefficients(instance, matrices)
    if opt_eng is None:
        _, opt_eng = optimal_policy(instance, coefficients)
    if opt_eng <= 0.0:
        return 0.0
    _, value = opt_delta(instance, delta, matrices=matrices, coefficients=coefficients)
    return max(0.0, 1.0 - min(value, opt_eng) / opt_eng)


def scale_probabilities(instance: Instance, factor: float, cap: Optional[float] = None) -> Instance:
    """p' = min(factor * p, cap); graph and affinities unchanged."""
    cap = cap if cap is not None else get_settings().PROBABILITY_CAP
    if factor <= 0:
        raise ConfigError(f"scale factor must be positive, got {factor}")
    if not 0 < cap < 1:
        raise ConfigError(f"cap must lie in (0, 1), got {cap}")
    return instance.with_probabilities(np.minimum(factor * instance.p, cap))


def frontier(
    instance: Instance,
    grid: Optional[Sequence[float]] = None,
    *,
    executor: Optional[Executor] = None,
    scale: float = 1.0,
    prob_source: str = "instance",
    formulation: Optional[str] = None,
) -> List[FrontierRow]:
    """One row per δ; OPT_eng and the type matrices are computed once and shared."""
    grid = list(grid) if grid is not None else default_grid(instance.n_types)
    for delta in grid:
        check_delta(delta, instance.n_types)

    T = instance.n_types
    matrices = build_type_matrices(instance)
    coefficients = engagement_coefficients(instance, matrices)
    _, opt_eng = optimal_policy(instance, coefficients)
    inputs = alpha_beta(instance)

    def bound_main(delta: float) -> Optional[float]:
        if instance.e is not None:
            return None
        return main_bound(T, delta, inputs) if inputs.beta > 0 else 0.0

    def point(delta: float) -> FrontierRow:
        try:
            _, value = opt_delta(
                instance, delta, formulation=formulation, matrices=matrices, coefficients=coefficients
            )
            value = min(value, opt_eng)
            uniform = delta_uniform(instance, delta, coefficients)
            exact = delta_exact(instance, delta, matrices, coefficients)
            return FrontierRow(
                delta=delta,
                opt_delta=value,
                opt_eng=opt_eng,
                cost=max(0.0, 1.0 - value / opt_eng) if opt_eng > 0 else 0.0,
                bound_main=bound_main(delta),
                bound_worst=(T - 1) * delta,
                eng_uniform=engagement(limiting_state(matrices, uniform), instance),
                eng_exact=engagement(limiting_state(matrices, exact), instance),
                scale=scale,
                prob_source=prob_source,
            )
        except FeeddivError as exc:
            raise FrontierError(delta, exc) from exc

    rows = list(executor.map(point, grid)) if executor is not None else [point(d) for d in grid]
    rows.sort(key=lambda row: row.delta)
    logger.info("analysis.frontier", points=len(rows), scale=scale, prob_source=prob_source, opt_eng=opt_eng)
    return rows


def write_frontier_csv(rows: Iterable[FrontierRow], path: Path | str) -> Path:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(FRONTIER_COLUMNS)
            for row in rows:
                data = row.model_dump()
                writer.writerow([repr(data[c]) if isinstance(data[c], float) else data[c] for c in FRONTIER_COLUMNS])
    except OSError as exc:
        raise InputOutputError(f"cannot write frontier CSV {path}: {exc}") from exc
    return path
