"""
`frontier`: cost of δ-diversity over the δ grid, for every instance
(probability source) and every scale factor; CSV + SVG.
"""
from __future__ import annotations

import argparse
from concurrent.futures import ThreadPoolExecutor
from typing import List

import structlog

from feeddiv.analysis.frontier import default_grid, frontier, scale_probabilities, write_frontier_csv
from feeddiv.analysis.plot import plot_frontier
from feeddiv.commands import add_run_flags, float_list, output_dir, run_config, source_label
from feeddiv.config import get_settings
from feeddiv.errors import ConfigError
from feeddiv.instances import instance_hash, read_instance
from feeddiv.reporting import write_manifest
from feeddiv.schemas import FrontierRow

logger = structlog.get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("frontier", help="sweep the engagement-diversity frontier")
    parser.add_argument("--instance", action="append", required=True,
                        help="instance file; repeat for several probability sources")
    parser.add_argument("--scales", type=float_list, help="comma-separated probability scale factors")
    parser.add_argument("--cap", type=float, help="cap on scaled probabilities")
    parser.add_argument("--grid", type=int, help="grid points: δ = i / (N T), i = 1..N")
    parser.add_argument("--with-zero", action="store_true", help="also evaluate δ = 0")
    parser.add_argument("--formulation", choices=("direct", "substituted"))
    parser.add_argument("--threads", type=int)
    add_run_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    settings = get_settings()
    config = run_config(
        "frontier",
        instances=args.instance,
        grid=args.grid or settings.GRID_POINTS,
        with_zero=args.with_zero,
        scales=args.scales or settings.SCALE_FACTORS,
        cap=args.cap if args.cap is not None else settings.PROBABILITY_CAP,
        seed=args.seed,
        out=args.out,
        threads=args.threads or settings.THREADS,
        options={"formulation": args.formulation},
    )

    loaded = [(source_label(path), path, read_instance(path)) for path in config.instances]
    labels = [label for label, _, _ in loaded]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"instance files must have distinct names, got {labels}")
    n_types = {instance.n_types for _, _, instance in loaded}
    if len(n_types) != 1:
        raise ConfigError(f"instances must share the number of types, got {sorted(n_types)}")
    T = n_types.pop()
    grid = default_grid(T, config.grid, include_zero=config.with_zero)
    out = output_dir(config.out)

    rows: List[FrontierRow] = []
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        for label, _, instance in loaded:
            for scale in config.scales:
                scaled = scale_probabilities(instance, scale, config.cap)
                rows.extend(frontier(scaled, grid, executor=pool, scale=scale, prob_source=label,
                                     formulation=args.formulation))
    rows.sort(key=lambda row: (row.prob_source, row.scale, row.delta))

    csv_path = write_frontier_csv(rows, out / "frontier.csv")
    svg_path = plot_frontier(rows, out / "frontier.svg", T)
    write_manifest(
        out,
        config=config,
        inputs=config.instances,
        instance_hashes={path: instance_hash(instance) for _, path, instance in loaded},
        outputs=[csv_path, svg_path],
    )
    logger.info("cli.frontier", rows=len(rows), sources=labels, scales=config.scales, threads=config.threads)
    return 0
