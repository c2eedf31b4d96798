"""
`verify`: property reports for the convergence harness and the cost bounds,
on instance files and/or a seeded random corpus. Exit status 5 on any failure.
"""
from __future__ import annotations

import argparse
from typing import List, Tuple

import numpy as np
import structlog

from feeddiv.analysis.frontier import default_grid
from feeddiv.analysis.guarantees import verify_cost_bounds
from feeddiv.commands import add_run_flags, output_dir, run_config, source_label
from feeddiv.core.instance import Instance
from feeddiv.dynamics.convergence import random_challenger, verify_convergence
from feeddiv.errors import ConfigError, VerificationError
from feeddiv.instances import instance_hash, random_corpus, read_instance
from feeddiv.policies import check_delta
from feeddiv.reporting import write_manifest, write_report
from feeddiv.schemas import VerifyEntry, VerifyReport

logger = structlog.get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify", help="check the convergence and cost-bound properties")
    parser.add_argument("--instance", action="append", default=[])
    parser.add_argument("--random", type=int, default=0, help="number of seeded random instances")
    parser.add_argument("--max-n", type=int, default=30)
    parser.add_argument("--max-T", type=int, default=4)
    parser.add_argument("--delta", type=float, help="δ for the dynamics checks (default 1/(2T))")
    parser.add_argument("--steps", type=int, default=100, help="horizon K for the dynamics checks")
    parser.add_argument("--grid", type=int, help="grid points for the bound checks")
    add_run_flags(parser)
    parser.set_defaults(handler=run)


def _verify_one(label: str, instance: Instance, args: argparse.Namespace, rng: np.random.Generator) -> VerifyEntry:
    T = instance.n_types
    delta = check_delta(args.delta if args.delta is not None else 1.0 / (2 * T), T)
    challenger = random_challenger(instance.n_users, T, delta, args.steps, rng)
    digest = instance_hash(instance)
    return VerifyEntry(
        label=label,
        instance_hash=digest,
        convergence=verify_convergence(instance, delta, args.steps, challenger=challenger),
        cost_bounds=verify_cost_bounds(instance, default_grid(T, args.grid), instance_hash=digest),
    )


def run(args: argparse.Namespace) -> int:
    if not args.instance and args.random <= 0:
        raise ConfigError("verify needs --instance or --random N")
    if args.steps < 1:
        raise ConfigError(f"--steps must be >= 1, got {args.steps}")
    config = run_config("verify", instances=args.instance, delta=args.delta, grid=args.grid, seed=args.seed,
                        out=args.out, options={"random": args.random, "max_n": args.max_n,
                                               "max_T": args.max_T, "steps": args.steps})
    out = output_dir(args.out)

    targets: List[Tuple[str, Instance]] = [(source_label(path), read_instance(path)) for path in args.instance]
    targets += [(f"random_{k}", inst) for k, inst in
                enumerate(random_corpus(args.random, args.max_n, args.max_T, args.seed))]

    rng = np.random.default_rng(args.seed)
    entries = [_verify_one(label, instance, args, rng) for label, instance in targets]
    passed = all(entry.convergence.passed and entry.cost_bounds.passed for entry in entries)
    report_path = write_report(VerifyReport(passed=passed, entries=entries), out / "verify.json")

    exit_code = 0 if passed else VerificationError.exit_code
    write_manifest(
        out,
        config=config,
        inputs=args.instance,
        instance_hashes={entry.label: entry.instance_hash for entry in entries},
        outputs=[report_path],
        exit_code=exit_code,
    )
    failed = [entry.label for entry in entries if not (entry.convergence.passed and entry.cost_bounds.passed)]
    logger.info("cli.verify", instances=len(entries), failed=failed)
    if failed:
        raise VerificationError(f"{len(failed)} of {len(entries)} instances failed verification: {failed[:10]}")
    return 0
