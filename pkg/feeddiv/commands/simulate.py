"""
`simulate`: run the per-step dynamics under a constant policy.
"""
from __future__ import annotations

import argparse

import numpy as np
import structlog

from feeddiv.commands import add_run_flags, output_dir, run_config
from feeddiv.core.instance import InjectionPolicy, Instance, TypeMatrices, build_type_matrices
from feeddiv.core.state import limiting_state
from feeddiv.dynamics.simulate import Schedule, average_engagement, simulate
from feeddiv.errors import ConfigError
from feeddiv.instances import instance_hash, read_instance, read_policy, write_state
from feeddiv.lp.builders import opt_delta
from feeddiv.policies import check_delta, delta_exact, delta_uniform, optimal_policy
from feeddiv.reporting import write_manifest, write_trajectory_csv

logger = structlog.get_logger(__name__)

METHODS = ("optimal", "delta_uniform", "delta_exact", "lp")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("simulate", help="simulate the dynamics under a policy")
    parser.add_argument("--instance", required=True)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--policy", help="policy JSON file")
    source.add_argument("--method", choices=METHODS, help="compute the policy instead of reading it")
    parser.add_argument("--delta", type=float, help="diversity level for the δ-diverse methods")
    parser.add_argument("--steps", type=int, default=100, help="horizon K; states 0..K are written")
    add_run_flags(parser)
    parser.set_defaults(handler=run)


def _policy_for(method: str, instance: Instance, matrices: TypeMatrices, delta: float | None) -> InjectionPolicy:
    if method == "optimal":
        return optimal_policy(instance)[0]
    if delta is None:
        raise ConfigError(f"--method {method} needs --delta")
    delta = check_delta(delta, instance.n_types)
    if method == "delta_uniform":
        return delta_uniform(instance, delta)
    if method == "delta_exact":
        return delta_exact(instance, delta, matrices)
    return opt_delta(instance, delta, matrices=matrices)[0]


def run(args: argparse.Namespace) -> int:
    config = run_config("simulate", instances=[args.instance], delta=args.delta, seed=args.seed, out=args.out,
                        options={"policy": args.policy, "method": args.method, "steps": args.steps})
    instance = read_instance(args.instance)
    matrices = build_type_matrices(instance)
    if args.policy:
        policy = read_policy(args.policy, instance).require_valid()
    else:
        policy = _policy_for(args.method, instance, matrices, args.delta)
    out = output_dir(args.out)

    trajectory = simulate(matrices, Schedule.constant(policy, args.steps))
    limit = limiting_state(matrices, policy)
    outputs = [
        write_trajectory_csv(trajectory, out / "trajectory.csv"),
        write_state(trajectory.final, out / "state_final.json", instance=instance, method=args.method,
                    delta=args.delta),
    ]
    write_manifest(
        out,
        config=config,
        inputs=[args.instance] + ([args.policy] if args.policy else []),
        instance_hashes={args.instance: instance_hash(instance)},
        outputs=outputs,
    )
    logger.info(
        "cli.simulate",
        steps=args.steps,
        average_engagement=average_engagement(trajectory, instance),
        distance_to_limit=float(np.abs(trajectory.final.x - limit.x).sum()),
    )
    return 0
