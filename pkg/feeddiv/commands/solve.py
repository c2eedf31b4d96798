"""
`solve`: engagement-optimal policy, and with --delta the δ-diverse optimum
plus both closed-form δ-diverse policies.
"""
from __future__ import annotations

import argparse
import sys

import structlog

from feeddiv.analysis.frontier import frontier
from feeddiv.commands import add_run_flags, output_dir, run_config
from feeddiv.core.instance import build_type_matrices
from feeddiv.instances import instance_hash, read_instance, write_policy
from feeddiv.lp.builders import build_diversity_lp, build_engagement_lp, opt_delta
from feeddiv.lp.mps import write_mps
from feeddiv.policies import check_delta, delta_exact, delta_uniform, engagement_coefficients, optimal_policy
from feeddiv.reporting import write_manifest, write_report
from feeddiv.schemas import SolveReport

logger = structlog.get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("solve", help="compute optimal and δ-diverse policies")
    parser.add_argument("--instance", required=True)
    parser.add_argument("--delta", type=float, help="diversity level in [0, 1/T]")
    parser.add_argument("--formulation", choices=("direct", "substituted"))
    parser.add_argument("--mps", help="also export the program to this MPS file")
    add_run_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = run_config("solve", instances=[args.instance], delta=args.delta, seed=args.seed, out=args.out,
                        options={"formulation": args.formulation, "mps": args.mps})
    instance = read_instance(args.instance)
    if args.delta is not None:
        check_delta(args.delta, instance.n_types)
    out = output_dir(args.out)
    digest = instance_hash(instance)

    matrices = build_type_matrices(instance)
    coefficients = engagement_coefficients(instance, matrices)
    policy, opt_eng = optimal_policy(instance, coefficients)
    outputs = [write_policy(policy, out / "policy_optimal.json", method="optimal", instance=instance, value=opt_eng)]

    point = None
    if args.delta is not None:
        delta = args.delta
        point = frontier(instance, [delta], formulation=args.formulation)[0]
        lp_policy, _ = opt_delta(instance, delta, formulation=args.formulation, matrices=matrices,
                                 coefficients=coefficients)
        outputs.append(write_policy(lp_policy, out / "policy_lp.json", method="lp", instance=instance,
                                    delta=delta, value=point.opt_delta))
        outputs.append(write_policy(delta_uniform(instance, delta, coefficients), out / "policy_delta_uniform.json",
                                    method="delta_uniform", instance=instance, delta=delta,
                                    value=point.eng_uniform))
        outputs.append(write_policy(delta_exact(instance, delta, matrices, coefficients),
                                    out / "policy_delta_exact.json", method="delta_exact", instance=instance,
                                    delta=delta, value=point.eng_exact))

    if args.mps:
        program = (
            build_diversity_lp(instance, args.delta, formulation=args.formulation, matrices=matrices,
                               coefficients=coefficients)
            if args.delta is not None
            else build_engagement_lp(instance, coefficients)
        )
        outputs.append(write_mps(program, args.mps))

    report = SolveReport(instance_hash=digest, opt_eng=opt_eng, point=point)
    outputs.append(write_report(report, out / "solve.json"))
    write_manifest(out, config=config, inputs=[args.instance], instance_hashes={args.instance: digest},
                   outputs=outputs)

    sys.stdout.write(report.model_dump_json() + "\n")
    logger.info("cli.solve", opt_eng=opt_eng, delta=args.delta,
                opt_delta=point.opt_delta if point is not None else None)
    return 0
