"""
`ingest`: tweets JSONL + follower TSV -> one instance per probability source.
"""
from __future__ import annotations

import argparse

import structlog

from feeddiv.commands import add_run_flags, output_dir, run_config
from feeddiv.config import get_settings
from feeddiv.ingest.pipeline import run_ingest
from feeddiv.instances import instance_hash, write_instance
from feeddiv.reporting import write_assignment_csv, write_degrees_csv, write_manifest, write_report
from feeddiv.schemas import PriorConfig

logger = structlog.get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("ingest", help="reconstruct instances from raw records")
    parser.add_argument("--tweets", required=True, help="JSON-lines tweet records")
    parser.add_argument("--edges", required=True, help="TSV follower edges: follower<TAB>followee")
    parser.add_argument("--hashtags", type=int, help="number of most frequent hashtags kept")
    parser.add_argument("--samples", type=int, help="number of Beta posterior draws")
    parser.add_argument("--prior-a", type=float)
    parser.add_argument("--prior-b", type=float)
    parser.add_argument("--cap", type=float, help="upper clamp on inferred probabilities")
    add_run_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    settings = get_settings()
    prior = PriorConfig(
        a=args.prior_a if args.prior_a is not None else settings.PRIOR_A,
        b=args.prior_b if args.prior_b is not None else settings.PRIOR_B,
        samples=args.samples if args.samples is not None else settings.BETA_SAMPLES,
        seed=args.seed,
    )
    config = run_config(
        "ingest",
        seed=args.seed,
        out=args.out,
        cap=args.cap if args.cap is not None else settings.PROBABILITY_CAP,
        options={
            "hashtags": args.hashtags or settings.HASHTAG_LIMIT,
            "prior": prior.model_dump(),
        },
    )
    out = output_dir(args.out)

    result = run_ingest(
        tweets_path=args.tweets,
        edges_path=args.edges,
        hashtag_limit=args.hashtags,
        prior=prior,
        seed=args.seed,
        cap=config.cap,
    )

    outputs = [
        write_assignment_csv(result.assignment, out / "types.csv"),
        write_report(result.graph.stats(), out / "graph_stats.json"),
        write_degrees_csv(result.graph, out / "degrees.csv"),
    ]
    hashes = {}
    for source, instance in sorted(result.instances.items()):
        path = write_instance(instance, out / f"instance_{source}.json")
        outputs.append(path)
        hashes[path.name] = instance_hash(instance)

    write_manifest(out, config=config, inputs=[args.tweets, args.edges], instance_hashes=hashes, outputs=outputs)
    logger.info("cli.ingest", users=result.graph.n_users, types=len(set(result.assignment.values())),
                sources=sorted(result.instances))
    return 0
