"""
`gen`: write a synthetic instance from flags or a JSON generator spec.
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

import structlog
from pydantic import ValidationError

from feeddiv.commands import add_run_flags, output_dir, run_config
from feeddiv.errors import ConfigError, InputOutputError
from feeddiv.instances import generate, instance_hash, write_instance
from feeddiv.reporting import write_manifest
from feeddiv.schemas import GeneratorSpec

logger = structlog.get_logger(__name__)

KIND_ALIASES = {
    "tight": "tightness",
    "tightness": "tightness",
    "random": "random_graph",
    "random_graph": "random_graph",
    "homogeneous": "homogeneous",
    "empty": "empty",
}


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("gen", help="generate a synthetic instance")
    parser.add_argument("kind", nargs="?", choices=sorted(KIND_ALIASES), help="generator kind")
    parser.add_argument("--spec", help="JSON generator spec (overrides the other flags)")
    parser.add_argument("--n", type=int)
    parser.add_argument("--T", type=int)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--edge-prob", type=float, default=0.1)
    parser.add_argument("--p-low", type=float, default=0.0)
    parser.add_argument("--p-high", type=float, default=0.5)
    parser.add_argument("--name", default="instance.json", help="instance file name inside --out")
    add_run_flags(parser)
    parser.set_defaults(handler=run)


def _load_spec(args: argparse.Namespace) -> GeneratorSpec:
    try:
        if args.spec:
            try:
                payload = json.loads(Path(args.spec).read_text(encoding="utf-8"))
            except OSError as exc:
                raise InputOutputError(f"cannot read generator spec {args.spec}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"generator spec {args.spec} is not valid JSON: {exc}") from exc
            return GeneratorSpec.model_validate(payload)
        if args.kind is None:
            raise ConfigError("gen needs a kind or --spec")
        return GeneratorSpec(
            kind=KIND_ALIASES[args.kind],
            n=args.n,
            T=args.T,
            seed=args.seed,
            alpha=args.alpha,
            beta=args.beta,
            edge_probability=args.edge_prob,
            p_low=args.p_low,
            p_high=args.p_high,
        )
    except ValidationError as exc:
        raise ConfigError(f"invalid generator spec: {exc}") from exc


def run(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    config = run_config("gen", seed=spec.seed, out=args.out, options=spec.model_dump(mode="json"))
    out = output_dir(args.out)

    instance = generate(spec)
    path = write_instance(instance, out / args.name)
    digest = instance_hash(instance)
    write_manifest(
        out,
        config=config,
        inputs=[args.spec] if args.spec else [],
        instance_hashes={path.name: digest},
        outputs=[path],
    )
    logger.info("cli.gen", kind=spec.kind, n=spec.n, T=spec.T, path=str(path), instance_hash=digest)
    return 0
