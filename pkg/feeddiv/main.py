"""
feeddiv - command-line entry point.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

import structlog

from feeddiv import __version__
from feeddiv.commands import frontier, gen, ingest, simulate, solve, verify
from feeddiv.config import get_settings
from feeddiv.errors import FeeddivError

logger = structlog.get_logger(__name__)

COMMANDS = (gen, ingest, solve, frontier, simulate, verify)


def configure_logging(level: str = "INFO", json_output: bool = True) -> None:
    """Structured logs on stderr; stdout and artifact files stay clean."""
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=level.upper(), force=True)
    renderer = structlog.processors.JSONRenderer() if json_output else structlog.dev.ConsoleRenderer()
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feeddiv",
        description="Engagement-optimal and diversity-constrained injection policies for tweet propagation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = get_settings()
    except ValueError as exc:
        sys.stderr.write(f"feeddiv: invalid settings: {exc}\n")
        return 2
    configure_logging(settings.LOG_LEVEL, settings.LOG_JSON)
    logger.debug("config.loaded", **settings.summary_dict())

    try:
        return args.handler(args)
    except FeeddivError as exc:
        logger.error("cli.failed", command=args.command, error=str(exc), error_type=type(exc).__name__,
                     exit_code=exc.exit_code)
        return exc.exit_code
    except Exception:
        logger.exception("cli.crashed", command=args.command)
        return 1


if __name__ == "__main__":
    sys.exit(main())
