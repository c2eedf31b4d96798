"""
Subcommand modules. Each exposes ``register(subparsers)``, which adds its
parser and sets ``handler`` to a function taking the parsed namespace and
returning the exit status.
"""
from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any, List

from pydantic import ValidationError

from feeddiv.errors import ConfigError, InputOutputError
from feeddiv.schemas import RunConfig


def add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, default=0)


def float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def run_config(subcommand: str, **fields: Any) -> RunConfig:
    try:
        return RunConfig(subcommand=subcommand, **{k: v for k, v in fields.items() if v is not None})
    except ValidationError as exc:
        raise ConfigError(f"invalid {subcommand} options: {exc}") from exc


def output_dir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputOutputError(f"cannot create output directory {out}: {exc}") from exc
    return out


def source_label(path: str) -> str:
    """``out/instance_mode.json`` -> ``mode``; other files keep their stem."""
    stem = Path(path).stem
    return stem[len("instance_"):] if stem.startswith("instance_") else stem
