"""
Artifact writers shared by the commands: run manifests, JSON reports and CSV tables.
"""
from __future__ import annotations

import csv
import hashlib
import json
from importlib import metadata
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import structlog
from pydantic import BaseModel

from feeddiv.config import get_settings
from feeddiv.dynamics.simulate import Trajectory
from feeddiv.errors import InputOutputError
from feeddiv.ingest.records import FollowerGraph
from feeddiv.schemas import Manifest, RunConfig

logger = structlog.get_logger(__name__)

MANIFEST_NAME = "manifest.json"
TRACKED_PACKAGES = ("feeddiv", "numpy", "scipy", "networkx", "matplotlib", "pydantic", "structlog", "langgraph")


def sha256_file(path: Path | str) -> str:
    digest = hashlib.sha256()
    try:
        with Path(path).open("rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 16), b""):
                digest.update(chunk)
    except OSError as exc:
        raise InputOutputError(f"cannot hash {path}: {exc}") from exc
    return digest.hexdigest()


def package_versions(names: Sequence[str] = TRACKED_PACKAGES) -> Dict[str, str]:
    versions: Dict[str, str] = {}
    for name in names:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def _dump(payload: object, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise InputOutputError(f"cannot write {path}: {exc}") from exc
    return path


def write_report(model: BaseModel, path: Path | str) -> Path:
    return _dump(model.model_dump(mode="json"), Path(path))


def write_manifest(
    out_dir: Path | str,
    *,
    config: RunConfig,
    inputs: Iterable[Path | str] = (),
    instance_hashes: Optional[Mapping[str, str]] = None,
    outputs: Iterable[Path | str] = (),
    exit_code: int = 0,
) -> Path:
    """Record what a run read, what it wrote and with which versions and settings."""
    out_dir = Path(out_dir)
    manifest = Manifest(
        command=config.subcommand,
        config=config.model_dump(mode="json"),
        inputs={str(p): sha256_file(p) for p in inputs},
        instance_hashes=dict(instance_hashes or {}),
        outputs=sorted(Path(p).name for p in outputs),
        versions=package_versions(),
        settings=get_settings().summary_dict(),
        exit_code=exit_code,
    )
    path = _dump(manifest.model_dump(mode="json"), out_dir / MANIFEST_NAME)
    logger.info("reporting.manifest_written", path=str(path), outputs=len(manifest.outputs), exit_code=exit_code)
    return path


def _write_rows(path: Path | str, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise InputOutputError(f"cannot write {path}: {exc}") from exc
    return path


def write_trajectory_csv(trajectory: Trajectory, path: Path | str) -> Path:
    """Long format: step, type, user, exposure."""
    rows: List[Sequence[object]] = []
    for k, state in enumerate(trajectory.states):
        n_types, n_users = state.x.shape
        for t in range(n_types):
            rows.extend((k, t, i, repr(float(state.x[t, i]))) for i in range(n_users))
    return _write_rows(path, ("step", "type", "user", "exposure"), rows)


def write_assignment_csv(assignment: Mapping[str, int], path: Path | str) -> Path:
    rows = sorted(assignment.items(), key=lambda item: (item[1], item[0]))
    return _write_rows(path, ("hashtag", "community"), rows)


def write_degrees_csv(graph: FollowerGraph, path: Path | str) -> Path:
    rows = zip(graph.users, graph.following.tolist(), graph.followers.tolist())
    return _write_rows(path, ("user", "following", "followers"), rows)
