"""
Readers for the raw inputs: tweet records (JSON lines) and follower edges (TSV).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Tuple

import numpy as np
import structlog
from pydantic import ValidationError

from feeddiv.errors import IngestFormatError, InputOutputError
from feeddiv.schemas import GraphStats, TweetRecord

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class FollowerGraph:
    """Users (sorted ids, index = position) and 0-based edges (follower, followee)."""

    users: Tuple[str, ...]
    edges: np.ndarray

    @property
    def index(self) -> Dict[str, int]:
        return {user: i for i, user in enumerate(self.users)}

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def following(self) -> np.ndarray:
        return np.bincount(self.edges[:, 0], minlength=self.n_users)

    @property
    def followers(self) -> np.ndarray:
        return np.bincount(self.edges[:, 1], minlength=self.n_users)

    def stats(self) -> GraphStats:
        following, followers = self.following, self.followers
        return GraphStats(
            users=self.n_users,
            edges=len(self.edges),
            mean_following=float(following.mean()) if self.n_users else 0.0,
            max_following=int(following.max(initial=0)),
            mean_followers=float(followers.mean()) if self.n_users else 0.0,
            max_followers=int(followers.max(initial=0)),
        )


def _read_lines(path: Path | str) -> List[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputOutputError(f"cannot read {path}: {exc}") from exc


def read_records(path: Path | str) -> List[TweetRecord]:
    """Parse one TweetRecord per non-blank line; every malformed line is reported."""
    records: List[TweetRecord] = []
    bad: List[int] = []
    for number, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        try:
            records.append(TweetRecord.model_validate(json.loads(line)))
        except (json.JSONDecodeError, ValidationError, TypeError):
            bad.append(number)
    if bad:
        raise IngestFormatError(f"{path}: malformed tweet records on lines {bad[:20]}", lines=bad)
    logger.info("ingest.records_loaded", path=str(path), records=len(records))
    return records


def read_edge_rows(path: Path | str) -> List[Tuple[str, str]]:
    rows: List[Tuple[str, str]] = []
    bad: List[int] = []
    for number, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        fields = line.rstrip("\r\n").split("\t")
        if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
            bad.append(number)
            continue
        rows.append((fields[0].strip(), fields[1].strip()))
    if bad:
        raise IngestFormatError(f"{path}: malformed edge rows on lines {bad[:20]}", lines=bad)
    return rows


def build_follower_graph(path: Path | str, authors: Iterable[str] = ()) -> FollowerGraph:
    """TSV rows "follower<TAB>followee" -> deduplicated edges over endpoints and authors."""
    rows = read_edge_rows(path)
    loops = [row for row in rows if row[0] == row[1]]
    if loops:
        logger.warning("ingest.self_loops_dropped", count=len(loops))
    pairs = sorted({row for row in rows if row[0] != row[1]})
    if len(pairs) + len(loops) < len(rows):
        logger.warning("ingest.duplicate_edges_dropped", count=len(rows) - len(loops) - len(pairs))

    users = tuple(sorted({u for pair in pairs for u in pair} | set(authors)))
    index = {user: i for i, user in enumerate(users)}
    edges = np.array([(index[a], index[b]) for a, b in pairs], dtype=np.int64).reshape(-1, 2)

    graph = FollowerGraph(users=users, edges=edges)
    logger.info("ingest.graph_loaded", **graph.stats().model_dump())
    return graph
