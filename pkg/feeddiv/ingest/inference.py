"""
Per user/type counts and retweet-probability inference.

s[t, i] counts type-t hashtag occurrences in records authored by users i
follows; r[t, i] counts type-t hashtag occurrences in i's own retweets. A
record with k hashtags of one type contributes k.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np
import scipy.sparse as sp
import structlog
from scipy.stats import beta as beta_dist

from feeddiv.config import get_settings
from feeddiv.ingest.records import FollowerGraph
from feeddiv.schemas import PriorConfig, TweetRecord

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class TypeCounts:
    retweets: np.ndarray  # r, (T, n) int
    seen: np.ndarray  # s, (T, n) int


def count_types(
    records: Iterable[TweetRecord],
    graph: FollowerGraph,
    assignment: Dict[str, int],
    n_types: int,
) -> TypeCounts:
    n = graph.n_users
    index = graph.index
    authored = np.zeros((n, n_types), dtype=np.int64)
    retweets = np.zeros((n_types, n), dtype=np.int64)

    for record in records:
        user = index.get(record.user)
        if user is None:
            continue
        types = [assignment[tag] for tag in record.hashtags if tag in assignment]
        if not types:
            continue
        per_type = np.bincount(types, minlength=n_types)
        authored[user] += per_type
        if record.retweet:
            retweets[:, user] += per_type

    # follows[i, j] = 1 when i follows j, so (follows @ authored)[i] sums over followees.
    rows, cols = graph.edges[:, 0], graph.edges[:, 1]
    follows = sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n))
    seen = np.asarray(follows @ authored).T.astype(np.int64)

    logger.info("ingest.types_counted", users=n, T=n_types, seen=int(seen.sum()), retweets=int(retweets.sum()))
    return TypeCounts(retweets=retweets, seen=seen)


def infer_mode(counts: TypeCounts, cap: float | None = None) -> np.ndarray:
    """p = r / s where s > 0, else 0; clamped to the cap."""
    cap = cap if cap is not None else get_settings().PROBABILITY_CAP
    r = counts.retweets.astype(float)
    s = counts.seen.astype(float)
    p = np.divide(r, s, out=np.zeros_like(r), where=s > 0)
    return np.minimum(p, cap)


def posterior_parameters(counts: TypeCounts, prior: PriorConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Beta(a + r, b + s), the posterior as printed in the source model."""
    return prior.a + counts.retweets.astype(float), prior.b + counts.seen.astype(float)


def posterior_mean(counts: TypeCounts, prior: PriorConfig) -> np.ndarray:
    a, b = posterior_parameters(counts, prior)
    return beta_dist(a, b).mean()


def infer_beta_samples(
    counts: TypeCounts, prior: PriorConfig, cap: float | None = None
) -> List[np.ndarray]:
    """``prior.samples`` independent draws of the probability matrix, clamped to [0, cap]."""
    cap = cap if cap is not None else get_settings().PROBABILITY_CAP
    a, b = posterior_parameters(counts, prior)
    rng = np.random.default_rng(prior.seed)
    posterior = beta_dist(a, b)
    samples = [np.clip(posterior.rvs(random_state=rng), 0.0, cap) for _ in range(prior.samples)]
    logger.debug("ingest.beta_sampled", samples=len(samples), seed=prior.seed)
    return samples
