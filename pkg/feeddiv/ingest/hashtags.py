"""
Hashtag selection, co-occurrence network and Louvain types.
"""
from __future__ import annotations

from collections import Counter
from itertools import combinations
from typing import Dict, Iterable, List, Sequence, Set

import networkx as nx
import structlog

from feeddiv.errors import InstanceError
from feeddiv.schemas import TweetRecord

logger = structlog.get_logger(__name__)


def top_hashtags(records: Iterable[TweetRecord], limit: int) -> List[str]:
    """The ``limit`` hashtags appearing in most records; ties go to the lexicographically smaller."""
    if limit < 1:
        raise ValueError(f"hashtag limit must be >= 1, got {limit}")
    counts = Counter(tag for record in records for tag in record.hashtags)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [tag for tag, _ in ranked[:limit]]


def cooccurrence_network(records: Iterable[TweetRecord], retained: Iterable[str]) -> nx.Graph:
    """Weighted graph over retained hashtags; weight = number of records containing both."""
    keep: Set[str] = set(retained)
    network = nx.Graph()
    network.add_nodes_from(sorted(keep))
    for record in records:
        tags = sorted(tag for tag in record.hashtags if tag in keep)
        for a, b in combinations(tags, 2):
            if network.has_edge(a, b):
                network[a][b]["weight"] += 1
            else:
                network.add_edge(a, b, weight=1)
    logger.debug("ingest.network_built", nodes=network.number_of_nodes(), edges=network.number_of_edges())
    return network


def _sorted_copy(network: nx.Graph) -> nx.Graph:
    ordered = nx.Graph()
    ordered.add_nodes_from(sorted(network.nodes))
    ordered.add_weighted_edges_from(
        sorted((min(a, b), max(a, b), d.get("weight", 1)) for a, b, d in network.edges(data=True))
    )
    return ordered


def louvain_communities(network: nx.Graph, seed: int) -> Dict[str, int]:
    """
    Hashtag -> type index from weighted Louvain. Communities are numbered by
    decreasing size, then by their smallest hashtag.
    """
    if network.number_of_nodes() == 0:
        raise InstanceError("cannot detect types on an empty hashtag network")
    communities: Sequence[Set[str]] = nx.community.louvain_communities(
        _sorted_copy(network), weight="weight", seed=seed
    )
    ordered = sorted(communities, key=lambda c: (-len(c), min(c)))
    assignment = {tag: t for t, community in enumerate(ordered) for tag in community}
    logger.info("ingest.types_detected", types=len(ordered), hashtags=len(assignment))
    return assignment


def modularity_trace(network: nx.Graph, seed: int) -> List[float]:
    """Modularity of the singleton partition followed by each Louvain level."""
    graph = _sorted_copy(network)
    if graph.number_of_edges() == 0:
        return [0.0]
    trace = [nx.community.modularity(graph, [{node} for node in graph.nodes], weight="weight")]
    for level in nx.community.louvain_partitions(graph, weight="weight", seed=seed):
        trace.append(nx.community.modularity(graph, level, weight="weight"))
    return trace
