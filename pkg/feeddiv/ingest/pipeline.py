"""
Ingest pipeline graph: raw tweets and follower edges to instances.

Linear graph of nodes over one shared state:
load_inputs -> select_hashtags -> detect_types -> count_types -> infer_probabilities
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, TypedDict

import networkx as nx
import numpy as np
import structlog
from langgraph.graph import END, StateGraph

from feeddiv.config import get_settings
from feeddiv.core.instance import Instance
from feeddiv.ingest.hashtags import cooccurrence_network, louvain_communities, modularity_trace, top_hashtags
from feeddiv.ingest.inference import TypeCounts, count_types, infer_beta_samples, infer_mode
from feeddiv.ingest.records import FollowerGraph, build_follower_graph, read_records
from feeddiv.schemas import PriorConfig, TweetRecord

logger = structlog.get_logger(__name__)


class IngestState(TypedDict, total=False):
    tweets_path: str
    edges_path: str
    hashtag_limit: int
    seed: int
    cap: float
    prior: PriorConfig
    records: List[TweetRecord]
    graph: FollowerGraph
    retained: List[str]
    network: nx.Graph
    assignment: Dict[str, int]
    n_types: int
    counts: TypeCounts
    instances: Dict[str, Instance]


def load_node(state: IngestState) -> IngestState:
    records = read_records(state["tweets_path"])
    graph = build_follower_graph(state["edges_path"], authors=[r.user for r in records])
    return {"records": records, "graph": graph}


def hashtags_node(state: IngestState) -> IngestState:
    retained = top_hashtags(state["records"], state["hashtag_limit"])
    return {"retained": retained, "network": cooccurrence_network(state["records"], retained)}


def types_node(state: IngestState) -> IngestState:
    network = state["network"]
    assignment = louvain_communities(network, seed=state["seed"])
    logger.info("ingest.modularity", trace=modularity_trace(network, seed=state["seed"]))
    return {"assignment": assignment, "n_types": max(assignment.values()) + 1}


def counts_node(state: IngestState) -> IngestState:
    counts = count_types(state["records"], state["graph"], state["assignment"], state["n_types"])
    return {"counts": counts}


def inference_node(state: IngestState) -> IngestState:
    graph = state["graph"]
    counts = state["counts"]
    sources: Dict[str, np.ndarray] = {"mode": infer_mode(counts, cap=state["cap"])}
    for k, sample in enumerate(infer_beta_samples(counts, state["prior"], cap=state["cap"]), start=1):
        sources[f"beta_sample_{k}"] = sample

    instances = {
        name: Instance(n_users=graph.n_users, n_types=state["n_types"], edges=graph.edges, p=p)
        for name, p in sources.items()
    }
    logger.info("ingest.instances_built", sources=sorted(instances), n=graph.n_users, T=state["n_types"])
    return {"instances": instances}


graph = StateGraph(IngestState)
graph.add_node("load_inputs", load_node)
graph.add_node("select_hashtags", hashtags_node)
graph.add_node("detect_types", types_node)
graph.add_node("count_types", counts_node)
graph.add_node("infer_probabilities", inference_node)
graph.set_entry_point("load_inputs")
graph.add_edge("load_inputs", "select_hashtags")
graph.add_edge("select_hashtags", "detect_types")
graph.add_edge("detect_types", "count_types")
graph.add_edge("count_types", "infer_probabilities")
graph.add_edge("infer_probabilities", END)
ingest_graph = graph.compile()


@dataclass(frozen=True)
class IngestResult:
    instances: Dict[str, Instance]
    assignment: Dict[str, int]
    graph: FollowerGraph
    counts: TypeCounts


def run_ingest(
    *,
    tweets_path: str,
    edges_path: str,
    hashtag_limit: Optional[int] = None,
    prior: Optional[PriorConfig] = None,
    seed: int = 0,
    cap: Optional[float] = None,
) -> IngestResult:
    settings = get_settings()
    initial: IngestState = {
        "tweets_path": str(tweets_path),
        "edges_path": str(edges_path),
        "hashtag_limit": hashtag_limit or settings.HASHTAG_LIMIT,
        "seed": seed,
        "cap": cap if cap is not None else settings.PROBABILITY_CAP,
        "prior": prior
        or PriorConfig(a=settings.PRIOR_A, b=settings.PRIOR_B, samples=settings.BETA_SAMPLES, seed=seed),
    }
    final = ingest_graph.invoke(initial)
    return IngestResult(
        instances=final["instances"],
        assignment=final["assignment"],
        graph=final["graph"],
        counts=final["counts"],
    )
