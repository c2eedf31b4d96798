"""
Synthetic instance generators and instance / policy / state files.

Random kinds draw from numpy's PCG64 generator (``numpy.random.default_rng``)
seeded explicitly, so fixtures are portable across machines.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, List, Optional

import numpy as np
import structlog
from pydantic import BaseModel, ValidationError

from feeddiv.core.instance import InjectionPolicy, Instance
from feeddiv.core.state import State
from feeddiv.errors import InputOutputError, InstanceFormatError, ShapeError
from feeddiv.schemas import (
    GeneratorSpec,
    InstanceDocument,
    PolicyDocument,
    PolicyMethod,
    StateDocument,
)

logger = structlog.get_logger(__name__)


# ---------- GENERATORS ----------

def tightness_gamma(alpha: float, beta: float, n_types: int) -> float:
    """Probability of the non-first types in the tight construction."""
    return max(alpha - (beta - alpha) / (n_types - 1), 0.0)


def _random_edges(rng: np.random.Generator, n: int, density: float) -> np.ndarray:
    mask = rng.random((n, n)) < density
    np.fill_diagonal(mask, False)
    return np.argwhere(mask)


def generate(spec: GeneratorSpec) -> Instance:
    """Build an instance for a generator spec; identical specs give identical instances."""
    rng = np.random.default_rng(spec.seed)
    n, T = spec.n, spec.T
    edges = np.zeros((0, 2), dtype=np.int64)

    if spec.kind == "tightness":
        gamma = tightness_gamma(spec.alpha, spec.beta, T)
        p = np.full((T, n), gamma)
        p[0] = spec.beta
    elif spec.kind == "random_graph":
        edges = _random_edges(rng, n, spec.edge_probability)
        p = rng.uniform(spec.p_low, spec.p_high, size=(T, n))
    elif spec.kind == "homogeneous":
        edges = _random_edges(rng, n, spec.edge_probability)
        levels = np.sort(rng.uniform(spec.p_low, spec.p_high, size=T))[::-1]
        p = np.repeat(levels[:, None], n, axis=1)
    else:
        if spec.probabilities is not None:
            p = np.asarray(spec.probabilities, dtype=float)
            if p.shape != (T, n):
                raise ShapeError(f"supplied probabilities have shape {p.shape}, expected {(T, n)}")
        else:
            p = rng.uniform(spec.p_low, spec.p_high, size=(T, n))

    instance = Instance.from_edges(n, p, [tuple(pair) for pair in edges])
    logger.debug("instances.generated", kind=spec.kind, n=n, T=T, edges=len(instance.edges), seed=spec.seed)
    return instance


def random_corpus(count: int, max_n: int, max_T: int, seed: int) -> List[Instance]:
    """Seeded random_graph instances with n in [2, max_n] and T in [2, max_T]."""
    if max_n < 2 or max_T < 2:
        raise ValueError(f"need max_n >= 2 and max_T >= 2, got {max_n}, {max_T}")
    rng = np.random.default_rng(seed)
    corpus = []
    for _ in range(count):
        spec = GeneratorSpec(
            kind="random_graph",
            n=int(rng.integers(2, max_n + 1)),
            T=int(rng.integers(2, max_T + 1)),
            seed=int(rng.integers(2**31)),
            edge_probability=float(rng.uniform(0.05, 0.4)),
            p_high=float(rng.uniform(0.1, 0.9)),
        )
        corpus.append(generate(spec))
    return corpus


# ---------- DOCUMENTS ----------

def to_document(instance: Instance) -> InstanceDocument:
    return InstanceDocument(
        n=instance.n_users,
        T=instance.n_types,
        edges=[(int(i), int(j)) for i, j in instance.edges],
        p=instance.p.tolist(),
        e=instance.e.tolist() if instance.e is not None else None,
    )


def from_document(document: InstanceDocument) -> Instance:
    if len(document.p) != document.T or any(len(row) != document.n for row in document.p):
        raise ShapeError(f"p must be {document.T} rows of {document.n} probabilities")
    if document.e is not None and (
        len(document.e) != document.T or any(len(row) != document.n for row in document.e)
    ):
        raise ShapeError(f"e must be {document.T} rows of {document.n} affinities")
    for i, j in document.edges:
        if not (0 <= i < document.n and 0 <= j < document.n):
            raise ShapeError(f"edge [{i}, {j}] outside users 0..{document.n - 1}")
    return Instance.from_edges(document.n, document.p, document.edges, e=document.e)


def _canonical(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def instance_hash(instance: Instance) -> str:
    """SHA-256 over the canonical JSON of the instance document."""
    document = to_document(instance).model_dump(exclude_none=True)
    return hashlib.sha256(_canonical(document).encode("utf-8")).hexdigest()


def _write_json(model: BaseModel, path: Path | str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        # json emits the shortest repr of each float, which round-trips exactly.
        path.write_text(json.dumps(model.model_dump(exclude_none=True), indent=1) + "\n", encoding="utf-8")
    except OSError as exc:
        raise InputOutputError(f"cannot write {path}: {exc}") from exc
    return path


def _read_json(path: Path | str, schema: type[BaseModel]) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputOutputError(f"cannot read {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path} is not valid JSON: {exc}") from exc
    try:
        return schema.model_validate(payload)
    except ValidationError as exc:
        raise InstanceFormatError(f"{path} does not match the {schema.__name__} format: {exc}") from exc


def write_instance(instance: Instance, path: Path | str) -> Path:
    return _write_json(to_document(instance), path)


def read_instance(path: Path | str) -> Instance:
    instance = from_document(_read_json(path, InstanceDocument))
    logger.info("instances.loaded", path=str(path), n=instance.n_users, T=instance.n_types,
                edges=len(instance.edges))
    return instance


def write_policy(
    policy: InjectionPolicy,
    path: Path | str,
    *,
    method: PolicyMethod,
    instance: Instance,
    delta: Optional[float] = None,
    value: Optional[float] = None,
) -> Path:
    document = PolicyDocument(
        method=method,
        instance_hash=instance_hash(instance),
        delta=delta,
        value=value,
        b=policy.b.tolist(),
    )
    return _write_json(document, path)


def read_policy(path: Path | str, instance: Optional[Instance] = None) -> InjectionPolicy:
    document: PolicyDocument = _read_json(path, PolicyDocument)
    if instance is not None:
        expected = instance_hash(instance)
        if document.instance_hash != expected:
            logger.warning("instances.policy_hash_mismatch", path=str(path),
                           policy_hash=document.instance_hash, instance_hash=expected)
    try:
        return InjectionPolicy(np.asarray(document.b, dtype=float))
    except ValueError as exc:
        raise ShapeError(f"policy in {path} is not a T x n matrix: {exc}") from exc


def write_state(
    state: State,
    path: Path | str,
    *,
    instance: Instance,
    method: Optional[PolicyMethod] = None,
    delta: Optional[float] = None,
) -> Path:
    document = StateDocument(instance_hash=instance_hash(instance), method=method, delta=delta,
                             x=state.x.tolist())
    return _write_json(document, path)
