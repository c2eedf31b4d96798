from __future__ import annotations

import pytest

from feeddiv.config import get_settings
from feeddiv.core.instance import Instance
from feeddiv.instances import generate
from feeddiv.schemas import GeneratorSpec


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def chain2() -> Instance:
    """User 0 follows user 1; two types."""
    return Instance.from_edges(2, [[0.2, 0.5], [0.4, 0.1]], [(0, 1)])


@pytest.fixture
def tight() -> Instance:
    return generate(GeneratorSpec(kind="tightness", n=10, T=4, seed=0, alpha=0.5, beta=0.8))
