import os
import sys

import pytest

# Ensure project root is on sys.path for test imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from edgeSampler.graph import Graph  # noqa: E402


@pytest.fixture
def single_edge() -> Graph:
    return Graph(2, [(0, 1)])


@pytest.fixture
def star9() -> Graph:
    """Star on 9 vertices with center 0."""
    return Graph(9, [(0, i) for i in range(1, 9)])
