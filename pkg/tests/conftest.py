import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'scripts'))

from graphs.constructions import path_graph
from sampling.threshold_random_graph import ColoredHostGraph, EdgeBlock, block_sizes
from weightings.threshold_weighting import uniform_walk


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long statistical runs, enabled with KAPPA_RUN_SLOW=1")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("KAPPA_RUN_SLOW"):
        return
    skip_slow = pytest.mark.skip(reason="set KAPPA_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def host_factory():
    """Build a host graph from explicit block pairs, one list per pattern edge."""
    def make(weighting, n, pairs_by_edge, seed=0):
        sizes = block_sizes(weighting, n)
        blocks = []
        for index, (u, v) in enumerate(weighting.graph.edges):
            pairs = np.array(pairs_by_edge[index], dtype=np.int64).reshape(-1, 2)
            blocks.append(EdgeBlock(index, u, v, sizes[u], sizes[v], pairs))
        return ColoredHostGraph(weighting, n, seed, sizes, tuple(blocks))
    return make


@pytest.fixture
def path_host(host_factory):
    """
    P_3 under Δ_o at n = 3. Middle index 0 has left partners {0, 1} and right
    partners {0, 1}; middle index 1 has left {2} and right {1}; middle 2 has none.
    """
    weighting = uniform_walk(path_graph(3))
    left = [(0, 0), (1, 0), (2, 1)]
    right = [(0, 0), (0, 1), (1, 1)]
    return host_factory(weighting, 3, [left, right])
