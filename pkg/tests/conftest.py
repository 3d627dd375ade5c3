import numpy as np
import pytest

from cospread.networks import MultiplexNetwork, _layer_from_edges


def layer_from_edges(n, edges):
    """Build a Layer from explicit undirected edges (test helper)."""
    if edges:
        u = np.array([e[0] for e in edges], dtype=np.int32)
        v = np.array([e[1] for e in edges], dtype=np.int32)
        degs = np.bincount(np.concatenate([u, v]), minlength=n)
    else:
        u = np.empty(0, dtype=np.int32)
        v = np.empty(0, dtype=np.int32)
        degs = np.zeros(n, dtype=np.int64)
    return _layer_from_edges(n, u, v, degs)


def multiplex_from_edges(n, info_edges, phy_edges):
    return MultiplexNetwork(n, layer_from_edges(n, info_edges),
                            layer_from_edges(n, phy_edges))


@pytest.fixture
def three_node_paths():
    """Info layer path 1-0-2, phy layer path 0-1-2 (distinct paths)."""
    return multiplex_from_edges(3, [(0, 1), (0, 2)], [(0, 1), (1, 2)])
