import sys
from pathlib import Path

import pytest

from coview.graph import Graph
from coview.ingest import InteractionSet

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(Path(__file__).resolve().parent))

# the 3-user / 4-item worked example used throughout the docs
TOY_PAIRS = frozenset([
    ("u1", "A"), ("u1", "B"),
    ("u2", "B"), ("u2", "C"),
    ("u3", "A"), ("u3", "B"), ("u3", "C"), ("u3", "D"),
])


@pytest.fixture
def toy_interactions():
    return InteractionSet(TOY_PAIRS)


@pytest.fixture
def two_cliques():
    """Two 4-cliques joined by a single bridge edge."""
    g = Graph()
    for block in ((0, 1, 2, 3), (4, 5, 6, 7)):
        for i, a in enumerate(block):
            for b in block[i + 1:]:
                g.add_edge(a, b)
    g.add_edge(3, 4)
    return g


@pytest.fixture
def triangle_bridge():
    """Two triangles joined by one bridge edge (m = 7)."""
    return Graph(edges=[(0, 1, 1), (1, 2, 1), (0, 2, 1),
                        (3, 4, 1), (4, 5, 1), (3, 5, 1), (2, 3, 1)])


@pytest.fixture(scope="session")
def synthetic_dir():
    return REPO / "data" / "synthetic"


@pytest.fixture(scope="session")
def fixtures_dir():
    return Path(__file__).resolve().parent / "fixtures"
