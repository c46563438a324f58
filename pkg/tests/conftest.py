import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from graphgen import FIXTURE_EDGES, FIXTURE_PRIVATE

from privwalk import build_graph


@pytest.fixture(scope="session")
def fixture_graph():
    """10-node graph with private nodes 0, 1; star-shaped largest cluster."""
    return build_graph(FIXTURE_EDGES, FIXTURE_PRIVATE)
