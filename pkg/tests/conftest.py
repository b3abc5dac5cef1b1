"""
Shared fixtures: Wheatstone bridges, sample netlists and a seeded corpus of
random exact networks.
"""

import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import List

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.models import Branch, Netlist, Source, SourceKind
from src.netlist import parse
from src.scalar import ExactComplex

NETLISTS = Path(__file__).parent.parent / "netlists"

WHEATSTONE_INDUCTIVE = """
node 1
node 2
node 3
node 4
branch alpha 1 3 y=-10j
branch beta  2 3 y=-1j
branch gamma 1 4 y=1-0.1j
branch delta 2 4 y=-1j
branch tau   3 4 y=-9.5j
"""

WHEATSTONE_RESISTIVE = """
node 1
node 2
node 3
node 4
branch alpha 1 3 y=10-0.1j
branch beta  2 3 y=1-0.1j
branch gamma 1 4 y=-1j
branch delta 2 4 y=1-0.1j
branch tau   3 4 y=9.5-0.1j
"""

TETRAHEDRON = """
node 1
node 2
node 3
node 4
branch alpha 1 3 y=1
branch beta  2 3 y=1
branch gamma 1 4 y=1
branch delta 2 4 y=1
branch sigma 1 2 y=1
branch tau   3 4 y=1
"""


def pytest_configure(config):
    """Configure pytest"""
    config.addinivalue_line(
        "markers", "integration: mark test as integration test"
    )
    config.addinivalue_line(
        "markers", "slow: mark test as slow running"
    )


@pytest.fixture
def wheatstone():
    return parse(WHEATSTONE_INDUCTIVE)


@pytest.fixture
def wheatstone_reflected():
    return parse(WHEATSTONE_RESISTIVE)


@pytest.fixture
def tetrahedron():
    return parse(TETRAHEDRON)


@pytest.fixture
def netlists_dir():
    return NETLISTS


def _value(rng: random.Random, complex_values: bool) -> ExactComplex:
    re = Fraction(rng.randint(1, 9), rng.randint(1, 4))
    im = Fraction(rng.randint(-5, 5), rng.randint(1, 3)) if complex_values else Fraction(0)
    return ExactComplex(re, im)


def random_network(
    rng: random.Random,
    n_min: int = 3,
    n_max: int = 6,
    max_edges: int = 10,
    complex_values: bool = True,
    with_source: bool = False,
) -> Netlist:
    """Connected network: a random spanning tree plus extra chords"""
    n = rng.randint(n_min, n_max)
    nodes = tuple(f"n{k}" for k in range(1, n + 1))
    edges = []
    for k in range(2, n + 1):
        edges.append((rng.randint(1, k - 1), k))
    extra = rng.randint(0, max(0, max_edges - len(edges)))
    for _ in range(extra):
        a, b = rng.sample(range(1, n + 1), 2)
        edges.append((a, b))
    branches = tuple(
        Branch(name=f"b{i}", head=nodes[a - 1], tail=nodes[b - 1], y=_value(rng, complex_values))
        for i, (a, b) in enumerate(edges, start=1)
    )
    sources = ()
    if with_source:
        a, b = rng.sample(range(1, n + 1), 2)
        sources = (Source(name="s1", kind=SourceKind.ISRC, pos=nodes[a - 1], neg=nodes[b - 1],
                          value=_value(rng, complex_values)),)
    return Netlist(nodes=nodes, branches=branches, sources=sources)


CORPUS_SIZE = 200


@pytest.fixture(scope="session")
def random_corpus() -> List[Netlist]:
    """Connected exact networks with n <= 7 nodes and m <= 12 branches"""
    rng = random.Random(20240611)
    return [random_network(rng, n_min=3, n_max=7, max_edges=12) for _ in range(CORPUS_SIZE)]


@pytest.fixture(scope="session")
def random_small_corpus() -> List[Netlist]:
    """Smaller networks for the checks that enumerate tree pairs or permutations"""
    rng = random.Random(7)
    return [random_network(rng, n_min=3, n_max=5, max_edges=7) for _ in range(CORPUS_SIZE)]
