"""
Underlying directed multigraph of a network.

Nodes are 1-based indices. Each edge keeps its branch name as ``id`` and its
orientation: the incidence matrix has +1 at the head and -1 at the tail.
Connectivity queries go through networkx; spanning-tree enumeration is a
deletion-contraction recursion that forces bridges.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .config import TREE_EDGE_LIMIT
from .errors import (
    DuplicateNameError,
    EqualIndicesError,
    PreconditionViolatedError,
    TooLargeError,
    UnknownEdgeError,
    UnknownNodeError,
)
from .linalg import shift_index
from .models import Netlist

logger = logging.getLogger(__name__)

Tree = Tuple[Hashable, ...]
TreePair = Tuple[Tree, Tree]


@dataclass(frozen=True)
class Edge:
    id: Hashable
    head: int
    tail: int


@dataclass(frozen=True)
class BranchGraph:
    """Oriented multigraph on nodes 1..n; parallel edges allowed, self-loops rejected"""

    n: int
    edges: Tuple[Edge, ...] = ()
    labels: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise DuplicateNameError(f"duplicate edge id '{e.id}'")
            seen.add(e.id)
            for node in (e.head, e.tail):
                if not 1 <= node <= self.n:
                    raise UnknownNodeError(f"edge '{e.id}' references node {node} outside [1, {self.n}]")
            if e.head == e.tail:
                raise PreconditionViolatedError(f"edge '{e.id}' is a self-loop on node {e.head}")

    @classmethod
    def from_netlist(cls, nl: Netlist) -> "BranchGraph":
        edges = tuple(Edge(b.name, nl.index_of(b.head), nl.index_of(b.tail)) for b in nl.branches)
        return cls(n=nl.n, edges=edges, labels=nl.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge(self, edge_id: Hashable) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise UnknownEdgeError(f"unknown edge '{edge_id}'")

    def position(self, edge_id: Hashable) -> int:
        for pos, e in enumerate(self.edges):
            if e.id == edge_id:
                return pos
        raise UnknownEdgeError(f"unknown edge '{edge_id}'")

    def to_networkx(self, ignore: Optional[Iterable[Hashable]] = None) -> nx.MultiGraph:
        skip = set(ignore or ())
        G = nx.MultiGraph()
        G.add_nodes_from(range(1, self.n + 1))
        for e in self.edges:
            if e.id not in skip:
                G.add_edge(e.head, e.tail, key=e.id)
        return G


# ----------------------------
# Public API
# ----------------------------

def incidence(g: BranchGraph) -> np.ndarray:
    """n x m matrix: +1 where the edge is directed into the node (head), -1 at the tail"""
    G = np.zeros((g.n, g.m), dtype=int)
    for col, e in enumerate(g.edges):
        G[e.head - 1, col] = 1
        G[e.tail - 1, col] = -1
    return G


def is_connected(g: BranchGraph, ignore: Optional[Iterable[Hashable]] = None) -> bool:
    if g.n <= 1:
        return True
    return nx.is_connected(g.to_networkx(ignore))


def components(g: BranchGraph, ignore: Optional[Iterable[Hashable]] = None) -> List[List[int]]:
    """Connected components as sorted node lists, ordered by smallest node"""
    comps = [sorted(c) for c in nx.connected_components(g.to_networkx(ignore))]
    return sorted(comps, key=lambda c: c[0])


def bridges(g: BranchGraph) -> List[Hashable]:
    """Ids of edges whose removal disconnects their component"""
    G = g.to_networkx()
    found = []
    for u, v in nx.bridges(G):
        found.extend(G[u][v].keys())
    order = {e.id: pos for pos, e in enumerate(g.edges)}
    return sorted(found, key=order.__getitem__)


def tree_weight(tree: Iterable[Hashable], weights: Dict[Hashable, Any]) -> Any:
    """Product of the weights of the edges in ``tree`` (1 for the empty tree)"""
    product: Any = 1
    for edge_id in tree:
        product = product * weights[edge_id]
    return product


def spanning_trees(g: BranchGraph) -> List[Tree]:
    """
    All spanning trees, each as a tuple of edge ids in edge order, sorted
    lexicographically by edge position. A disconnected graph has none.
    """
    if g.n < 1:
        raise PreconditionViolatedError("spanning trees need at least one node")
    _guard(g)
    edges = [(pos, e.head, e.tail) for pos, e in enumerate(g.edges)]
    found: List[Tuple[int, ...]] = []
    _enumerate(edges, _Forest(g.n), g.n, [], found)
    found.sort()
    logger.debug(f"Enumerated {len(found)} spanning trees on {g.n} nodes, {g.m} edges")
    return [tuple(g.edges[pos].id for pos in tree) for tree in found]


def tree_pairs(g: BranchGraph, j: int, k: int) -> List[TreePair]:
    """
    Disjoint tree pairs (T_j, T_k) with j in T_j and k in T_k that together
    span every node. They correspond one-to-one with the spanning trees of
    the graph with j and k identified.
    """
    if j == k:
        raise EqualIndicesError(f"tree pairs need distinct nodes, got {j} twice")
    for node in (j, k):
        if not 1 <= node <= g.n:
            raise UnknownNodeError(f"node {node} outside [1, {g.n}]")
    _guard(g)
    merged = contract_nodes(g, j, k)
    pairs: List[TreePair] = []
    for tree in spanning_trees(merged):
        forest = _Forest(g.n)
        for edge_id in tree:
            e = g.edge(edge_id)
            forest.union(e.head, e.tail)
        root_j = forest.find(j)
        side_j = tuple(i for i in tree if forest.find(g.edge(i).head) == root_j)
        side_k = tuple(i for i in tree if forest.find(g.edge(i).head) != root_j)
        pairs.append((side_j, side_k))
    return pairs


def delete_edge(g: BranchGraph, edge_id: Hashable) -> BranchGraph:
    g.edge(edge_id)
    return BranchGraph(n=g.n, edges=tuple(e for e in g.edges if e.id != edge_id), labels=g.labels)


def contract_nodes(g: BranchGraph, j: int, k: int) -> BranchGraph:
    """
    Identify nodes j and k. Edges between them vanish; node k disappears and
    every node p != k is renumbered p' = sigma(k, p) - k, with k mapped to j's
    new index.
    """
    if j == k:
        raise EqualIndicesError(f"contraction needs distinct nodes, got {j} twice")
    for node in (j, k):
        if not 1 <= node <= g.n:
            raise UnknownNodeError(f"node {node} outside [1, {g.n}]")
    target = shift_index(k, j)

    def renumber(p: int) -> int:
        return target if p == k else shift_index(k, p)

    edges = tuple(
        Edge(e.id, renumber(e.head), renumber(e.tail))
        for e in g.edges
        if {e.head, e.tail} != {j, k}
    )
    labels = tuple(name for idx, name in enumerate(g.labels, start=1) if idx != k)
    return BranchGraph(n=g.n - 1, edges=edges, labels=labels)


# ----------------------------
# Internal helpers
# ----------------------------

def _guard(g: BranchGraph) -> None:
    if g.m > TREE_EDGE_LIMIT:
        raise TooLargeError(f"tree enumeration limited to {TREE_EDGE_LIMIT} edges, got {g.m}")


class _Forest:
    """Disjoint sets on 0..n with union by rank and path halving"""

    __slots__ = ("parent", "rank")

    def __init__(self, n: int, parent: Optional[List[int]] = None, rank: Optional[List[int]] = None):
        self.parent = parent if parent is not None else list(range(n + 1))
        self.rank = rank if rank is not None else [0] * (n + 1)

    def copy(self) -> "_Forest":
        return _Forest(0, list(self.parent), list(self.rank))

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of a and b; False when they already coincide"""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def _spans(edges: Sequence[Tuple[int, int, int]], forest: _Forest, blocks: int) -> bool:
    """
    Pruning bound for the enumeration: whether the partial forest's ``blocks``
    components could still be joined into one by the remaining edges. False
    lets the caller cut the branch; True only means the branch is kept.
    """
    trial = forest.copy()
    for _, u, v in edges:
        if trial.union(u, v):
            blocks -= 1
            if blocks == 1:
                return True
    return blocks == 1


def _enumerate(
    edges: List[Tuple[int, int, int]],
    forest: _Forest,
    blocks: int,
    chosen: List[int],
    out: List[Tuple[int, ...]],
) -> None:
    # blocks: number of components of the partial forest ``chosen``
    if blocks == 1:
        out.append(tuple(chosen))
        return
    if not _spans(edges, forest, blocks):
        return
    (pos, u, v), rest = edges[0], edges[1:]
    if forest.find(u) == forest.find(v):
        _enumerate(rest, forest, blocks, chosen, out)
        return
    contracted = forest.copy()
    contracted.union(u, v)
    _enumerate(rest, contracted, blocks - 1, chosen + [pos], out)
    _enumerate(rest, forest, blocks, chosen, out)
