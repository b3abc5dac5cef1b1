"""
Kirchhoff characteristic kappa(N): the sum over spanning trees of the
product of branch admittances, equal to any first cofactor of Y.

Every quantity is available by tree enumeration and by cofactors; the two
routes are compared in the checks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Hashable, Optional, Tuple

import numpy as np

from .admittance import build
from .config import RESISTANCE_TREE_NODES, TREE_EDGE_LIMIT
from .errors import (
    DisconnectedError,
    EqualIndicesError,
    IndexConflictError,
    InconsistentSolutionError,
    PreconditionViolatedError,
)
from .graph import BranchGraph, contract_nodes, delete_edge, is_connected, spanning_trees, tree_pairs, tree_weight
from .linalg import cofactor1, cofactor2, rank, shift_index, zeros
from .models import Branch, Netlist
from .netlist import branch_admittances
from .scalar import DEFAULT_TOLERANCE, ScalarMode, Tolerance, close, to_scalar
from .solve import driving_point_impedance

logger = logging.getLogger(__name__)


class KappaMethod(str, Enum):
    TREES = "trees"
    COFACTOR = "cofactor"


@dataclass(frozen=True)
class KirchhoffValue:
    value: Any
    method: KappaMethod


@dataclass(frozen=True)
class KCon2Report:
    residual: Any
    lhs: Any
    cofactor_squared: Any
    kdelc2_residual: Optional[Any] = None


# ----------------------------
# Weighted graph helpers
# ----------------------------

def _weighted(nl: Netlist, mode: ScalarMode) -> Tuple[BranchGraph, Dict[Hashable, Any]]:
    return BranchGraph.from_netlist(nl), branch_admittances(nl, mode)


def _one(mode: ScalarMode) -> Any:
    return to_scalar(1, mode)


def _laplacian(g: BranchGraph, weights: Dict[Hashable, Any], mode: ScalarMode) -> np.ndarray:
    L = zeros(g.n, g.n, mode)
    for e in g.edges:
        a, b, y = e.head - 1, e.tail - 1, weights[e.id]
        L[a, a] = L[a, a] + y
        L[b, b] = L[b, b] + y
        L[a, b] = L[a, b] - y
        L[b, a] = L[b, a] - y
    return L


def _kappa_graph(g: BranchGraph, weights: Dict[Hashable, Any], mode: ScalarMode, method: KappaMethod) -> Any:
    if g.n <= 1:
        return _one(mode)
    if method == KappaMethod.TREES:
        total = to_scalar(0, mode)
        for tree in spanning_trees(g):
            total = total + tree_weight(tree, weights)
        return total
    return cofactor1(_laplacian(g, weights, mode), 1, 1)


def _default_method(g: BranchGraph) -> KappaMethod:
    if g.n <= RESISTANCE_TREE_NODES and g.m <= TREE_EDGE_LIMIT:
        return KappaMethod.TREES
    return KappaMethod.COFACTOR


def _pair(nl: Netlist, j: Any, k: Any) -> Tuple[int, int]:
    jj, kk = nl.resolve_node(j), nl.resolve_node(k)
    if jj == kk:
        raise EqualIndicesError(f"node pair needs distinct nodes, got {jj} twice")
    return jj, kk


# ----------------------------
# Public API
# ----------------------------

def kappa_trees(nl: Netlist, mode: ScalarMode = ScalarMode.FLOAT64) -> KirchhoffValue:
    """Sum over spanning trees of the product of admittances; 0 if disconnected"""
    g, weights = _weighted(nl, mode)
    return KirchhoffValue(_kappa_graph(g, weights, mode, KappaMethod.TREES), KappaMethod.TREES)


def kappa_cofactor(Y: np.ndarray) -> KirchhoffValue:
    return KirchhoffValue(cofactor1(Y, 1, 1), KappaMethod.COFACTOR)


def kappa(nl: Netlist, mode: ScalarMode = ScalarMode.FLOAT64, method: Optional[KappaMethod] = None) -> Any:
    g, weights = _weighted(nl, mode)
    return _kappa_graph(g, weights, mode, method or _default_method(g))


def count_trees(g: BranchGraph) -> int:
    """Matrix-tree theorem: c(Laplacian) with unit weights, computed exactly"""
    if g.n <= 1:
        return 1
    unit = {e.id: to_scalar(1, ScalarMode.EXACT) for e in g.edges}
    return int(cofactor1(_laplacian(g, unit, ScalarMode.EXACT), 1, 1).re)


def kappa_contracted(
    nl: Netlist, j: Any, k: Any, mode: ScalarMode = ScalarMode.FLOAT64, method: Optional[KappaMethod] = None
) -> Any:
    """kappa(N^[jk]) by disjoint tree pairs, or as C_{jk,jk}(Y)"""
    jj, kk = _pair(nl, j, k)
    g, weights = _weighted(nl, mode)
    method = method or _default_method(g)
    if method == KappaMethod.TREES:
        total = to_scalar(0, mode)
        for side_j, side_k in tree_pairs(g, jj, kk):
            total = total + tree_weight(side_j, weights) * tree_weight(side_k, weights)
        return total
    return cofactor2(build(nl, mode).Y, jj, kk, jj, kk)


def resistance_distance(
    nl: Netlist,
    j: Any,
    k: Any,
    mode: ScalarMode = ScalarMode.FLOAT64,
    method: Optional[KappaMethod] = None,
    verify: bool = False,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Any:
    """Z_jk = kappa(N^[jk]) / kappa(N)"""
    jj, kk = _pair(nl, j, k)
    g, weights = _weighted(nl, mode)
    if not is_connected(g):
        raise DisconnectedError("resistance distance needs a connected network")
    method = method or _default_method(g)
    value = kappa_contracted(nl, jj, kk, mode, method) / _kappa_graph(g, weights, mode, method)
    if verify:
        reference = driving_point_impedance(build(nl, mode), jj, kk, tol)
        if not close(value, reference, tol):
            raise InconsistentSolutionError(
                f"kappa ratio {value} disagrees with cofactor impedance {reference}"
            )
    return value


def _passive(nl: Netlist) -> Netlist:
    return Netlist(nodes=nl.nodes, branches=nl.branches, omega=nl.omega, sigma=nl.sigma)


def _delete_contract(nl: Netlist, name: str, mode: ScalarMode, method: KappaMethod) -> Tuple[Any, Any, Any]:
    """(kappa(N - alpha), kappa(N o alpha), y_alpha)"""
    g, weights = _weighted(_passive(nl), mode)
    e = g.edge(name)
    deleted = _kappa_graph(delete_edge(g, name), weights, mode, method)
    contracted = _kappa_graph(contract_nodes(g, e.head, e.tail), weights, mode, method)
    return deleted, contracted, weights[name]


def check_deletion_contraction(
    nl: Netlist, branch: str, mode: ScalarMode = ScalarMode.FLOAT64, method: Optional[KappaMethod] = None
) -> Any:
    """kappa(N) - kappa(N - alpha) - y_alpha kappa(N o alpha)"""
    nl.branch(branch)
    g, weights = _weighted(nl, mode)
    method = method or _default_method(g)
    deleted, contracted, y = _delete_contract(nl, branch, mode, method)
    return _kappa_graph(g, weights, mode, method) - deleted - y * contracted


def kappa_derivative(
    nl: Netlist, branch: str, mode: ScalarMode = ScalarMode.FLOAT64, method: Optional[KappaMethod] = None
) -> Any:
    """d kappa / d y_alpha = kappa(N o alpha)"""
    nl.branch(branch)
    g, weights = _weighted(nl, mode)
    e = g.edge(branch)
    return _kappa_graph(contract_nodes(g, e.head, e.tail), weights, mode, method or _default_method(g))


def _with_admittance(nl: Netlist, branch: str, y: Any) -> Netlist:
    branches = tuple(
        Branch(name=b.name, head=b.head, tail=b.tail, y=y) if b.name == branch else b
        for b in nl.branches
    )
    return Netlist(nodes=nl.nodes, branches=branches, omega=nl.omega, sigma=nl.sigma)


def kappa_coefficient(nl: Netlist, branch: str, method: Optional[KappaMethod] = None) -> Any:
    """Exact coefficient of y_alpha in the multilinear form: kappa|_{y=1} - kappa|_{y=0}"""
    nl.branch(branch)
    passive = _passive(nl)
    at_one = kappa(_with_admittance(passive, branch, 1), ScalarMode.EXACT, method)
    at_zero = kappa(_with_admittance(passive, branch, 0), ScalarMode.EXACT, method)
    return at_one - at_zero


def kappa_finite_difference(nl: Netlist, branch: str, h: float = 1e-6) -> complex:
    """Central difference of kappa in y_alpha under float scalars"""
    y = complex(nl.branch(branch).y)
    passive = _passive(nl)
    up = kappa(_with_admittance(passive, branch, y + h), ScalarMode.FLOAT64, KappaMethod.COFACTOR)
    down = kappa(_with_admittance(passive, branch, y - h), ScalarMode.FLOAT64, KappaMethod.COFACTOR)
    return (up - down) / (2 * h)


def kappa_augmented_identity(
    nl: Netlist, j: Any, k: Any, y_plus: Any, mode: ScalarMode = ScalarMode.FLOAT64,
    method: Optional[KappaMethod] = None,
) -> Any:
    """kappa(N-bar) - kappa(N) - y+ kappa(N^[jk]) with N-bar = N plus a j-k branch y+"""
    jj, kk = _pair(nl, j, k)
    passive = _passive(nl)
    name = "__augment__"
    while any(b.name == name for b in passive.branches):
        name += "_"
    augmented = Netlist(
        nodes=passive.nodes,
        branches=passive.branches + (Branch(name=name, head=nl.name_of(jj), tail=nl.name_of(kk), y=y_plus),),
    )
    y = to_scalar(y_plus, mode)
    return (
        kappa(augmented, mode, method)
        - kappa(passive, mode, method)
        - y * kappa_contracted(passive, jj, kk, mode, method)
    )


def _contract_twice(g: BranchGraph, j: int, k: int, p: int, q: int) -> BranchGraph:
    once = contract_nodes(g, j, k)
    target = shift_index(k, j)

    def moved(x: int) -> int:
        return target if x == k else shift_index(k, x)

    return contract_nodes(once, moved(p), moved(q))


def check_kcon2(
    nl: Netlist, j: Any, k: Any, p: Any, q: Any, mode: ScalarMode = ScalarMode.FLOAT64,
    method: Optional[KappaMethod] = None,
) -> KCon2Report:
    """
    kappa^[jk] kappa^[pq] - kappa kappa^[jk][pq] - C_{pq,jk}(Y)^2, plus the
    four-network deletion/contraction form when branches join both pairs.
    """
    jj, kk = _pair(nl, j, k)
    pp, qq = _pair(nl, p, q)
    if {jj, kk} == {pp, qq}:
        raise IndexConflictError("node pairs (j,k) and (p,q) must differ")
    passive = _passive(nl)
    g, weights = _weighted(passive, mode)
    method = method or _default_method(g)

    k_jk = _kappa_graph(contract_nodes(g, jj, kk), weights, mode, method)
    k_pq = _kappa_graph(contract_nodes(g, pp, qq), weights, mode, method)
    k_both = _kappa_graph(_contract_twice(g, jj, kk, pp, qq), weights, mode, method)
    k_full = _kappa_graph(g, weights, mode, method)
    lhs = k_jk * k_pq - k_full * k_both
    C = cofactor2(build(passive, mode).Y, pp, qq, jj, kk)
    report_delc2 = None
    alpha = _branch_on(passive, jj, kk)
    beta = _branch_on(passive, pp, qq)
    if alpha and beta:
        report_delc2 = check_kdelc2(passive, alpha, beta, mode, method)
    return KCon2Report(residual=lhs - C * C, lhs=lhs, cofactor_squared=C * C, kdelc2_residual=report_delc2)


def _branch_on(nl: Netlist, a: int, b: int) -> Optional[str]:
    want = {nl.name_of(a), nl.name_of(b)}
    for br in nl.branches:
        if {br.head, br.tail} == want:
            return br.name
    return None


def check_kdelc2(
    nl: Netlist, alpha: str, beta: str, mode: ScalarMode = ScalarMode.FLOAT64,
    method: Optional[KappaMethod] = None,
) -> Any:
    """
    kappa(N o alpha - beta) kappa(N o beta - alpha)
    - kappa(N - alpha beta) kappa(N o alpha beta) - C_{pq,jk}(Y)^2
    for branches alpha on (j,k) and beta on (p,q)
    """
    passive = _passive(nl)
    g, weights = _weighted(passive, mode)
    a, b = g.edge(alpha), g.edge(beta)
    j, k, p, q = a.head, a.tail, b.head, b.tail
    if {j, k} == {p, q}:
        raise IndexConflictError(f"branches '{alpha}' and '{beta}' join the same node pair")
    method = method or _default_method(g)

    both_deleted = delete_edge(delete_edge(g, alpha), beta)
    con_a_del_b = contract_nodes(delete_edge(g, beta), j, k)
    con_b_del_a = contract_nodes(delete_edge(g, alpha), p, q)
    lhs = (
        _kappa_graph(con_a_del_b, weights, mode, method) * _kappa_graph(con_b_del_a, weights, mode, method)
        - _kappa_graph(both_deleted, weights, mode, method)
        * _kappa_graph(_contract_twice(g, j, k, p, q), weights, mode, method)
    )
    C = cofactor2(build(passive, mode).Y, p, q, j, k)
    return lhs - C * C


def check_positive_kappa(nl: Netlist, tol: Tolerance = DEFAULT_TOLERANCE) -> Tuple[bool, Any, int]:
    """
    For a connected network of positive real admittances: (kappa > 0 and
    rank == n - 1, kappa, rank).
    """
    for b in nl.branches:
        y = complex(b.y)
        if y.imag != 0 or y.real <= 0:
            raise PreconditionViolatedError(f"branch '{b.name}' admittance {b.y} is not positive real")
    g = BranchGraph.from_netlist(nl)
    if not is_connected(g):
        raise DisconnectedError("positivity of kappa needs a connected network")
    Y = build(nl, ScalarMode.EXACT).Y
    value = cofactor1(Y, 1, 1)
    r = rank(Y, tol)
    ok = value.re > 0 and value.im == 0 and r == nl.n - 1
    return ok, value, r
