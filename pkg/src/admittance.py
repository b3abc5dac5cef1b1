"""
Admittance matrix assembly and structural checks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Tuple, Union

import networkx as nx
import numpy as np

from .errors import NonDirectBranchError, UnknownNodeError
from .graph import BranchGraph, incidence
from .linalg import cofactor1, mode_of, rank, to_mode, zeros
from .models import ElementKind, Netlist
from .scalar import DEFAULT_TOLERANCE, ScalarMode, Tolerance, close, is_zero, to_scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdmittanceMatrix:
    """Dense n x n admittance matrix with its node-name map (index k <-> nodes[k-1])"""

    Y: np.ndarray
    nodes: Tuple[str, ...]

    @property
    def n(self) -> int:
        return self.Y.shape[0]

    @property
    def mode(self) -> ScalarMode:
        return mode_of(self.Y)

    def index_of(self, name: str) -> int:
        try:
            return self.nodes.index(name) + 1
        except ValueError:
            raise UnknownNodeError(f"unknown node '{name}'") from None

    def name_of(self, index: int) -> str:
        if not 1 <= index <= self.n:
            raise UnknownNodeError(f"node index {index} outside [1, {self.n}]")
        return self.nodes[index - 1]

    def to_mode(self, mode: ScalarMode) -> "AdmittanceMatrix":
        return AdmittanceMatrix(to_mode(self.Y, mode), self.nodes)

    def with_matrix(self, Y: np.ndarray) -> "AdmittanceMatrix":
        return AdmittanceMatrix(Y, self.nodes)


@dataclass(frozen=True)
class StructureReport:
    symmetric: bool
    zero_row_sums: bool
    zero_col_sums: bool
    diag_dominant: bool
    rank: int
    connected_components: int
    first_cofactors_equal: bool

    def as_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


# ----------------------------
# Builders
# ----------------------------

def _direct_admittances(nl: Netlist, mode: ScalarMode):
    for b in nl.branches:
        if b.kind != ElementKind.DIRECT:
            raise NonDirectBranchError(
                f"branch '{b.name}' has (g,c,r,l) form; evaluate elements first"
            )
        yield nl.index_of(b.head) - 1, nl.index_of(b.tail) - 1, to_scalar(b.y, mode)


def build(nl: Netlist, mode: ScalarMode = ScalarMode.FLOAT64) -> AdmittanceMatrix:
    """Stamp every branch: +y on both diagonals, -y on the two off-diagonals"""
    Y = zeros(nl.n, nl.n, mode)
    for a, b, y in _direct_admittances(nl, mode):
        Y[a, a] = Y[a, a] + y
        Y[b, b] = Y[b, b] + y
        Y[a, b] = Y[a, b] - y
        Y[b, a] = Y[b, a] - y
    logger.debug(f"Built {nl.n}x{nl.n} admittance matrix ({mode.value}) from {len(nl.branches)} branches")
    return AdmittanceMatrix(Y, nl.nodes)


def build_via_incidence(nl: Netlist, mode: ScalarMode = ScalarMode.FLOAT64) -> AdmittanceMatrix:
    """Y = G diag(y) G^T"""
    weights = [y for _, _, y in _direct_admittances(nl, mode)]
    if not weights:
        return AdmittanceMatrix(zeros(nl.n, nl.n, mode), nl.nodes)
    G = incidence(BranchGraph.from_netlist(nl))
    if mode == ScalarMode.EXACT:
        Gx = G.astype(object)
        Upsilon = zeros(len(weights), len(weights), mode)
        for k, y in enumerate(weights):
            Upsilon[k, k] = y
        Y = Gx.dot(Upsilon).dot(Gx.T)
        for idx, x in np.ndenumerate(Y):
            Y[idx] = to_scalar(x, mode)
    else:
        Y = (G * np.asarray(weights, dtype=complex)) @ G.T
    return AdmittanceMatrix(Y, nl.nodes)


# ----------------------------
# Structural checks
# ----------------------------

def check_structure(
    Y: Union[AdmittanceMatrix, np.ndarray], tol: Tolerance = DEFAULT_TOLERANCE
) -> StructureReport:
    M = Y.Y if isinstance(Y, AdmittanceMatrix) else Y
    n = M.shape[0]
    symmetric = all(close(M[a, b], M[b, a], tol) for a in range(n) for b in range(a + 1, n))
    zero_rows = all(_sum_is_zero(M[a, :], tol) for a in range(n))
    zero_cols = all(_sum_is_zero(M[:, b], tol) for b in range(n))
    dominant = all(
        abs(complex(M[a, a])) + tol.abs_tol >= abs(complex(M[a, b]))
        for a in range(n)
        for b in range(n)
    )
    adjacency = nx.Graph()
    adjacency.add_nodes_from(range(n))
    adjacency.add_edges_from(
        (a, b) for a in range(n) for b in range(n) if a != b and not is_zero(M[a, b], tol)
    )
    report = StructureReport(
        symmetric=symmetric,
        zero_row_sums=zero_rows,
        zero_col_sums=zero_cols,
        diag_dominant=dominant,
        rank=rank(M, tol),
        connected_components=nx.number_connected_components(adjacency) if n else 0,
        first_cofactors_equal=_first_cofactors_equal(M, tol),
    )
    logger.debug(f"Structure check: {report}")
    return report


def _sum_is_zero(values: np.ndarray, tol: Tolerance) -> bool:
    if not values.size:
        return True
    total = values[0]
    for x in values[1:]:
        total = total + x
    if values.dtype == object:
        return total == 0
    scale = max((abs(complex(x)) for x in values), default=0.0)
    return abs(complex(total)) <= max(tol.rel_tol * scale, tol.abs_tol)


def _first_cofactors_equal(M: np.ndarray, tol: Tolerance) -> bool:
    n = M.shape[0]
    if n < 2:
        return True
    reference = cofactor1(M, 1, 1)
    return all(close(cofactor1(M, j, k), reference, tol) for j in range(1, n + 1) for k in range(1, n + 1))
