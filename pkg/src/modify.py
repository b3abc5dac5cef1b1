"""
Elementary network modifications and their cofactor-update formulas.

* expansion: new node nu = n + 1 joined to node k by admittance y+
* contraction: nodes j < k identified, node k removed
* augmentation: admittance y+ added between existing nodes j and k

Every formula takes the original matrix and answers from its cofactors; the
modified matrices are built separately so the two can be compared.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Tuple

import numpy as np

from .errors import (
    EqualIndicesError,
    IndexConflictError,
    IndexOutOfRangeError,
    PreconditionViolatedError,
    SingularNetworkError,
    UnknownCaseError,
)
from .linalg import CofactorIndex, cofactor2, cofactor3, mode_of, shift_index, zeros
from .scalar import DEFAULT_TOLERANCE, Tolerance, is_zero
from .solve import common_cofactor, driving_point_impedance, transfer_impedance

logger = logging.getLogger(__name__)


class ModKind(str, Enum):
    EXPAND = "expand"
    CONTRACT = "contract"
    AUGMENT = "augment"


@dataclass(frozen=True)
class ModRecord:
    """
    One applied modification. ``index_map[p-1]`` is the index of node p after
    the modification; an expansion adds node ``n_before + 1``.
    """

    kind: ModKind
    n_before: int
    k: int
    j: Optional[int] = None
    y_plus: Any = None
    index_map: Tuple[int, ...] = ()

    @property
    def n_after(self) -> int:
        if self.kind == ModKind.EXPAND:
            return self.n_before + 1
        if self.kind == ModKind.CONTRACT:
            return self.n_before - 1
        return self.n_before

    @property
    def nu(self) -> int:
        """Index of the node created by an expansion"""
        if self.kind != ModKind.EXPAND:
            raise UnknownCaseError(f"{self.kind.value} records create no node")
        return self.n_before + 1


def map_index(record: ModRecord, p: int) -> int:
    """Index of original node p in the modified network"""
    if not 1 <= p <= record.n_before:
        raise IndexOutOfRangeError(f"node {p} outside [1, {record.n_before}]")
    return record.index_map[p - 1]


def _check(n: int, *indices: int) -> None:
    for idx in indices:
        if not 1 <= idx <= n:
            raise IndexOutOfRangeError(f"index {idx} outside [1, {n}]")


# ----------------------------
# Expansion
# ----------------------------

def expand(Y: np.ndarray, k: int, y_plus: Any) -> Tuple[np.ndarray, ModRecord]:
    n = Y.shape[0]
    _check(n, k)
    mode = mode_of(Y)
    Yp = zeros(n + 1, n + 1, mode)
    Yp[:n, :n] = Y
    Yp[k - 1, k - 1] = Y[k - 1, k - 1] + y_plus
    Yp[n, n] = Yp[n, n] + y_plus
    Yp[n, k - 1] = Yp[n, k - 1] - y_plus
    Yp[k - 1, n] = Yp[k - 1, n] - y_plus
    record = ModRecord(
        kind=ModKind.EXPAND, n_before=n, k=k, y_plus=y_plus, index_map=tuple(range(1, n + 1))
    )
    return Yp, record


def expand_cofactor1(Y: np.ndarray, record: ModRecord) -> Any:
    """c(Y+) = y+ c(Y)"""
    return record.y_plus * common_cofactor(Y)


def expand_cofactors(Y: np.ndarray, record: ModRecord, query: CofactorIndex) -> Any:
    """Second cofactor C_{ab,cd}(Y+) from cofactors of Y"""
    if record.kind != ModKind.EXPAND:
        raise UnknownCaseError(f"expected an expansion record, got {record.kind.value}")
    if len(query) != 2:
        raise UnknownCaseError(f"expansion formulas cover second cofactors, got order {len(query)}")
    n, k, y, nu = record.n_before, record.k, record.y_plus, record.nu
    (a, b), (c, d) = query.rows, query.cols
    _check(nu, a, b, c, d)
    zero = common_cofactor(Y) * 0
    if a == b or c == d:
        return zero

    # put nu in the second slot of each pair, tracking the sign
    sign = 1
    if a == nu:
        a, b, sign = b, a, -sign
    if c == nu:
        c, d, sign = d, c, -sign
    row_nu, col_nu = b == nu, d == nu

    if not row_nu and not col_nu:
        value = y * cofactor2(Y, a, b, c, d)
    elif row_nu and col_nu:
        # C_{a nu, c nu}(Y+) = c(Y) + y+ C_{ak,ck}(Y)
        value = common_cofactor(Y) + y * cofactor2(Y, a, k, c, k)
    elif row_nu:
        value = y * cofactor2(Y, a, k, c, d)
    else:
        value = y * cofactor2(Y, a, b, c, k)
    return value if sign > 0 else -value


# ----------------------------
# Contraction
# ----------------------------

def contract(Y: np.ndarray, j: int, k: int) -> Tuple[np.ndarray, ModRecord]:
    """Add row k to row j, then column k to column j, then delete row and column k"""
    n = Y.shape[0]
    _check(n, j, k)
    if j == k:
        raise EqualIndicesError(f"contraction needs distinct nodes, got {j} twice")
    if j > k:
        raise PreconditionViolatedError(f"contraction expects j < k, got j={j}, k={k}")
    B = Y.copy()
    B[j - 1, :] = B[j - 1, :] + B[k - 1, :]
    B[:, j - 1] = B[:, j - 1] + B[:, k - 1]
    Ym = np.delete(np.delete(B, k - 1, axis=0), k - 1, axis=1)
    index_map = tuple(j if p == k else shift_index(k, p) for p in range(1, n + 1))
    record = ModRecord(kind=ModKind.CONTRACT, n_before=n, k=k, j=j, index_map=index_map)
    logger.debug(f"Contracted nodes {j},{k}: {n} -> {n - 1} nodes")
    return Ym, record


def contract_cofactor1(Y: np.ndarray, j: int, k: int) -> Any:
    """c(Y-) = C_{jk,jk}(Y)"""
    return cofactor2(Y, j, k, j, k)


def contract_cofactor2(Y: np.ndarray, j: int, k: int, p: int, q: int, r: int, s: int) -> Any:
    """C_{p'q',r's'}(Y-) = [C_{pq,rs} C_{jk,jk} - C_{pq,jk} C_{rs,jk}] / c(Y), indices other than k"""
    n = Y.shape[0]
    _check(n, j, k, p, q, r, s)
    if k in (p, q, r, s):
        raise IndexConflictError(f"node {k} no longer exists after contraction")
    c = common_cofactor(Y)
    if is_zero(c):
        raise SingularNetworkError("contraction cofactor formula needs c(Y) != 0")
    return (
        cofactor2(Y, p, q, r, s) * cofactor2(Y, j, k, j, k)
        - cofactor2(Y, p, q, j, k) * cofactor2(Y, r, s, j, k)
    ) / c


def contract_cofactor3(Y: np.ndarray, j: int, k: int, p: int, q: int) -> Any:
    """C_{jp',jq'}(Y-) = C_{kjp,kjq}(Y) for p, q other than j, k (j < k)"""
    if j >= k:
        raise PreconditionViolatedError(f"expects j < k, got j={j}, k={k}")
    if {p, q} & {j, k}:
        raise IndexConflictError("p and q must differ from j and k")
    return cofactor3(Y, (k, j, p), (k, j, q))


def contract_impedance(
    Y: np.ndarray, j: int, k: int, p: int, q: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> Any:
    """Z_{p'q'}(Y-) = Z_pq - tz(pq;jk)^2 / Z_jk"""
    tz = transfer_impedance(Y, p, q, j, k, tol)
    return driving_point_impedance(Y, p, q, tol) - tz * tz / driving_point_impedance(Y, j, k, tol)


# ----------------------------
# Augmentation
# ----------------------------

def augment(Y: np.ndarray, j: int, k: int, y_plus: Any) -> Tuple[np.ndarray, ModRecord]:
    """Add y+ to diagonals j, k and subtract it from the (j,k), (k,j) entries"""
    n = Y.shape[0]
    _check(n, j, k)
    if j == k:
        raise EqualIndicesError(f"augmentation needs distinct nodes, got {j} twice")
    Yb = Y.copy()
    Yb[j - 1, j - 1] = Yb[j - 1, j - 1] + y_plus
    Yb[k - 1, k - 1] = Yb[k - 1, k - 1] + y_plus
    Yb[j - 1, k - 1] = Yb[j - 1, k - 1] - y_plus
    Yb[k - 1, j - 1] = Yb[k - 1, j - 1] - y_plus
    record = ModRecord(
        kind=ModKind.AUGMENT, n_before=n, k=k, j=j, y_plus=y_plus, index_map=tuple(range(1, n + 1))
    )
    return Yb, record


def augment_via_expand_contract(Y: np.ndarray, j: int, k: int, y_plus: Any) -> np.ndarray:
    """Expand from k by y+, then contract j with the new node"""
    Yp, record = expand(Y, k, y_plus)
    Yb, _ = contract(Yp, j, record.nu)
    return Yb


def augment_cofactor1(Y: np.ndarray, j: int, k: int, y_plus: Any) -> Any:
    """c(Y-bar) = c(Y) + y+ C_{jk,jk}(Y)"""
    return common_cofactor(Y) + y_plus * cofactor2(Y, j, k, j, k)


def augment_cofactor2(Y: np.ndarray, j: int, k: int, y_plus: Any, p: int, q: int, r: int, s: int) -> Any:
    """C_{pq,rs}(Y-bar) = C_{pq,rs}(Y) + (y+/c) [C_{pq,rs} C_{jk,jk} - C_{pq,jk} C_{rs,jk}]"""
    n = Y.shape[0]
    _check(n, j, k, p, q, r, s)
    c = common_cofactor(Y)
    if is_zero(c):
        raise SingularNetworkError("augmentation cofactor formula needs c(Y) != 0")
    base = cofactor2(Y, p, q, r, s)
    correction = base * cofactor2(Y, j, k, j, k) - cofactor2(Y, p, q, j, k) * cofactor2(Y, r, s, j, k)
    return base + y_plus * correction / c
