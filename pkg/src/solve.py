"""
Grounded node-voltage solutions, transfer and driving-point impedances,
and the identity checks that tie them together.

Impedances come from cofactors when the matrix holds exact scalars and from
the transfer matrix T = Y_(g,g)^-1 otherwise. With a unit current injected
at p and withdrawn at q, the grounded voltage difference v_j - v_k equals
tz(pq; jk) = C_{pq,jk}(Y) / c(Y).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, List, Sequence, Tuple, Union

import numpy as np

from .admittance import AdmittanceMatrix, build
from .errors import (
    InconsistentSolutionError,
    IndexOutOfRangeError,
    PreconditionViolatedError,
    SingularNetworkError,
    UnbalancedInjectionError,
)
from .linalg import (
    cofactor1,
    cofactor2,
    det,
    inverse,
    is_exact,
    minor,
    mode_of,
    rank,
    solve_linear,
    zero_vector,
    zeros,
)
from .models import Netlist, SourceKind
from .scalar import DEFAULT_TOLERANCE, ScalarMode, Tolerance, is_zero, to_scalar

logger = logging.getLogger(__name__)

MatrixLike = Union[AdmittanceMatrix, np.ndarray]


@dataclass(frozen=True, eq=False)
class GroundedSolution:
    """Node voltages with v[ground-1] == 0 and the residual max|Yv - i|"""

    ground: int
    v: np.ndarray
    residual: float = 0.0

    def voltage(self, node: int) -> Any:
        return self.v[node - 1]

    def shifted(self, E: Any) -> np.ndarray:
        """Solution of the same system with v_ground = E"""
        return np.array([x + E for x in self.v], dtype=self.v.dtype)


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """T = Y_(k,k)^-1; rows/columns are the nodes other than ``ground``"""

    ground: int
    T: np.ndarray

    @property
    def n(self) -> int:
        return self.T.shape[0] + 1

    def full(self) -> np.ndarray:
        """n x n copy with a zero row and column at the ground node"""
        k = self.ground - 1
        out = zeros(self.n, self.n, mode_of(self.T))
        keep = [a for a in range(self.n) if a != k]
        for r, a in enumerate(keep):
            for c, b in enumerate(keep):
                out[a, b] = self.T[r, c]
        return out

    def impedance(self, p: int, j: int) -> Any:
        F = self.full()
        return F[p - 1, p - 1] + F[j - 1, j - 1] - F[p - 1, j - 1] - F[j - 1, p - 1]


@dataclass(frozen=True)
class FosterReport:
    residual: Any
    max_node_residual: float


@dataclass(frozen=True)
class TellegenReport:
    residuals: Tuple[Any, Any, Any]
    total_power: Any
    quadratic_residual: float
    transfer_residual: float

    @property
    def complex_residual(self) -> float:
        return max(abs(complex(r)) for r in self.residuals)


# ----------------------------
# Helpers
# ----------------------------

def _matrix(Y: MatrixLike) -> np.ndarray:
    return Y.Y if isinstance(Y, AdmittanceMatrix) else Y


def _check_node(n: int, *nodes: int) -> None:
    for node in nodes:
        if not 1 <= node <= n:
            raise IndexOutOfRangeError(f"node {node} outside [1, {n}]")


def common_cofactor(Y: MatrixLike) -> Any:
    """c(Y): the common value of all first cofactors of a zero-sum matrix"""
    M = _matrix(Y)
    n = M.shape[0]
    return cofactor1(M, n, n)


def _require_full_rank(M: np.ndarray, tol: Tolerance) -> None:
    n = M.shape[0]
    if n < 2:
        raise SingularNetworkError("a network needs at least two nodes")
    reduced = minor(M, [n], [n])
    if is_exact(M):
        if det(reduced) == 0:
            raise SingularNetworkError("c(Y) = 0: network is disconnected or degenerate")
    elif rank(reduced, tol) < n - 1:
        raise SingularNetworkError("c(Y) = 0 within tolerance: network is disconnected or degenerate")


def _total(values: Sequence[Any]) -> Any:
    total = values[0]
    for x in values[1:]:
        total = total + x
    return total


def _residual(M: np.ndarray, v: np.ndarray, i: np.ndarray) -> float:
    r = M.dot(v) - i
    return max((abs(complex(x)) for x in r), default=0.0)


# ----------------------------
# Injections and grounded solves
# ----------------------------

def injection_vector(nl: Netlist, mode: ScalarMode = ScalarMode.FLOAT64) -> np.ndarray:
    """Net current injected at each node by the independent current sources"""
    i = zero_vector(nl.n, mode)
    for s in nl.sources:
        if s.kind != SourceKind.ISRC:
            continue
        value = to_scalar(s.value, mode)
        p, q = nl.index_of(s.pos) - 1, nl.index_of(s.neg) - 1
        i[p] = i[p] + value
        i[q] = i[q] - value
    return i


def solve_grounded(
    Y: MatrixLike, i: np.ndarray, ground: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> GroundedSolution:
    """Unique v with v_ground = 0 and Y v = i, by deleting row/column ``ground``"""
    M = _matrix(Y)
    n = M.shape[0]
    _check_node(n, ground)
    if len(i) != n:
        raise PreconditionViolatedError(f"injection vector has length {len(i)}, expected {n}")
    total = _total(list(i))
    if is_exact(M):
        balanced = total == 0
    else:
        scale = max(abs(complex(x)) for x in i)
        balanced = abs(complex(total)) <= max(tol.rel_tol * scale, tol.abs_tol)
    if not balanced:
        raise UnbalancedInjectionError(f"injections sum to {total}, not zero")
    _require_full_rank(M, tol)

    k = ground - 1
    reduced = minor(M, [ground], [ground])
    rhs = np.delete(np.asarray(i, dtype=M.dtype), k)
    v_hat = solve_linear(reduced, rhs)
    v = zero_vector(n, mode_of(M))
    for r, a in enumerate(a for a in range(n) if a != k):
        v[a] = v_hat[r]
    residual = _residual(M, v, np.asarray(i, dtype=M.dtype))
    logger.debug(f"Grounded solve at node {ground}: residual {residual:.3e}")
    return GroundedSolution(ground=ground, v=v, residual=residual)


def solve_row_replacement(Y: MatrixLike, i: np.ndarray, a: Sequence[Any], row: int) -> Tuple[np.ndarray, Any]:
    """
    Solve with row ``row`` of Y replaced by a^T and its right-hand side set to
    zero, so the solution satisfies a^T v = 0. Returns (v, det of the
    modified matrix), the determinant being (a^T 1) c(Y).
    """
    M = _matrix(Y).copy()
    n = M.shape[0]
    _check_node(n, row)
    rhs = np.array(i, dtype=M.dtype)
    for col in range(n):
        M[row - 1, col] = to_scalar(a[col], mode_of(M))
    rhs[row - 1] = rhs[row - 1] * 0
    return solve_linear(M, rhs), det(M)


# ----------------------------
# Impedances
# ----------------------------

def transfer_matrix(Y: MatrixLike, ground: int, tol: Tolerance = DEFAULT_TOLERANCE) -> TransferMatrix:
    M = _matrix(Y)
    _check_node(M.shape[0], ground)
    _require_full_rank(M, tol)
    return TransferMatrix(ground=ground, T=inverse(minor(M, [ground], [ground])))


def transfer_impedance(
    Y: MatrixLike, p: int, q: int, j: int, k: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> Any:
    """tz(pq; jk) = C_{pq,jk}(Y) / c(Y)"""
    M = _matrix(Y)
    n = M.shape[0]
    _check_node(n, p, q, j, k)
    _require_full_rank(M, tol)
    if is_exact(M):
        return cofactor2(M, p, q, j, k) / common_cofactor(M)
    return _tz_from_full(transfer_matrix(M, n, tol).full(), p, q, j, k)


def _tz_from_full(F: np.ndarray, p: int, q: int, j: int, k: int) -> Any:
    if p == q or j == k:
        return complex(0.0)
    return (
        F[j - 1, p - 1] - F[j - 1, q - 1] - F[k - 1, p - 1] + F[k - 1, q - 1]
    )


def driving_point_impedance(Y: MatrixLike, j: int, k: int, tol: Tolerance = DEFAULT_TOLERANCE) -> Any:
    """Z_jk = tz(jk; jk); Z_jj = 0"""
    return transfer_impedance(Y, j, k, j, k, tol)


def transfer_from_dp(Z_pk: Any, Z_qj: Any, Z_pj: Any, Z_qk: Any) -> Any:
    """tz(pq; jk) recovered from four driving-point impedances"""
    return (Z_pk + Z_qj - Z_pj - Z_qk) / 2


def impedance_table(Y: MatrixLike, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """All driving-point impedances Z_jk as an n x n matrix"""
    M = _matrix(Y)
    n = M.shape[0]
    _require_full_rank(M, tol)
    Z = zeros(n, n, mode_of(M))
    if is_exact(M):
        c = common_cofactor(M)
        for a in range(1, n + 1):
            for b in range(a + 1, n + 1):
                Z[a - 1, b - 1] = cofactor2(M, a, b, a, b) / c
                Z[b - 1, a - 1] = Z[a - 1, b - 1]
        return Z
    F = transfer_matrix(M, n, tol).full()
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            Z[a - 1, b - 1] = _tz_from_full(F, a, b, a, b)
            Z[b - 1, a - 1] = Z[a - 1, b - 1]
    return Z


# ----------------------------
# Identity checks
# ----------------------------

def check_jacobi(Y: MatrixLike, p: int, q: int, j: int, k: int, tol: Tolerance = DEFAULT_TOLERANCE) -> Any:
    """tz(pq;jk) + tz(jp;qk) + tz(qj;pk), identically zero"""
    return (
        transfer_impedance(Y, p, q, j, k, tol)
        + transfer_impedance(Y, j, p, q, k, tol)
        + transfer_impedance(Y, q, j, p, k, tol)
    )


def check_transitivity(
    Y: MatrixLike, p: int, q: int, r: int, j: int, k: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> Any:
    """tz(pq;jk) - tz(pr;jk) - tz(rq;jk)"""
    return (
        transfer_impedance(Y, p, q, j, k, tol)
        - transfer_impedance(Y, p, r, j, k, tol)
        - transfer_impedance(Y, r, q, j, k, tol)
    )


def check_kcl_identity(Y: MatrixLike, j: int, p: int, tol: Tolerance = DEFAULT_TOLERANCE) -> Any:
    """sum_k y_jk tz(jp; jk) - 1 for j != p, with y_jk = -Y_jk"""
    M = _matrix(Y)
    n = M.shape[0]
    if j == p:
        raise PreconditionViolatedError("the node current identity needs j != p")
    total: Any = 0
    for k in range(1, n + 1):
        if k == j or is_zero(M[j - 1, k - 1], tol):
            continue
        total = total - M[j - 1, k - 1] * transfer_impedance(M, j, p, j, k, tol)
    return total - 1


def check_foster(Y: MatrixLike, tol: Tolerance = DEFAULT_TOLERANCE) -> FosterReport:
    """
    Sum over node pairs of y_jk Z_jk minus (n - 1), plus the largest
    residual of the per-node current identity over all (j, p).
    """
    M = _matrix(Y)
    n = M.shape[0]
    Z = impedance_table(M, tol)
    total: Any = 0
    for a in range(n):
        for b in range(a + 1, n):
            if not is_zero(M[a, b], tol):
                total = total - M[a, b] * Z[a, b]
    worst = 0.0
    for j in range(1, n + 1):
        for p in range(1, n + 1):
            if j != p:
                worst = max(worst, abs(complex(check_kcl_identity(M, j, p, tol))))
    return FosterReport(residual=total - (n - 1), max_node_residual=worst)


def branch_voltages_currents(nl: Netlist, v: np.ndarray, mode: ScalarMode) -> List[Tuple[str, Any, Any]]:
    """(name, v_head - v_tail, y * (v_head - v_tail)) for every direct branch"""
    out = []
    for b in nl.branches:
        a, t = nl.index_of(b.head) - 1, nl.index_of(b.tail) - 1
        drop = v[a] - v[t]
        out.append((b.name, drop, to_scalar(b.y, mode) * drop))
    return out


def check_tellegen(
    nl: Netlist, solution: GroundedSolution, tol: Tolerance = DEFAULT_TOLERANCE
) -> TellegenReport:
    """
    Branch power minus source power in three forms (v i, v* i, v i*), each
    zero for any solution satisfying the node equations. Works on a netlist
    whose only sources are current sources.
    """
    others = [s.name for s in nl.sources if s.kind != SourceKind.ISRC]
    if others:
        raise PreconditionViolatedError(
            "power check needs current sources only; eliminate " + ", ".join(others)
        )
    mode = ScalarMode.EXACT if solution.v.dtype == object else ScalarMode.FLOAT64
    Y = build(nl, mode).Y
    i = injection_vector(nl, mode)
    v = solution.v
    scale = max(
        [abs(complex(x)) for x in i]
        + [abs(complex(y)) * abs(complex(x)) for y in Y.flat for x in v]
        + [1.0]
    )
    if _residual(Y, v, i) > max(tol.rel_tol * scale, tol.abs_tol):
        raise InconsistentSolutionError("solution does not satisfy Y v = i")

    flows = branch_voltages_currents(nl, v, mode)
    src = [
        (v[nl.index_of(s.pos) - 1] - v[nl.index_of(s.neg) - 1], to_scalar(s.value, mode))
        for s in nl.sources
    ]

    def conj(x):
        return x.conjugate()

    r_plain = sum((d * c for _, d, c in flows), 0) - sum((d * c for d, c in src), 0)
    r_vconj = sum((conj(d) * c for _, d, c in flows), 0) - sum((conj(d) * c for d, c in src), 0)
    r_iconj = sum((d * conj(c) for _, d, c in flows), 0) - sum((d * conj(c) for d, c in src), 0)
    total_power = sum((conj(v[a]) * i[a] for a in range(nl.n)), 0)

    k = solution.ground
    v_hat = np.delete(v, k - 1)
    i_hat = np.delete(i, k - 1)
    reduced = minor(Y, [k], [k])
    p_plain = sum((v[a] * i[a] for a in range(nl.n)), 0)
    p_quad = v_hat.dot(reduced.dot(v_hat)) if len(v_hat) else 0
    T = inverse(reduced) if len(v_hat) else reduced
    p_transfer = i_hat.dot(T.dot(i_hat)) if len(i_hat) else 0
    return TellegenReport(
        residuals=(r_plain, r_vconj, r_iconj),
        total_power=total_power,
        quadratic_residual=abs(complex(p_plain - p_quad)),
        transfer_residual=abs(complex(p_plain - p_transfer)),
    )


def check_superposition(
    Y: MatrixLike,
    injections: Sequence[np.ndarray],
    ground: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> float:
    """Largest difference between the solution of the summed injections and the sum of solutions"""
    if not injections:
        return 0.0
    combined = injections[0]
    for extra in injections[1:]:
        combined = combined + extra
    whole = solve_grounded(Y, combined, ground, tol).v
    parts = [solve_grounded(Y, inj, ground, tol).v for inj in injections]
    summed = parts[0]
    for extra in parts[1:]:
        summed = summed + extra
    return max(abs(complex(a - b)) for a, b in zip(whole, summed))
