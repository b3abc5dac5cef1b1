"""
Behavioural properties of solved networks.

DC side: orientability of node voltages, nonnegative transfer impedances,
the impedance metric and Rayleigh monotonicity. AC side: immittance
components, complex power flows per branch, cone confinement of
impedances, metric candidates d_jk = Re(exp(-j*theta) Z_jk), voltage
magnitude propagation along a branch and the assignment of unwrapped
voltage phase angles to an inductive flow.

Everything here is a checker: it takes a netlist or matrix plus a
solution and returns a frozen report. Power and phase quantities are
computed in float mode.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from .admittance import AdmittanceMatrix, build
from .config import DENDRO_NODE_LIMIT, PHASE_TOL, THETA_GRID
from .errors import (
    ConditionAcdeltauFailedError,
    InconsistentSolutionError,
    NoRealRootError,
    NotInductivelyLoadedError,
    PhaseOutsideIntervalError,
    PreconditionViolatedError,
    TooLargeError,
    ZeroImmittanceError,
)
from .linalg import zero_vector
from .models import Branch, ElementKind, Issue, Netlist, SourceKind
from .scalar import DEFAULT_TOLERANCE, ScalarMode, Tolerance, is_zero, to_scalar
from .solve import (
    GroundedSolution,
    impedance_table,
    injection_vector,
    solve_grounded,
    transfer_impedance,
    transfer_matrix,
)

logger = logging.getLogger(__name__)

MatrixLike = Union[AdmittanceMatrix, np.ndarray]


def _matrix(Y: MatrixLike) -> np.ndarray:
    return Y.Y if isinstance(Y, AdmittanceMatrix) else Y


def _complex_array(values: Any) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in values], dtype=complex)


def _scale(values: Iterable[Any]) -> float:
    return max([abs(complex(x)) for x in values] + [1.0])


def _passive(nl: Netlist) -> Netlist:
    return Netlist(nodes=nl.nodes, branches=nl.branches, omega=nl.omega, sigma=nl.sigma)


def _require_direct(nl: Netlist) -> None:
    pending = [b.name for b in nl.branches if b.kind != ElementKind.DIRECT]
    if pending:
        raise PreconditionViolatedError(
            "evaluate (g,c,r,l) branches first: " + ", ".join(pending)
        )


def _require_current_sources(nl: Netlist, what: str) -> None:
    others = [s.name for s in nl.sources if s.kind != SourceKind.ISRC]
    if others:
        raise PreconditionViolatedError(
            f"{what} needs current sources only; eliminate " + ", ".join(others)
        )


# -------------------------
# 1) Phasors and immittance components
# -------------------------

@dataclass(frozen=True)
class Phasor:
    """Complex amplitude r*exp(j*phi) = a + jb"""

    value: complex

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def phase(self) -> float:
        return cmath.phase(self.value)

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    @property
    def indeterminate(self) -> bool:
        """A zero phasor has no meaningful phase"""
        return self.value == 0

    @classmethod
    def from_polar(cls, r: float, phi: float) -> "Phasor":
        return cls(cmath.rect(r, phi))


def phasor(z: Any) -> Phasor:
    p = Phasor(complex(z))
    if p.indeterminate:
        logger.warning("Zero phasor: phase is indeterminate, reported as 0")
    return p


@dataclass(frozen=True)
class ImmittanceComponents:
    """Conductance G, susceptance B, resistance R, reactance X of one element"""

    G: float
    B: float
    R: float
    X: float

    @property
    def admittance(self) -> complex:
        return complex(self.G, self.B)

    @property
    def impedance(self) -> complex:
        return complex(self.R, self.X)

    def sign_relations_hold(self, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        """G and R share a sign; B and X have opposite signs (or both vanish)"""
        eps = tol.abs_tol

        def sign(x: float) -> int:
            return 0 if abs(x) <= eps else (1 if x > 0 else -1)

        return sign(self.G) == sign(self.R) and sign(self.B) == -sign(self.X)


def gbrx(value: Any, impedance: bool = False) -> ImmittanceComponents:
    """
    Components of an admittance y = G + jB (or, with ``impedance``, of
    z = R + jX) together with those of its reciprocal.
    """
    w = complex(value)
    mag2 = w.real ** 2 + w.imag ** 2
    if mag2 == 0:
        raise ZeroImmittanceError("a zero immittance has no reciprocal")
    a, b = w.real / mag2, -w.imag / mag2
    if impedance:
        return ImmittanceComponents(G=a, B=b, R=w.real, X=w.imag)
    return ImmittanceComponents(G=w.real, B=w.imag, R=a, X=b)


def gcrl_components(
    g: float, c: float, r: float, l: float, omega: float, sigma: float = 0.0
) -> ImmittanceComponents:
    """G, B, R, X of y(s) = (g + s c)/(r + s l) at s = sigma + j omega, from the closed forms"""
    g, c, r, l = float(g), float(c), float(r), float(l)
    w2 = sigma * sigma + omega * omega
    den = r * r + 2 * sigma * r * l + w2 * l * l
    if den == 0:
        raise ZeroImmittanceError("r + s l vanishes at the evaluation point")
    G = (r * g + sigma * (r * c + g * l) + w2 * l * c) / den
    B = omega * (r * c - g * l) / den
    mag2 = G * G + B * B
    if mag2 == 0:
        raise ZeroImmittanceError("g + s c vanishes at the evaluation point")
    return ImmittanceComponents(G=G, B=B, R=G / mag2, X=-B / mag2)


def magnitude_slope(g: float, c: float, r: float, l: float, omega: float) -> float:
    """d|y|/d omega for a (g,c,r,l) element on the imaginary axis"""
    g, c, r, l = float(g), float(c), float(r), float(l)
    den = r * r + omega * omega * l * l
    mag = math.sqrt((g * g + omega * omega * c * c) / den)
    return omega / mag * (r * r * c * c - g * g * l * l) / (den * den)


def magnitude_slope_sign(g: float, c: float, r: float, l: float) -> int:
    """+1 when |y| grows with frequency (more capacitive), -1 when it falls, 0 for a resistor"""
    k = float(r) ** 2 * float(c) ** 2 - float(g) ** 2 * float(l) ** 2
    return 0 if k == 0 else (1 if k > 0 else -1)


def susceptance_minimum(r: float, l: float) -> float:
    """Frequency at which a series R-L element reaches its minimum susceptance"""
    if r <= 0 or l <= 0:
        raise PreconditionViolatedError(f"needs r > 0 and l > 0, got r={r}, l={l}")
    return float(r) / float(l)


# -------------------------
# 2) DC orientability and the impedance metric
# -------------------------

@dataclass(frozen=True)
class OrientabilityReport:
    p: int
    q: int
    max_node: int
    min_node: int
    equal_to_p: Tuple[int, ...]
    equal_to_q: Tuple[int, ...]
    violations: Tuple[Issue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def _nonzero_graph(nl: Netlist, tol: Tolerance) -> nx.MultiGraph:
    G = nx.MultiGraph()
    G.add_nodes_from(range(1, nl.n + 1))
    for b in nl.branches:
        if not is_zero(b.y, tol):
            G.add_edge(nl.index_of(b.head), nl.index_of(b.tail), key=b.name)
    return G


def is_bridge_node(nl: Netlist, p: int, q: int, r: int, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Whether every path of nonzero admittances between p and r passes through q"""
    if q in (p, r):
        return True
    G = _nonzero_graph(nl, tol)
    G.remove_node(q)
    return not nx.has_path(G, p, r)


def _require_dc(nl: Netlist, tol: Tolerance) -> None:
    _require_direct(nl)
    for b in nl.branches:
        y = complex(b.y)
        if abs(y.imag) > tol.abs_tol or y.real < -tol.abs_tol:
            raise PreconditionViolatedError(f"branch '{b.name}' is not a nonnegative real admittance")


def check_dc_orientability(
    nl: Netlist, solution: GroundedSolution, p: int, q: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> OrientabilityReport:
    """
    With one source driving current from q to p through a DC network,
    v_p is the largest and v_q the smallest node voltage. A node shares
    v_p exactly when p separates it from q (and likewise for q).
    """
    _require_dc(nl, tol)
    if p == q:
        raise PreconditionViolatedError("source terminals must differ")
    v = np.array([complex(x).real for x in solution.v])
    eps = max(tol.rel_tol * float(np.max(np.abs(v)) if v.size else 0.0), tol.abs_tol)
    issues: List[Issue] = []
    vp, vq = v[p - 1], v[q - 1]
    for k in range(1, nl.n + 1):
        if v[k - 1] > vp + eps:
            issues.append(Issue("violation", "above_source", f"v_{k} = {v[k - 1]:.6g} exceeds v_{p} = {vp:.6g}"))
        if v[k - 1] < vq - eps:
            issues.append(Issue("violation", "below_sink", f"v_{k} = {v[k - 1]:.6g} is below v_{q} = {vq:.6g}"))
    at_p = tuple(k for k in range(1, nl.n + 1) if k != p and abs(v[k - 1] - vp) <= eps)
    at_q = tuple(k for k in range(1, nl.n + 1) if k != q and abs(v[k - 1] - vq) <= eps)
    for k in range(1, nl.n + 1):
        if k in (p, q):
            continue
        if (k in at_p) != is_bridge_node(nl, k, p, q, tol):
            issues.append(Issue("violation", "bridge_mismatch", f"node {k} vs source node {p}"))
        if (k in at_q) != is_bridge_node(nl, k, q, p, tol):
            issues.append(Issue("violation", "bridge_mismatch", f"node {k} vs sink node {q}"))
    return OrientabilityReport(
        p=p,
        q=q,
        max_node=int(np.argmax(v)) + 1,
        min_node=int(np.argmin(v)) + 1,
        equal_to_p=at_p,
        equal_to_q=at_q,
        violations=tuple(issues),
    )


@dataclass(frozen=True)
class DCTransimpedanceReport:
    negative: Tuple[Tuple[int, int, int], ...]
    zero: Tuple[Tuple[int, int, int], ...]
    transfer_nonnegative: bool

    @property
    def ok(self) -> bool:
        return not self.negative and self.transfer_nonnegative


def check_dc_transimpedance(Y: MatrixLike, tol: Tolerance = DEFAULT_TOLERANCE) -> DCTransimpedanceReport:
    """tz(pq; rq) = (Z_pq + Z_qr - Z_pr) / 2 >= 0 for all triples, and T >= 0 entrywise"""
    M = _matrix(Y)
    if any(abs(complex(x).imag) > tol.abs_tol for x in M.flat):
        raise PreconditionViolatedError("DC checks need a real admittance matrix")
    Z = _complex_array(impedance_table(M, tol)).real
    n = M.shape[0]
    eps = max(tol.rel_tol * float(np.max(np.abs(Z)) if Z.size else 0.0), tol.abs_tol)
    negative, zero = [], []
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            for r in range(1, n + 1):
                if len({p, q, r}) < 3:
                    continue
                t = (Z[p - 1, q - 1] + Z[q - 1, r - 1] - Z[p - 1, r - 1]) / 2
                if t < -eps:
                    negative.append((p, q, r))
                elif abs(t) <= eps:
                    zero.append((p, q, r))
    T = _complex_array(transfer_matrix(M, n, tol).T).real
    return DCTransimpedanceReport(
        negative=tuple(negative),
        zero=tuple(zero),
        transfer_nonnegative=bool(np.all(T >= -eps)),
    )


@dataclass(frozen=True, eq=False)
class MetricCandidate:
    """d_jk = Re(exp(-j theta) Z_jk)"""

    theta: float
    d: np.ndarray


@dataclass(frozen=True)
class MetricReport:
    theta: float
    violations: Tuple[Tuple[int, int, int], ...]
    equalities: Tuple[Tuple[int, int, int], ...]
    nonpositive: Tuple[Tuple[int, int], ...]

    @property
    def holds(self) -> bool:
        return not self.violations and not self.nonpositive


def metric_candidate(Z_table: Any, theta: float) -> MetricCandidate:
    Z = _complex_array(Z_table)
    return MetricCandidate(theta=theta, d=(cmath.exp(-1j * theta) * Z).real)


def check_metric(Z_table: Any, theta: float, tol: Tolerance = DEFAULT_TOLERANCE) -> MetricReport:
    """
    Scan every triple (p, q, r) for d_pq + d_qr < d_pr. Triples on distinct
    nodes that meet the inequality with equality are listed separately, as
    are pairs with d_jk <= 0.
    """
    d = metric_candidate(Z_table, theta).d
    n = d.shape[0]
    eps = max(tol.rel_tol * float(np.max(np.abs(d)) if d.size else 0.0), tol.abs_tol)
    violations, equalities = [], []
    for p in range(n):
        for q in range(n):
            for r in range(n):
                gap = d[p, q] + d[q, r] - d[p, r]
                if gap < -eps:
                    violations.append((p + 1, q + 1, r + 1))
                elif abs(gap) <= eps and len({p, q, r}) == 3:
                    equalities.append((p + 1, q + 1, r + 1))
    nonpositive = tuple(
        (j + 1, k + 1) for j in range(n) for k in range(j + 1, n) if d[j, k] <= eps
    )
    logger.debug(f"Metric theta={theta:.4f}: {len(violations)} violated triples")
    return MetricReport(
        theta=theta,
        violations=tuple(violations),
        equalities=tuple(equalities),
        nonpositive=nonpositive,
    )


def metric_scan(
    Z_table: Any, thetas: Optional[Sequence[float]] = None, tol: Tolerance = DEFAULT_TOLERANCE
) -> List[MetricReport]:
    return [check_metric(Z_table, theta, tol) for theta in (thetas if thetas is not None else THETA_GRID)]


def rayleigh_sensitivity(
    Y: MatrixLike, j: int, k: int, p: int, q: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> Any:
    """dZ_jk / dy_alpha = -tz(pq; jk)^2 for a branch alpha between p and q"""
    t = transfer_impedance(Y, p, q, j, k, tol)
    return -(t * t)


def rayleigh_finite_difference(
    nl: Netlist, j: int, k: int, branch: str, h: float = 1e-7, tol: Tolerance = DEFAULT_TOLERANCE
) -> complex:
    """Forward difference of Z_jk in y_alpha, float mode"""
    _require_direct(nl)
    passive = _passive(nl)
    y = complex(passive.branch(branch).y)
    bumped = passive.model_copy(update={
        "branches": tuple(
            Branch(name=b.name, head=b.head, tail=b.tail, y=y + h) if b.name == branch else b
            for b in passive.branches
        )
    })
    base = transfer_impedance(build(passive), j, k, j, k, tol)
    moved = transfer_impedance(build(bumped), j, k, j, k, tol)
    return (moved - base) / h


# -------------------------
# 3) Complex power
# -------------------------

@dataclass(frozen=True)
class BranchPowerFlow:
    """
    Power on one branch of a grounded solution. ``s_head`` leaves the head
    node, ``s_tail`` arrives at the tail node; mu = x p - r q is the same
    at either end.
    """

    name: str
    head: int
    tail: int
    v_head: complex
    v_tail: complex
    current: complex
    s_head: complex
    s_tail: complex
    z: Optional[complex]

    @property
    def p_head(self) -> float:
        return self.s_head.real

    @property
    def q_head(self) -> float:
        return self.s_head.imag

    @property
    def p_tail(self) -> float:
        return self.s_tail.real

    @property
    def q_tail(self) -> float:
        return self.s_tail.imag

    @property
    def consumed(self) -> complex:
        return self.s_head - self.s_tail

    @property
    def mu(self) -> float:
        if self.z is None:
            return 0.0
        return self.z.imag * self.p_head - self.z.real * self.q_head

    @property
    def mu_tail(self) -> float:
        if self.z is None:
            return 0.0
        return self.z.imag * self.p_tail - self.z.real * self.q_tail

    def identity_residual(self) -> float:
        """Largest residual among the magnitude/loss identities linking both ends"""
        if self.z is None:
            return 0.0
        r, x = self.z.real, self.z.imag
        i2 = abs(self.current) ** 2
        a2, b2 = abs(self.v_head) ** 2, abs(self.v_tail) ** 2
        pj, qj, pk, qk = self.p_head, self.q_head, self.p_tail, self.q_tail
        checks = [
            pj - pk - r * i2,
            qj - qk - x * i2,
            a2 - b2 - (r * (pj + pk) + x * (qj + qk)),
            a2 - b2 - (2 * (r * pj + x * qj) - (r * r + x * x) * i2),
            a2 - b2 - (2 * (r * pk + x * qk) + (r * r + x * x) * i2),
            pj * pj + qj * qj - a2 * i2,
            pk * pk + qk * qk - b2 * i2,
            self.mu - self.mu_tail,
            self.mu - (self.v_head * self.v_tail.conjugate()).imag,
        ]
        return max(abs(c) for c in checks)


@dataclass(frozen=True)
class KCLPQReport:
    """Per-node power mismatch v_k conj((Yv - i)_k); ``scale`` bounds the terms summed"""

    residuals: Tuple[complex, ...]
    skipped: Tuple[int, ...]
    scale: float = 1.0

    @property
    def max_residual(self) -> float:
        return max((abs(r) for r in self.residuals), default=0.0)

    def holds(self, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        return self.max_residual <= max(tol.rel_tol * self.scale, tol.abs_tol)


def branch_power(
    nl: Netlist, solution: GroundedSolution, tol: Tolerance = DEFAULT_TOLERANCE
) -> Tuple[BranchPowerFlow, ...]:
    """Per-branch complex power at both ends, after checking node power balance"""
    _require_direct(nl)
    v = [complex(x) for x in solution.v]
    flows = []
    for b in nl.branches:
        h, t = nl.index_of(b.head), nl.index_of(b.tail)
        y = complex(b.y)
        i = y * (v[h - 1] - v[t - 1])
        flows.append(BranchPowerFlow(
            name=b.name,
            head=h,
            tail=t,
            v_head=v[h - 1],
            v_tail=v[t - 1],
            current=i,
            s_head=v[h - 1] * i.conjugate(),
            s_tail=v[t - 1] * i.conjugate(),
            z=None if y == 0 else 1 / y,
        ))
    balance = check_kclpq(nl, solution, tol)
    if not balance.holds(tol):
        raise InconsistentSolutionError(
            f"node power balance fails (residual {balance.max_residual:.3e})"
        )
    return tuple(flows)


def check_kclpq(
    nl: Netlist, solution: GroundedSolution, tol: Tolerance = DEFAULT_TOLERANCE
) -> KCLPQReport:
    """
    At every node with v_k != 0: power leaving on branches minus power
    injected by current sources. Zero-voltage nodes are skipped.
    """
    _require_direct(nl)
    _require_current_sources(nl, "power balance")
    Y = _complex_array(build(nl).Y)
    i = np.array([complex(x) for x in injection_vector(nl)], dtype=complex)
    v = np.array([complex(x) for x in solution.v], dtype=complex)
    mismatch = Y @ v - i
    v_max = float(np.max(np.abs(v))) if v.size else 0.0
    eps = max(tol.rel_tol * v_max, tol.abs_tol)
    scale = max(v_max * (float(np.max(np.abs(Y), initial=0.0)) * v_max * nl.n + float(np.max(np.abs(i), initial=0.0))), 1.0)
    residuals, skipped = [], []
    for k in range(nl.n):
        if abs(v[k]) <= eps:
            skipped.append(k + 1)
            residuals.append(0j)
            continue
        residuals.append(complex(v[k] * np.conj(mismatch[k])))
    return KCLPQReport(residuals=tuple(residuals), skipped=tuple(skipped), scale=scale)


@dataclass(frozen=True)
class ZjkyReport:
    direct: Any
    decomposed: Any
    weights: Dict[str, Any] = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return abs(complex(self.direct - self.decomposed))


def zjky_decomposition(
    nl: Netlist,
    j: int,
    k: int,
    mode: ScalarMode = ScalarMode.FLOAT64,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> ZjkyReport:
    """Z_jk against sum |v_alpha / I|^2 conj(y_alpha) for a unit source from k to j"""
    _require_direct(nl)
    passive = _passive(nl)
    Y = build(passive, mode)
    one = to_scalar(1, mode)
    i = zero_vector(nl.n, mode)
    i[j - 1] = i[j - 1] + one
    i[k - 1] = i[k - 1] - one
    v = solve_grounded(Y, i, k, tol).v
    weights: Dict[str, Any] = {}
    total: Any = to_scalar(0, mode)
    for b in passive.branches:
        drop = v[passive.index_of(b.head) - 1] - v[passive.index_of(b.tail) - 1]
        weight = drop * drop.conjugate()
        weights[b.name] = weight
        total = total + weight * to_scalar(b.y, mode).conjugate()
    return ZjkyReport(direct=v[j - 1] - v[k - 1], decomposed=total, weights=weights)


# -------------------------
# 4) Phase intervals, cones and metric angles
# -------------------------

@dataclass(frozen=True)
class PhaseInterval:
    """Interval of phase angles with selectable open/closed ends"""

    lower: float
    upper: float
    closed_lower: bool = True
    closed_upper: bool = False

    def __post_init__(self):
        if self.upper < self.lower:
            raise PreconditionViolatedError(f"empty phase interval [{self.lower}, {self.upper}]")

    @classmethod
    def point(cls, angle: float) -> "PhaseInterval":
        return cls(angle, angle, True, True)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def is_trivial(self) -> bool:
        return self.width == 0

    def negated(self) -> "PhaseInterval":
        return PhaseInterval(-self.upper, -self.lower, self.closed_upper, self.closed_lower)

    def contains(self, angle: float, tol: float = PHASE_TOL) -> bool:
        # bring the angle into [lower - tol, lower + 2*pi - tol)
        t = self.lower + math.fmod(angle - self.lower, 2 * math.pi)
        if t < self.lower - tol:
            t += 2 * math.pi
        if t >= self.lower + 2 * math.pi - tol:
            t -= 2 * math.pi
        above = t >= self.lower - tol if self.closed_lower else t > self.lower + tol
        below = t <= self.upper + tol if self.closed_upper else t < self.upper - tol
        return above and below


def _branch_admittances_from_matrix(M: np.ndarray, tol: Tolerance) -> Dict[Tuple[int, int], complex]:
    n = M.shape[0]
    return {
        (a + 1, b + 1): -complex(M[a, b])
        for a in range(n)
        for b in range(a + 1, n)
        if not is_zero(M[a, b], tol)
    }


def cone_offenders(
    Y: MatrixLike, interval: PhaseInterval, tol: Tolerance = DEFAULT_TOLERANCE
) -> List[Tuple[int, int]]:
    """Node pairs whose Z_jk phase leaves the negated admittance interval"""
    if interval.width > math.pi:
        raise PreconditionViolatedError(f"cone interval wider than pi: {interval.width}")
    M = _matrix(Y)
    for (a, b), y in _branch_admittances_from_matrix(M, tol).items():
        if not interval.contains(cmath.phase(y)):
            raise PhaseOutsideIntervalError(
                f"admittance between nodes {a} and {b} has phase {cmath.phase(y):.6f} outside the interval"
            )
    Z = _complex_array(impedance_table(M, tol))
    target = interval.negated()
    n = M.shape[0]
    return [
        (j + 1, k + 1)
        for j in range(n)
        for k in range(j + 1, n)
        if abs(Z[j, k]) > tol.abs_tol and not target.contains(cmath.phase(Z[j, k]))
    ]


def check_cone(Y: MatrixLike, interval: PhaseInterval, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Every driving-point impedance lies in the sector of the branch impedances"""
    return not cone_offenders(Y, interval, tol)


@dataclass(frozen=True)
class CommonPhase:
    rho: float
    theta: float


def common_phase_ratio(nl: Netlist, tol: Tolerance = DEFAULT_TOLERANCE) -> Optional[CommonPhase]:
    """
    The common ratio rho = g/b when every nonzero branch has b of one sign,
    g >= 0 and the same g/b; theta = arccot(rho) in [-pi/2, pi/2]. None
    when the network does not qualify.
    """
    _require_direct(nl)
    ys = [complex(b.y) for b in nl.branches if not is_zero(b.y, tol)]
    if not ys:
        return None
    if any(abs(y.imag) <= tol.abs_tol or y.real < -tol.abs_tol for y in ys):
        return None
    if len({y.imag > 0 for y in ys}) != 1:
        return None
    ratios = [y.real / y.imag for y in ys]
    rho = ratios[0]
    if any(abs(r - rho) > max(tol.rel_tol * abs(rho), tol.abs_tol) for r in ratios):
        return None
    theta = math.copysign(math.pi / 2, ys[0].imag) if rho == 0 else math.atan(1 / rho)
    return CommonPhase(rho=rho, theta=theta)


def cone_metric_angles(spread: PhaseInterval, admittance: PhaseInterval) -> PhaseInterval:
    """
    Admissible theta for the metric d_jk = Re(exp(-j theta) Z_jk) on a
    network with interval of spread [-phi1, phi2) whose admittance phases
    lie in [theta1, theta2).
    """
    phi1, phi2 = -spread.lower, spread.upper
    theta1, theta2 = admittance.lower, admittance.upper
    if phi1 < 0 or phi2 < 0:
        raise PreconditionViolatedError("the interval of spread must contain zero")
    if phi1 + phi2 >= math.pi:
        raise PreconditionViolatedError("the interval of spread must be narrower than pi")
    if theta2 - theta1 >= math.pi or theta2 - theta1 > math.pi - phi1 - phi2:
        raise PreconditionViolatedError("admittance phases spread too widely for this interval")
    if spread.is_trivial:
        lower, upper = -theta1 - math.pi / 2, math.pi / 2 - theta2
        if admittance.closed_lower:
            return PhaseInterval(lower, upper, closed_lower=False, closed_upper=True)
        return PhaseInterval(lower, upper, closed_lower=True, closed_upper=False)
    lower, upper = phi2 - theta1 - math.pi / 2, math.pi / 2 - phi1 - theta2
    if upper < lower:
        raise PreconditionViolatedError("no admissible metric angle")
    return PhaseInterval(lower, upper, closed_lower=True, closed_upper=True)


@dataclass(frozen=True)
class DendromorphicReport:
    interval: PhaseInterval
    failures: Tuple[Tuple[int, int, str, float], ...]
    perpendicular: Tuple[Tuple[int, int, str], ...]

    @property
    def holds(self) -> bool:
        return not self.failures


def check_dendromorphic(
    nl: Netlist, interval: PhaseInterval, tol: Tolerance = DEFAULT_TOLERANCE
) -> DendromorphicReport:
    """
    For every node pair, drive a unit current between them and test whether
    each nonzero branch current, taken in one of its two orientations, has
    its phase in ``interval``.
    """
    if nl.n > DENDRO_NODE_LIMIT:
        raise TooLargeError(f"dendromorphic check limited to {DENDRO_NODE_LIMIT} nodes, got {nl.n}")
    _require_direct(nl)
    passive = _passive(nl)
    Y = build(passive)
    failures, perpendicular = [], []
    for j in range(1, nl.n + 1):
        for k in range(j + 1, nl.n + 1):
            i = np.zeros(nl.n, dtype=complex)
            i[j - 1], i[k - 1] = 1.0, -1.0
            v = solve_grounded(Y, i, k, tol).v
            for b in passive.branches:
                cur = complex(b.y) * (v[passive.index_of(b.head) - 1] - v[passive.index_of(b.tail) - 1])
                if abs(cur) <= tol.abs_tol:
                    continue
                if abs(cur.real) <= tol.rel_tol * abs(cur):
                    perpendicular.append((j, k, b.name))
                if not (interval.contains(cmath.phase(cur)) or interval.contains(cmath.phase(-cur))):
                    failures.append((j, k, b.name, cmath.phase(cur)))
    logger.debug(f"Dendromorphic check: {len(failures)} branch currents outside the interval")
    return DendromorphicReport(
        interval=interval, failures=tuple(failures), perpendicular=tuple(perpendicular)
    )


# -------------------------
# 5) Voltage magnitudes and phase angles along branches
# -------------------------

class FlowEnd(str, Enum):
    SENDING = "sending"
    RECEIVING = "receiving"


def propagate_voltage(
    v_j: float,
    p: float,
    q: float,
    r: float,
    x: float,
    known_end: FlowEnd = FlowEnd.SENDING,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Tuple[float, ...]:
    """
    |v_k| across a branch of impedance r + jx directed from j (known |v_j|)
    to k. With the flow p + jq known leaving j the answer is unique; with
    the flow known arriving at k the quartic in |v_k| gives up to two
    nonnegative candidates, largest first.
    """
    if v_j <= 0:
        raise PreconditionViolatedError(f"known voltage magnitude must be positive, got {v_j}")
    if known_end == FlowEnd.SENDING:
        if p == 0 and q == 0:
            return (float(v_j),)
        i2 = (p * p + q * q) / (v_j * v_j)
        pk, qk = p - r * i2, q - x * i2
        return (math.sqrt((pk * pk + qk * qk) / i2),)

    b = v_j * v_j - 2 * (r * p + x * q)
    c = (r * r + x * x) * (p * p + q * q)
    disc = b * b - 4 * c
    eps = max(tol.rel_tol * b * b, tol.abs_tol)
    if disc < -eps:
        raise NoRealRootError(f"no voltage supports flow {p}+{q}j at the receiving end")
    root = math.sqrt(max(disc, 0.0))
    found = sorted({u for u in ((b + root) / 2, (b - root) / 2) if u >= -eps}, reverse=True)
    if not found:
        raise NoRealRootError(f"no nonnegative |v_k|^2 supports flow {p}+{q}j")
    return tuple(math.sqrt(max(u, 0.0)) for u in found)


def branch_phase_lag(mu: float, v_j: float, v_k: float) -> float:
    """delta_j - delta_k in [-pi/2, pi/2] from mu = |v_j||v_k| sin(delta_j - delta_k)"""
    if v_j <= 0 or v_k <= 0:
        raise PreconditionViolatedError("phase lag needs nonzero endpoint voltages")
    return math.asin(max(-1.0, min(1.0, mu / (v_j * v_k))))


def acdeltau_holds(flow: BranchPowerFlow, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """r p_j + x q_j <= |v_j|^2 or -(r p_k + x q_k) <= |v_k|^2, i.e. Re(v_j conj(v_k)) >= 0"""
    if flow.z is None:
        return True
    r, x = flow.z.real, flow.z.imag
    eps = max(tol.rel_tol * abs(flow.v_head) * abs(flow.v_tail), tol.abs_tol)
    return (
        r * flow.p_head + x * flow.q_head <= abs(flow.v_head) ** 2 + eps
        or -(r * flow.p_tail + x * flow.q_tail) <= abs(flow.v_tail) ** 2 + eps
    )


def is_inductively_loaded(flow: BranchPowerFlow, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """mu p_j >= 0 and mu p_k >= 0"""
    eps = max(tol.rel_tol * abs(flow.s_head) ** 2, tol.abs_tol)
    return flow.mu * flow.p_head >= -eps and flow.mu * flow.p_tail >= -eps


@dataclass(frozen=True)
class PhaseAssignment:
    ground: int
    angles: Dict[int, float]
    skipped: Tuple[int, ...]
    generators: Tuple[int, ...]
    max_nodes: Tuple[int, ...]
    witnesses: Dict[int, Tuple[int, ...]]
    violations: Tuple[Issue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def _sign(x: float, eps: float) -> int:
    return 0 if abs(x) <= eps else (1 if x > 0 else -1)


def _lag(flow: BranchPowerFlow, strict: bool, tol: Tolerance) -> float:
    if acdeltau_holds(flow, tol):
        return branch_phase_lag(flow.mu, abs(flow.v_head), abs(flow.v_tail))
    if strict:
        raise ConditionAcdeltauFailedError(flow.name)
    return cmath.phase(flow.v_head * flow.v_tail.conjugate())


def assign_phase_angles(
    nl: Netlist,
    solution: GroundedSolution,
    tol: Tolerance = DEFAULT_TOLERANCE,
    strict: bool = False,
) -> PhaseAssignment:
    """
    Unwrapped phase angles for an inductive flow grounded at the solution's
    ground node. Angles propagate breadth-first from a source terminal;
    branches outside the traversal tree and the generator, sign and power
    balance properties are checked and reported as violations.
    """
    _require_direct(nl)
    _require_current_sources(nl, "phase assignment")
    g = solution.ground
    for s in nl.sources:
        if g not in (nl.index_of(s.pos), nl.index_of(s.neg)):
            raise PreconditionViolatedError(f"source '{s.name}' is not connected to ground node {g}")
    flows = branch_power(nl, solution, tol)
    for f in flows:
        if f.z is not None and f.z.real < -tol.abs_tol:
            raise PreconditionViolatedError(f"branch '{f.name}' has negative resistance")
    offenders = [f.name for f in flows if not is_inductively_loaded(f, tol)]
    if offenders:
        raise NotInductivelyLoadedError(offenders)

    v = [complex(x) for x in solution.v]
    v_eps = max(tol.rel_tol * max(abs(x) for x in v), tol.abs_tol)
    live = [k for k in range(1, nl.n + 1) if abs(v[k - 1]) > v_eps]
    skipped = tuple(k for k in range(1, nl.n + 1) if abs(v[k - 1]) <= v_eps)
    for k in skipped:
        if k != g:
            logger.warning(f"Node {k} has zero voltage; no phase angle assigned")

    incident: Dict[int, List[BranchPowerFlow]] = {k: [] for k in range(1, nl.n + 1)}
    for f in flows:
        if f.head in live and f.tail in live:
            incident[f.head].append(f)
            incident[f.tail].append(f)

    terminals = [nl.index_of(s.pos) if nl.index_of(s.pos) != g else nl.index_of(s.neg) for s in nl.sources]
    starts = [k for k in terminals if k in live] + live
    angles: Dict[int, float] = {}
    tree: set = set()
    for start in starts:
        if start in angles:
            continue
        angles[start] = cmath.phase(v[start - 1])
        queue = deque([start])
        while queue:
            a = queue.popleft()
            for f in incident[a]:
                other = f.tail if f.head == a else f.head
                if other in angles:
                    continue
                lag = _lag(f, strict, tol)
                angles[other] = angles[a] - lag if f.head == a else angles[a] + lag
                tree.add(f.name)
                queue.append(other)

    issues: List[Issue] = []
    for f in flows:
        if f.head not in angles or f.tail not in angles:
            continue
        diff = angles[f.head] - angles[f.tail]
        if f.name not in tree and abs(diff - _lag(f, strict, tol)) > PHASE_TOL:
            issues.append(Issue("violation", "cycle_inconsistent", f"branch '{f.name}' closes a cycle with mismatch {diff - _lag(f, strict, tol):.3e}"))
        p_eps = max(tol.rel_tol * abs(f.s_head), tol.abs_tol)
        if _sign(diff, PHASE_TOL) != _sign(f.p_head, p_eps):
            issues.append(Issue("violation", "phase_sign", f"branch '{f.name}': lag {diff:.6g} vs active power {f.p_head:.6g}"))
    for k, delta in angles.items():
        wrapped = cmath.phase(cmath.exp(1j * (delta - cmath.phase(v[k - 1]))))
        if abs(wrapped) > PHASE_TOL:
            issues.append(Issue("violation", "phase_congruence", f"node {k}: angle {delta:.6g} not congruent to arg v"))

    generators = []
    for s in nl.sources:
        pos, neg = nl.index_of(s.pos), nl.index_of(s.neg)
        power = ((v[pos - 1] - v[neg - 1]) * complex(s.value).conjugate()).real
        if power > max(tol.rel_tol * _scale(v), tol.abs_tol):
            generators.append(pos if pos != g else neg)
    generators = sorted(set(generators))

    witnesses: Dict[int, Tuple[int, ...]] = {}
    max_nodes: Tuple[int, ...] = ()
    if angles:
        top = max(angles.values())
        max_nodes = tuple(sorted(k for k, d in angles.items() if top - d <= PHASE_TOL))
        any_power = any(abs(f.p_head) > max(tol.rel_tol * abs(f.s_head), tol.abs_tol) for f in flows)
        if generators or any_power:
            for k in max_nodes:
                path = _zero_power_path(k, generators, incident, tol)
                if path is None:
                    issues.append(Issue("violation", "max_not_at_generator", f"node {k} holds the largest angle but reaches no generator"))
                else:
                    witnesses[k] = path

    logger.debug(f"Assigned {len(angles)} phase angles, {len(issues)} violations")
    return PhaseAssignment(
        ground=g,
        angles=angles,
        skipped=skipped,
        generators=tuple(generators),
        max_nodes=max_nodes,
        witnesses=witnesses,
        violations=tuple(issues),
    )


def _zero_power_path(
    start: int,
    generators: Sequence[int],
    incident: Dict[int, List[BranchPowerFlow]],
    tol: Tolerance,
) -> Optional[Tuple[int, ...]]:
    """Any path from ``start`` to a generator terminal along branches carrying no active power"""
    targets = set(generators)
    previous: Dict[int, Optional[int]] = {start: None}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        if a in targets:
            path = [a]
            while previous[path[-1]] is not None:
                path.append(previous[path[-1]])
            return tuple(reversed(path))
        for f in incident[a]:
            if abs(f.p_head) > max(tol.rel_tol * abs(f.s_head), tol.abs_tol):
                continue
            other = f.tail if f.head == a else f.head
            if other not in previous:
                previous[other] = a
                queue.append(other)
    return None


@dataclass(frozen=True)
class LoadFlowEntry:
    branch: str
    p: float
    approx: float

    @property
    def relative_error(self) -> float:
        return abs(self.approx - self.p) / abs(self.p) if self.p else abs(self.approx)


def dc_load_flow(
    nl: Netlist, solution: GroundedSolution, angles: Dict[int, float], tol: Tolerance = DEFAULT_TOLERANCE
) -> List[LoadFlowEntry]:
    """Active power p_alpha against the small-angle estimate (delta_j - delta_k) / x_alpha"""
    out = []
    for f in branch_power(nl, solution, tol):
        if f.z is None or f.z.imag == 0 or f.head not in angles or f.tail not in angles:
            continue
        out.append(LoadFlowEntry(
            branch=f.name,
            p=f.p_head,
            approx=(angles[f.head] - angles[f.tail]) / f.z.imag,
        ))
    return out
