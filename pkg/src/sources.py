"""
Source algebra: Thevenin/Norton conversion, one-port equivalents of
subnetworks, elimination of isolated voltage sources and the matrix stamps
of linear dependent sources.

Conventions follow the netlist format: an isrc ``Q P`` injects its current
at P, so a Norton source (p, q, I, y) is an isrc from q to p in parallel
with an admittance y between p and q. A Thevenin source (p, q, V, y) is a
voltage rise V from q, in series with y, ending at p.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from .admittance import AdmittanceMatrix, build
from .errors import (
    EqualIndicesError,
    MissingSeriesAdmittanceError,
    NonDirectBranchError,
    PreconditionViolatedError,
    SingularNetworkError,
    SingularSubnetworkError,
    UnknownSourceError,
    VoltageSourceLoopError,
    ZeroAdmittanceError,
)
from .linalg import minor, mode_of, solve_linear, zero_vector
from .models import (
    CURRENT_CONTROLLED,
    VOLTAGE_OUTPUT,
    Branch,
    ElementKind,
    Netlist,
    Source,
    SourceKind,
)
from .netlist import _rebuild, contract_netlist
from .scalar import DEFAULT_TOLERANCE, ScalarMode, Tolerance, is_exact_value, is_zero, to_scalar
from .solve import solve_grounded

logger = logging.getLogger(__name__)

MatrixLike = Union[AdmittanceMatrix, np.ndarray]


# -------------------------
# 1) Thevenin-Norton equivalence
# -------------------------

@dataclass(frozen=True)
class NortonSource:
    """Current I injected at p (drawn from q) in parallel with admittance y"""

    p: str
    q: str
    I: Any
    y: Any

    def __post_init__(self):
        if is_zero(self.y):
            raise ZeroAdmittanceError(f"Norton source {self.p}-{self.q} needs y != 0")

    def current(self, v_p: Any, v_q: Any) -> Any:
        """N_pq = y (v_p - v_q) - I: net current drawn from p and returned at q"""
        return self.y * (v_p - v_q) - self.I


@dataclass(frozen=True)
class TheveninSource:
    """Voltage rise V from q followed by series admittance y to p"""

    p: str
    q: str
    V: Any
    y: Any

    def __post_init__(self):
        if is_zero(self.y):
            raise ZeroAdmittanceError(f"Thevenin source {self.p}-{self.q} needs y != 0")

    def current(self, v_p: Any, v_q: Any) -> Any:
        """T_pq = y (v_p - (v_q + V))"""
        return self.y * (v_p - (v_q + self.V))


def norton_to_thevenin(source: NortonSource) -> TheveninSource:
    return TheveninSource(p=source.p, q=source.q, V=source.I / source.y, y=source.y)


def thevenin_to_norton(source: TheveninSource) -> NortonSource:
    return NortonSource(p=source.p, q=source.q, I=source.y * source.V, y=source.y)


def _fresh(taken: Iterable[str], base: str) -> str:
    names = set(taken)
    if base not in names:
        return base
    k = 2
    while f"{base}.{k}" in names:
        k += 1
    return f"{base}.{k}"


def insert_norton(nl: Netlist, name: str, source: NortonSource) -> Netlist:
    """Add the Norton source as branch ``name`` plus isrc ``name``"""
    for node in (source.p, source.q):
        nl.index_of(node)
    branch = Branch(name=_fresh((b.name for b in nl.branches), name), head=source.p, tail=source.q, y=source.y)
    isrc = Source(
        name=_fresh((s.name for s in nl.sources), name),
        kind=SourceKind.ISRC,
        pos=source.p,
        neg=source.q,
        value=source.I,
    )
    return _rebuild(nl, branches=list(nl.branches) + [branch], sources=list(nl.sources) + [isrc])


def insert_thevenin(nl: Netlist, name: str, source: TheveninSource) -> Netlist:
    """Add an internal node, a vsrc from q to it and the series branch on to p"""
    for node in (source.p, source.q):
        nl.index_of(node)
    internal = _fresh(nl.nodes, f"{name}.int")
    branch = Branch(name=_fresh((b.name for b in nl.branches), name), head=internal, tail=source.p, y=source.y)
    vsrc = Source(
        name=_fresh((s.name for s in nl.sources), name),
        kind=SourceKind.VSRC,
        pos=internal,
        neg=source.q,
        value=source.V,
    )
    return _rebuild(
        nl,
        nodes=list(nl.nodes) + [internal],
        branches=list(nl.branches) + [branch],
        sources=list(nl.sources) + [vsrc],
    )


def norton_quantity(
    Y_rest: MatrixLike, i_rest: np.ndarray, v: np.ndarray, p: int, q: int
) -> Tuple[Any, Any]:
    """
    N_pq read off rows p and q of the network without the Norton source:
    (i_rest - Y_rest v)_p and (Y_rest v - i_rest)_q. Both equal y (v_p - v_q) - I
    for the source that was removed.
    """
    M = Y_rest.Y if isinstance(Y_rest, AdmittanceMatrix) else Y_rest
    if p == q:
        raise EqualIndicesError(f"Norton source needs distinct nodes, got {p} twice")
    flow = M.dot(v)
    return i_rest[p - 1] - flow[p - 1], flow[q - 1] - i_rest[q - 1]


# -------------------------
# 2) One-port decomposition
# -------------------------

@dataclass(frozen=True)
class OnePortDecomposition:
    """Port nodes p, q separating node sets A and B (1-based indices)"""

    p: int
    q: int
    A: Tuple[int, ...]
    B: Tuple[int, ...]

    def side(self, label: str) -> Tuple[int, ...]:
        if label not in ("A", "B"):
            raise PreconditionViolatedError(f"side must be 'A' or 'B', got '{label}'")
        return self.A if label == "A" else self.B


def _coupling_graph(nl: Netlist, port: Tuple[int, int]) -> nx.Graph:
    """Nodes other than the port, joined by branches and by everything a source ties together"""
    G = nx.Graph()
    G.add_nodes_from(k for k in range(1, nl.n + 1) if k not in port)

    def tie(names: Sequence[str]) -> None:
        idx = [nl.index_of(x) for x in names if x]
        idx = [k for k in idx if k not in port]
        G.add_edges_from(zip(idx, idx[1:]))

    for b in nl.branches:
        tie([b.head, b.tail])
    for s in nl.sources:
        names = list(s.referenced_nodes())
        if s.ctrl_branch:
            names += list(nl.branch(s.ctrl_branch).nodes)
        tie(names)
    return G


def find_one_port(
    nl: Netlist, p: Any, q: Any, side: Optional[Iterable[Any]] = None
) -> Optional[OnePortDecomposition]:
    """
    Split the nodes other than p, q into A and B with no branch or source
    between them. A is the smallest group of islands (ties broken by lowest
    node index) or, with ``side``, the islands containing those nodes. None
    when only the trivial split exists.
    """
    pp, qq = nl.resolve_node(p), nl.resolve_node(q)
    if pp == qq:
        raise EqualIndicesError(f"port needs distinct nodes, got {pp} twice")
    islands = [tuple(sorted(c)) for c in nx.connected_components(_coupling_graph(nl, (pp, qq)))]
    if len(islands) < 2:
        return None
    if side is not None:
        wanted = {nl.resolve_node(x) for x in side}
        if wanted & {pp, qq}:
            raise PreconditionViolatedError("side nodes must not include the port")
        A = sorted(k for island in islands if wanted & set(island) for k in island)
    else:
        A = list(min(islands, key=lambda c: (len(c), c[0])))
    B = sorted(k for island in islands for k in island if k not in A)
    if not A or not B:
        return None
    logger.debug(f"One-port at ({pp},{qq}): A={A}, B={B}")
    return OnePortDecomposition(p=pp, q=qq, A=tuple(A), B=tuple(B))


@dataclass(frozen=True)
class OnePortEquivalent:
    """
    ``norton`` replaces the chosen side alone; ``merged`` also absorbs any
    admittance and current source already across the port.
    """

    norton: NortonSource
    merged: NortonSource
    removed: Tuple[int, ...]
    degenerate: bool

    @property
    def open_circuit_voltage(self) -> Any:
        return self.merged.I / self.merged.y

    @property
    def thevenin(self) -> TheveninSource:
        return norton_to_thevenin(self.merged)


def _require_isrc_only(nl: Netlist) -> None:
    others = [s.name for s in nl.sources if s.kind != SourceKind.ISRC]
    if others:
        raise PreconditionViolatedError(
            f"one-port equivalents need current sources only; eliminate or stamp {others} first"
        )


def one_port_equivalent(
    nl: Netlist,
    decomposition: OnePortDecomposition,
    side: str = "B",
    mode: ScalarMode = ScalarMode.FLOAT64,
) -> OnePortEquivalent:
    """
    Norton equivalent of the subnetwork on ``side``:
    I_sc = Y_Bp^T Y_BB^-1 i_B + (injection at p from B-side sources) and
    y = Y_Bp^T Y_BB^-1 Y_Bq, where Y_Bp, Y_Bq hold the admittances from B
    to the port nodes.
    """
    _require_isrc_only(nl)
    p, q = decomposition.p, decomposition.q
    B = list(decomposition.side(side))
    if not B:
        raise PreconditionViolatedError(f"side {side} of the decomposition is empty")
    Y = build(nl, mode).Y
    rows = [k - 1 for k in B]
    Y_BB = Y[np.ix_(rows, rows)]
    Y_Bp = np.array([-Y[r, p - 1] for r in rows], dtype=Y.dtype)
    Y_Bq = np.array([-Y[r, q - 1] for r in rows], dtype=Y.dtype)

    i_B = zero_vector(len(B), mode)
    inj_p = to_scalar(0, mode)
    I_pq = to_scalar(0, mode)
    members = set(B)
    for s in nl.sources:
        a, b = nl.index_of(s.pos), nl.index_of(s.neg)
        value = to_scalar(s.value, mode)
        if {a, b} == {p, q}:
            I_pq = I_pq + (value if a == p else -value)
            continue
        if not ({a, b} & members):
            continue
        for node, sign in ((a, 1), (b, -1)):
            if node in members:
                i_B[B.index(node)] = i_B[B.index(node)] + sign * value
            elif node == p:
                inj_p = inj_p + sign * value

    try:
        x_i = solve_linear(Y_BB, i_B)
        x_q = solve_linear(Y_BB, Y_Bq)
    except SingularNetworkError as e:
        raise SingularSubnetworkError(f"Y_BB of side {side} is singular: {e}") from e
    I_sc = Y_Bp.dot(x_i) + inj_p
    y = Y_Bp.dot(x_q)
    y_pq = -Y[p - 1, q - 1]
    names = (nl.name_of(p), nl.name_of(q))
    norton = NortonSource(*names, I=I_sc, y=y)
    merged = NortonSource(*names, I=I_sc + I_pq, y=y + y_pq)
    logger.debug(f"One-port equivalent of {side}={B}: I_sc={I_sc}, y={y}")
    return OnePortEquivalent(norton=norton, merged=merged, removed=tuple(B), degenerate=is_zero(I_sc))


def replace_subnetwork(
    nl: Netlist, decomposition: OnePortDecomposition, equivalent: OnePortEquivalent, name: str = "eq"
) -> Netlist:
    """Delete the removed side with its branches and sources and insert the Norton equivalent"""
    gone = {nl.name_of(k) for k in equivalent.removed}
    branches = [b for b in nl.branches if not (set(b.nodes) & gone)]
    sources = [s for s in nl.sources if not (set(s.referenced_nodes()) & gone)]
    nodes = [x for x in nl.nodes if x not in gone]
    reduced = _rebuild(nl, nodes=nodes, branches=branches, sources=sources)
    return insert_norton(reduced, name, equivalent.norton)


# -------------------------
# 3) Isolated voltage sources
# -------------------------

@dataclass(frozen=True)
class VoltageElimination:
    """
    One eliminated vsrc: node ``pos`` was merged into ``neg`` and
    v_pos = v_neg + value afterwards. ``value`` is the source voltage as seen
    after earlier eliminations.
    """

    source: str
    pos: str
    neg: str
    value: Any
    injected: Tuple[str, ...] = ()
    absorbed_branches: Tuple[str, ...] = ()
    absorbed_sources: Tuple[str, ...] = ()


def solve_pinned(Y: MatrixLike, i: np.ndarray, p: int, q: int, V: Any) -> np.ndarray:
    """
    Solve with v_q = 0 and v_p = V held by an isolated source:
    Y_(pq,pq) v = i + y_p V over the remaining nodes, y_p the admittances to p.
    Rows p and q are left out, so anything between p and q is irrelevant.
    """
    M = Y.Y if isinstance(Y, AdmittanceMatrix) else Y
    n = M.shape[0]
    if p == q:
        raise EqualIndicesError(f"pinned nodes must differ, got {p} twice")
    mode = mode_of(M)
    rest = [a for a in range(n) if a not in (p - 1, q - 1)]
    V = to_scalar(V, mode)
    rhs = np.array([i[a] - M[a, p - 1] * V for a in rest], dtype=M.dtype)
    v = zero_vector(n, mode)
    v[p - 1] = V
    if rest:
        solved = solve_linear(minor(M, [p, q], [p, q]), rhs)
        for r, a in enumerate(rest):
            v[a] = solved[r]
    return v


def _touches(nl: Netlist, source: Source, node: str) -> bool:
    if node in source.referenced_nodes():
        return True
    return bool(source.ctrl_branch) and node in nl.branch(source.ctrl_branch).nodes


def eliminate_voltage_source(nl: Netlist, name: str) -> Tuple[Netlist, VoltageElimination]:
    """
    Replace vsrc ``name`` (v_pos - v_neg = V) by current sources: every branch
    y_pk from pos to k != neg becomes an isrc of value y_pk V from neg to k,
    then pos is merged into neg. Elements across the source are absorbed.
    """
    src = nl.source(name)
    if src.kind != SourceKind.VSRC:
        raise UnknownSourceError(f"source '{name}' is a {src.kind.value}, not a vsrc")
    p, q, V = src.pos, src.neg, src.value
    for other in nl.sources:
        if other.name == name:
            continue
        if other.kind == SourceKind.VSRC and {other.pos, other.neg} == {p, q}:
            raise VoltageSourceLoopError(f"voltage sources '{name}' and '{other.name}' form a loop")
        if other.is_dependent and _touches(nl, other, p):
            raise PreconditionViolatedError(
                f"dependent source '{other.name}' refers to node '{p}' removed with '{name}'"
            )

    branches: List[Branch] = []
    injected: List[Source] = []
    absorbed_branches: List[str] = []
    source_names = [s.name for s in nl.sources]
    for b in nl.branches:
        if set(b.nodes) == {p, q}:
            absorbed_branches.append(b.name)
            continue
        branches.append(b)
        if p not in b.nodes:
            continue
        if b.kind != ElementKind.DIRECT:
            raise NonDirectBranchError(f"branch '{b.name}' must be evaluated before eliminating '{name}'")
        k = b.tail if b.head == p else b.head
        new_name = _fresh(source_names, f"{name}.{b.name}")
        source_names.append(new_name)
        injected.append(Source(name=new_name, kind=SourceKind.ISRC, pos=k, neg=q, value=b.y * V))

    sources: List[Source] = []
    absorbed_sources: List[str] = []
    for s in nl.sources:
        if s.name == name:
            continue
        if {s.pos, s.neg} == {p, q}:
            absorbed_sources.append(s.name)
            continue
        if s.kind == SourceKind.VSRC and p in (s.pos, s.neg):
            # v_p = v_q + V once p is merged into q
            value = s.value - V if s.pos == p else s.value + V
            s = s.model_copy(update={"value": value})
        sources.append(s)

    reduced = contract_netlist(
        _rebuild(nl, branches=branches, sources=sources + injected), p, q, keep=q
    )
    record = VoltageElimination(
        source=name,
        pos=p,
        neg=q,
        value=V,
        injected=tuple(s.name for s in injected),
        absorbed_branches=tuple(absorbed_branches),
        absorbed_sources=tuple(absorbed_sources),
    )
    logger.info(f"Eliminated vsrc '{name}': {len(injected)} current source(s) injected, node '{p}' merged into '{q}'")
    return reduced, record


def eliminate_voltage_sources(nl: Netlist) -> Tuple[Netlist, Tuple[VoltageElimination, ...]]:
    """Eliminate every vsrc in netlist order"""
    records: List[VoltageElimination] = []
    while True:
        pending = [s.name for s in nl.sources if s.kind == SourceKind.VSRC]
        if not pending:
            return nl, tuple(records)
        nl, record = eliminate_voltage_source(nl, pending[0])
        records.append(record)


def restore_voltages(
    v: Sequence[Any], reduced: Netlist, eliminations: Sequence[VoltageElimination], original: Netlist
) -> np.ndarray:
    """Voltages on the original nodes from a solution of the reduced netlist"""
    exact = len(v) > 0 and all(is_exact_value(x) for x in v)
    mode = ScalarMode.EXACT if exact else ScalarMode.FLOAT64
    by_name: Dict[str, Any] = {name: v[k] for k, name in enumerate(reduced.nodes)}
    for record in reversed(eliminations):
        # source values are stored exactly; lift them to the solution's mode
        by_name[record.pos] = by_name[record.neg] + to_scalar(record.value, mode)
    missing = [x for x in original.nodes if x not in by_name]
    if missing:
        raise PreconditionViolatedError(f"no voltage recovered for nodes {missing}")
    dtype = v.dtype if isinstance(v, np.ndarray) else object
    return np.array([by_name[x] for x in original.nodes], dtype=dtype)


def source_current(nl: Netlist, v: Sequence[Any], name: str, mode: ScalarMode = ScalarMode.FLOAT64) -> Any:
    """
    Current delivered into the positive terminal of vsrc ``name`` for node
    voltages ``v`` of ``nl``: KCL at that node over branches and the other
    independent sources.
    """
    src = nl.source(name)
    if src.kind != SourceKind.VSRC:
        raise UnknownSourceError(f"source '{name}' is a {src.kind.value}, not a vsrc")
    node = src.pos
    at = {x: v[k] for k, x in enumerate(nl.nodes)}
    total = to_scalar(0, mode)
    for b in nl.branches:
        if node not in b.nodes:
            continue
        if b.kind != ElementKind.DIRECT:
            raise NonDirectBranchError(f"branch '{b.name}' is not evaluated")
        flow = to_scalar(b.y, mode) * (at[b.head] - at[b.tail])
        total = total + (flow if b.head == node else -flow)
    for s in nl.sources:
        if s.name == name:
            continue
        if s.is_dependent and node in (s.pos, s.neg):
            raise PreconditionViolatedError(f"node '{node}' carries the output of dependent source '{s.name}'")
        if s.kind == SourceKind.ISRC:
            value = to_scalar(s.value, mode)
            if s.pos == node:
                total = total - value
            elif s.neg == node:
                total = total + value
        elif node in (s.pos, s.neg):
            raise PreconditionViolatedError(f"node '{node}' also carries vsrc '{s.name}'")
    return total


def absorbed_currents(
    original: Netlist, v: Sequence[Any], record: VoltageElimination, mode: ScalarMode = ScalarMode.FLOAT64
) -> Dict[str, Any]:
    """Post-solve currents of the elements absorbed by an eliminated source, head to tail"""
    at = {x: v[k] for k, x in enumerate(original.nodes)}
    out: Dict[str, Any] = {}
    for name in record.absorbed_branches:
        b = original.branch(name)
        out[name] = to_scalar(b.y, mode) * (at[b.head] - at[b.tail])
    for name in record.absorbed_sources:
        out[name] = to_scalar(original.source(name).value, mode)
    return out


# -------------------------
# 4) Dependent sources
# -------------------------

def _stamp(M: np.ndarray, j: int, k: int, p: int, q: int, gain: Any) -> None:
    """Y_jp, Y_kq += gain; Y_jq, Y_kp -= gain (0-based)"""
    M[j, p] = M[j, p] + gain
    M[k, q] = M[k, q] + gain
    M[j, q] = M[j, q] - gain
    M[k, p] = M[k, p] - gain


def _control(nl: Netlist, src: Source, mode: ScalarMode) -> Tuple[int, int, Any]:
    """Control node pair (0-based) and the admittance scaling the gain"""
    if src.kind in CURRENT_CONTROLLED:
        b = nl.branch(src.ctrl_branch)
        if b.kind != ElementKind.DIRECT:
            raise NonDirectBranchError(f"control branch '{b.name}' of '{src.name}' is not evaluated")
        return nl.index_of(b.head) - 1, nl.index_of(b.tail) - 1, to_scalar(b.y, mode)
    return nl.index_of(src.ctrl_pos) - 1, nl.index_of(src.ctrl_neg) - 1, to_scalar(1, mode)


def stamp_dependent(Y: MatrixLike, nl: Netlist, source: Any) -> MatrixLike:
    """
    Stamp one dependent source. Current outputs use terminals (pos, neg)
    directly; voltage outputs add their series admittance y_s between pos
    and neg and stamp the equivalent current source on (neg, pos) with the
    gain scaled by y_s. Row and column sums stay zero.
    """
    src = source if isinstance(source, Source) else nl.source(source)
    if not src.is_dependent:
        raise PreconditionViolatedError(f"source '{src.name}' is not a dependent source")
    M = (Y.Y if isinstance(Y, AdmittanceMatrix) else Y).copy()
    mode = mode_of(M)
    a, b = nl.index_of(src.pos) - 1, nl.index_of(src.neg) - 1
    p, q, scale = _control(nl, src, mode)
    gain = to_scalar(src.value, mode) * scale
    if src.kind in VOLTAGE_OUTPUT:
        if src.series is None or is_zero(src.series):
            raise MissingSeriesAdmittanceError(f"source '{src.name}' needs a nonzero series admittance")
        y_s = to_scalar(src.series, mode)
        _stamp(M, a, b, a, b, y_s)
        _stamp(M, b, a, p, q, gain * y_s)
    else:
        _stamp(M, a, b, p, q, gain)
    logger.debug(f"Stamped {src.kind.value} '{src.name}' with gain {gain}")
    return Y.with_matrix(M) if isinstance(Y, AdmittanceMatrix) else M


def stamp_all_dependent(Y: MatrixLike, nl: Netlist) -> MatrixLike:
    for src in nl.sources:
        if src.is_dependent:
            Y = stamp_dependent(Y, nl, src)
    return Y


def passive_part(nl: Netlist) -> Netlist:
    """The netlist with dependent sources removed"""
    return _rebuild(nl, sources=[s for s in nl.sources if not s.is_dependent])


def check_uniqueness(Y: MatrixLike, i: np.ndarray, ground: int, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True when the grounded solve of a stamped matrix succeeds and satisfies Y v = i"""
    try:
        solution = solve_grounded(Y, i, ground, tol)
    except SingularNetworkError:
        return False
    scale = max([abs(complex(x)) for x in i] + [1.0])
    return solution.residual <= max(tol.rel_tol * scale, tol.abs_tol)
