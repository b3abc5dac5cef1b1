import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .admittance import AdmittanceMatrix, build
from .config import DEFAULT_MODE
from .errors import NetKitError
from .models import Netlist, SourceKind
from .netlist import eval_elements
from .scalar import DEFAULT_TOLERANCE, ScalarMode, Tolerance
from .solve import (
    GroundedSolution,
    branch_voltages_currents,
    driving_point_impedance,
    injection_vector,
    solve_grounded,
    transfer_impedance,
)
from .sources import (
    VoltageElimination,
    absorbed_currents,
    eliminate_voltage_sources,
    restore_voltages,
    source_current,
    stamp_all_dependent,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AnalysisResult:
    """Node voltages of the original netlist plus the derived branch and source currents"""

    nodes: Tuple[str, ...]
    ground: str
    v: np.ndarray
    residual: float
    branches: List[Tuple[str, Any, Any]]
    source_currents: Dict[str, Any] = field(default_factory=dict)
    absorbed: Dict[str, Any] = field(default_factory=dict)
    eliminations: Tuple[VoltageElimination, ...] = ()

    def voltage(self, node: str) -> Any:
        return self.v[self.nodes.index(node)]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "ground": self.ground,
            "voltages": {name: self.v[k] for k, name in enumerate(self.nodes)},
            "branches": [
                {"name": name, "voltage": drop, "current": current}
                for name, drop, current in self.branches
            ],
            "source_currents": dict(self.source_currents),
            "absorbed_currents": dict(self.absorbed),
            "eliminated_sources": [e.source for e in self.eliminations],
        }


class NetworkAnalyzer:
    """
    Pipeline from a parsed netlist to node voltages: evaluate elements at s,
    eliminate voltage sources, build Y, stamp dependent sources, solve the
    grounded system and restore the eliminated nodes.
    """

    def __init__(
        self,
        netlist: Netlist,
        mode: Optional[ScalarMode] = None,
        tolerance: Tolerance = DEFAULT_TOLERANCE,
    ):
        self.netlist = netlist
        self.mode = mode or ScalarMode(DEFAULT_MODE)
        self.tolerance = tolerance
        self._evaluated: Optional[Netlist] = None
        self._reduced: Optional[Tuple[Netlist, Tuple[VoltageElimination, ...]]] = None

    # ----------------------------
    # Pipeline stages
    # ----------------------------
    @property
    def evaluated(self) -> Netlist:
        """The netlist with every (g,c,r,l) branch replaced by its admittance at s"""
        if self._evaluated is None:
            self._evaluated = eval_elements(self.netlist, self.netlist.s_point, self.tolerance)
            logger.info(f"Evaluated {len(self.netlist.branches)} branch(es) at s={self.netlist.s_point}")
        return self._evaluated

    def reduce(self) -> Tuple[Netlist, Tuple[VoltageElimination, ...]]:
        """Netlist with every voltage source replaced by current sources"""
        if self._reduced is None:
            self._reduced = eliminate_voltage_sources(self.evaluated)
            logger.info(f"Eliminated {len(self._reduced[1])} voltage source(s)")
        return self._reduced

    def admittance(self, netlist: Optional[Netlist] = None) -> AdmittanceMatrix:
        """Y of ``netlist`` (default: the evaluated netlist) with dependent sources stamped"""
        nl = netlist if netlist is not None else self.evaluated
        return stamp_all_dependent(build(nl, self.mode), nl)

    def grounded(self, ground: Any = None) -> Tuple[Netlist, GroundedSolution]:
        """Grounded solution of the reduced netlist; ``ground`` must survive the reduction"""
        reduced, _ = self.reduce()
        k = reduced.resolve_node(ground) if ground is not None else 1
        Y = self.admittance(reduced)
        return reduced, solve_grounded(Y, injection_vector(reduced, self.mode), k, self.tolerance)

    def solve(self, ground: Any = None) -> AnalysisResult:
        original = self.evaluated
        reduced, eliminations = self.reduce()
        ground_name = original.name_of(original.resolve_node(ground)) if ground is not None else original.nodes[0]

        _, solution = self.grounded()
        v = restore_voltages(solution.v, reduced, eliminations, original)
        offset = v[original.index_of(ground_name) - 1]
        v = np.array([x - offset for x in v], dtype=v.dtype)
        logger.info(f"Solved {original.n} node(s), ground '{ground_name}', residual {solution.residual:.3e}")

        currents: Dict[str, Any] = {}
        for s in original.sources:
            if s.kind != SourceKind.VSRC:
                continue
            try:
                currents[s.name] = source_current(original, v, s.name, self.mode)
            except NetKitError as e:
                logger.warning(f"No current reported for '{s.name}': {e}")
        absorbed: Dict[str, Any] = {}
        for record in eliminations:
            absorbed.update(absorbed_currents(original, v, record, self.mode))

        return AnalysisResult(
            nodes=original.nodes,
            ground=ground_name,
            v=v,
            residual=solution.residual,
            branches=branch_voltages_currents(original, v, self.mode),
            source_currents=currents,
            absorbed=absorbed,
            eliminations=eliminations,
        )

    # ----------------------------
    # Impedance views
    # ----------------------------
    def _passive_matrix(self) -> AdmittanceMatrix:
        if any(s.kind == SourceKind.VSRC for s in self.netlist.sources):
            logger.warning("Voltage sources are ignored for impedance queries")
        return self.admittance()

    def impedance(self, j: Any, k: Any) -> Any:
        nl = self.evaluated
        a, b = nl.resolve_node(j), nl.resolve_node(k)
        return driving_point_impedance(self._passive_matrix(), a, b, self.tolerance)

    def transfer(self, p: Any, q: Any, j: Any, k: Any) -> Any:
        nl = self.evaluated
        idx = [nl.resolve_node(x) for x in (p, q, j, k)]
        return transfer_impedance(self._passive_matrix(), *idx, self.tolerance)

