from __future__ import annotations

import numbers
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import UnknownBranchError, UnknownNodeError, UnknownSourceError
from .scalar import ExactComplex, ScalarMode, Tolerance, parse_complex, parse_real


# -------------------------
# 1) Netlist elements
# -------------------------

class ElementKind(str, Enum):
    DIRECT = "direct"
    GCRL = "gcrl"


class SourceKind(str, Enum):
    ISRC = "isrc"
    VSRC = "vsrc"
    VCCS = "vccs"
    CCCS = "cccs"
    VCVS = "vcvs"
    CCVS = "ccvs"


VOLTAGE_CONTROLLED = {SourceKind.VCCS, SourceKind.VCVS}
CURRENT_CONTROLLED = {SourceKind.CCCS, SourceKind.CCVS}
VOLTAGE_OUTPUT = {SourceKind.VCVS, SourceKind.CCVS}
DEPENDENT = VOLTAGE_CONTROLLED | CURRENT_CONTROLLED


def _to_fraction(v: Any) -> Fraction:
    if isinstance(v, str):
        return parse_real(v)
    if isinstance(v, ExactComplex):
        if v.im:
            raise ValueError(f"expected a real value, got {v}")
        return v.re
    return Fraction(v)


def _to_scalar(v: Any) -> Any:
    if isinstance(v, str):
        return parse_complex(v)
    if isinstance(v, numbers.Rational):
        return ExactComplex(v)
    if isinstance(v, (ExactComplex, numbers.Complex)):
        return v
    raise ValueError(f"not a scalar: {v!r}")


def gcrl_violation(g: Fraction, c: Fraction, r: Fraction, l: Fraction) -> Optional[str]:
    """Reason a (g, c, r, l) quadruple is not a valid element, or None"""
    if min(g, c, r, l) < 0:
        return "g, c, r, l must be nonnegative"
    if g + c == 0:
        return "g + c must be nonzero"
    if r + l == 0:
        return "r + l must be nonzero"
    if l * c != 0 and g * l - r * c == 0:
        return "g*l - r*c must be nonzero when l*c != 0"
    return None


class GCRL(BaseModel):
    """
    Element with admittance y(s) = (g + s*c) / (r + s*l).
    Resistor: (g0, 0, 1, 0); capacitor: (0, C, 1, 0); inductor: (1, 0, 0, L).
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    g: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    r: Fraction = Fraction(0)
    l: Fraction = Fraction(0)

    @field_validator("g", "c", "r", "l", mode="before")
    @classmethod
    def coerce_real(cls, v: Any) -> Fraction:
        return _to_fraction(v)

    @model_validator(mode="after")
    def check_constraints(self) -> "GCRL":
        reason = gcrl_violation(self.g, self.c, self.r, self.l)
        if reason:
            raise ValueError(reason)
        return self


class Branch(BaseModel):
    """Oriented branch: current y*(v_head - v_tail) flows from head to tail"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str = Field(..., min_length=1)
    head: str = Field(..., min_length=1)
    tail: str = Field(..., min_length=1)
    y: Optional[Any] = None
    gcrl: Optional[GCRL] = None

    @field_validator("y", mode="before")
    @classmethod
    def coerce_y(cls, v: Any) -> Any:
        return None if v is None else _to_scalar(v)

    @model_validator(mode="after")
    def check_branch(self) -> "Branch":
        if self.head == self.tail:
            raise ValueError(f"branch '{self.name}' is a self-loop on '{self.head}'")
        if (self.y is None) == (self.gcrl is None):
            raise ValueError(f"branch '{self.name}' needs exactly one of y or (g,c,r,l)")
        return self

    @property
    def kind(self) -> ElementKind:
        return ElementKind.DIRECT if self.y is not None else ElementKind.GCRL

    @property
    def nodes(self) -> Tuple[str, str]:
        return (self.head, self.tail)


class Source(BaseModel):
    """
    Independent or dependent source.

    isrc: current ``value`` directed from ``neg`` to ``pos`` (injects at pos).
    vsrc: v_pos - v_neg = ``value``.
    vccs/cccs: output terminals pos (j), neg (k); gain in ``value``.
    vcvs/ccvs: output terminals pos (p), neg (q) behind ``series`` admittance.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str = Field(..., min_length=1)
    kind: SourceKind
    pos: str
    neg: str
    value: Any
    ctrl_pos: Optional[str] = None
    ctrl_neg: Optional[str] = None
    ctrl_branch: Optional[str] = None
    series: Optional[Any] = None

    @field_validator("value", "series", mode="before")
    @classmethod
    def coerce_value(cls, v: Any) -> Any:
        return None if v is None else _to_scalar(v)

    @model_validator(mode="after")
    def check_source(self) -> "Source":
        if self.pos == self.neg:
            raise ValueError(f"source '{self.name}' has both terminals on '{self.pos}'")
        if self.kind in VOLTAGE_CONTROLLED and not (self.ctrl_pos and self.ctrl_neg):
            raise ValueError(f"source '{self.name}' needs ctrl=P,Q")
        if self.kind in CURRENT_CONTROLLED and not self.ctrl_branch:
            raise ValueError(f"source '{self.name}' needs ctrl=BRANCH")
        return self

    @property
    def is_dependent(self) -> bool:
        return self.kind in DEPENDENT

    def referenced_nodes(self) -> Tuple[str, ...]:
        nodes = [self.pos, self.neg]
        if self.ctrl_pos:
            nodes += [self.ctrl_pos, self.ctrl_neg]
        return tuple(nodes)


# -------------------------
# 2) Netlist
# -------------------------

class Netlist(BaseModel):
    """
    Complete network description. Node indices are 1-based positions in
    ``nodes`` (order of first appearance in the source text).
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nodes: Tuple[str, ...] = ()
    branches: Tuple[Branch, ...] = ()
    sources: Tuple[Source, ...] = ()
    omega: Optional[Fraction] = None
    sigma: Optional[Fraction] = None

    @field_validator("omega", "sigma", mode="before")
    @classmethod
    def coerce_frequency(cls, v: Any) -> Optional[Fraction]:
        return None if v is None else _to_fraction(v)

    @model_validator(mode="after")
    def check_names(self) -> "Netlist":
        for label, names in (
            ("node", self.nodes),
            ("branch", [b.name for b in self.branches]),
            ("source", [s.name for s in self.sources]),
        ):
            seen = set()
            for name in names:
                if name in seen:
                    raise ValueError(f"duplicate {label} name '{name}'")
                seen.add(name)
        known = set(self.nodes)
        for b in self.branches:
            for node in b.nodes:
                if node not in known:
                    raise ValueError(f"branch '{b.name}' references unknown node '{node}'")
        branch_names = {b.name for b in self.branches}
        for s in self.sources:
            for node in s.referenced_nodes():
                if node not in known:
                    raise ValueError(f"source '{s.name}' references unknown node '{node}'")
            if s.ctrl_branch and s.ctrl_branch not in branch_names:
                raise ValueError(f"source '{s.name}' references unknown branch '{s.ctrl_branch}'")
        if self.branches and len(self.nodes) < 2:
            raise ValueError("a netlist with branches needs at least 2 nodes")
        return self

    @property
    def n(self) -> int:
        return len(self.nodes)

    def index_of(self, name: str) -> int:
        try:
            return self.nodes.index(name) + 1
        except ValueError:
            raise UnknownNodeError(f"unknown node '{name}'") from None

    def name_of(self, index: int) -> str:
        if not 1 <= index <= self.n:
            raise UnknownNodeError(f"node index {index} outside [1, {self.n}]")
        return self.nodes[index - 1]

    def resolve_node(self, ref: Any) -> int:
        """Accept a node name or a 1-based index (int or digit string not used as a name)"""
        if isinstance(ref, int):
            self.name_of(ref)
            return ref
        ref = str(ref)
        if ref in self.nodes:
            return self.index_of(ref)
        if ref.isdigit():
            return self.resolve_node(int(ref))
        raise UnknownNodeError(f"unknown node '{ref}'")

    def branch(self, name: str) -> Branch:
        for b in self.branches:
            if b.name == name:
                return b
        raise UnknownBranchError(f"unknown branch '{name}'")

    def source(self, name: str) -> Source:
        for s in self.sources:
            if s.name == name:
                return s
        raise UnknownSourceError(f"unknown source '{name}'")

    def branch_endpoints(self, name: str) -> Tuple[int, int]:
        b = self.branch(name)
        return self.index_of(b.head), self.index_of(b.tail)

    @property
    def all_direct(self) -> bool:
        return all(b.kind == ElementKind.DIRECT for b in self.branches)

    @property
    def s_point(self) -> Optional[ExactComplex]:
        """Evaluation point s = sigma + j*omega, or None when no frequency is set"""
        if self.omega is None and self.sigma is None:
            return None
        return ExactComplex(self.sigma or 0, self.omega or 0)


# -------------------------
# 3) Run configuration and CLI output
# -------------------------

class OutputFormat(str, Enum):
    HUMAN = "human"
    JSON = "json"


class RunConfig(BaseModel):
    """Options shared by every CLI command"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    input_path: Path
    mode: ScalarMode = ScalarMode.FLOAT64
    omega: Optional[Fraction] = None
    sigma: Optional[Fraction] = None
    tolerance: Tolerance = Field(default_factory=Tolerance)
    output_format: OutputFormat = OutputFormat.HUMAN

    @field_validator("omega", "sigma", mode="before")
    @classmethod
    def coerce_frequency(cls, v: Any) -> Optional[Fraction]:
        return None if v is None else _to_fraction(v)


class CommandResult(BaseModel):
    """Stable JSON envelope for every command"""
    command: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    results: Dict[str, Any] = Field(
        default_factory=dict,
        description="Keys are lower snake_case; a key that is exactly a circuit symbol (Y, Z, I, A, B, y, tz) keeps its case",
    )
    residuals: Dict[str, Any] = Field(
        default_factory=dict,
        description="Keys are lower snake_case: the name of the checked identity, or <lhs>_minus_<rhs> for a direct comparison",
    )
    violations: List[Dict[str, Any]] = Field(default_factory=list)
    diagnostics: List[Dict[str, Any]] = Field(default_factory=list)


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "violation" | "warning"
    code: str
    message: str

    def as_dict(self) -> Dict[str, str]:
        return {"severity": self.severity, "code": self.code, "message": self.message}
