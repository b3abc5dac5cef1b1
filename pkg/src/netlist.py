"""
Line-oriented netlist format.

Supported statements (``#`` starts a comment)::

    node NAME
    branch NAME A B y=CPLX                  # direct admittance, current flows A -> B
    branch NAME A B [g=R] [c=R] [r=R] [l=R] # y(s) = (g + s c) / (r + s l)
    isrc NAME Q P i=CPLX                    # current source from Q to P
    vsrc NAME P Q v=CPLX                    # v_P - v_Q = V
    vccs NAME J K ctrl=P,Q gain=CPLX
    cccs NAME J K ctrl=BRANCH gain=CPLX
    vcvs NAME P Q ctrl=A,B gain=CPLX series=CPLX
    ccvs NAME P Q ctrl=BRANCH gain=CPLX series=CPLX
    omega REAL
    sigma REAL

REAL accepts decimals, exponents and exact rationals ``p/q``. CPLX is a REAL,
a pure imaginary ``REALj`` or ``REAL±REALj``. Every literal is stored
exactly; float mode converts on use.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError

from .errors import (
    DuplicateNameError,
    InvalidGCRLError,
    NetlistSyntaxError,
    NonDirectBranchError,
    PoleAtSError,
    PreconditionViolatedError,
    UnknownBranchError,
    UnknownNodeError,
)
from .models import (
    GCRL,
    Branch,
    ElementKind,
    Netlist,
    Source,
    SourceKind,
    VOLTAGE_OUTPUT,
    gcrl_violation,
)
from .scalar import (
    DEFAULT_TOLERANCE,
    ExactComplex,
    ScalarMode,
    Scalar,
    Tolerance,
    format_fraction,
    format_literal,
    parse_complex,
    parse_real,
    to_scalar,
)

logger = logging.getLogger(__name__)

# ────────────────────────────────────────────────────────────────
# Tokenizer
# ────────────────────────────────────────────────────────────────

_TOKEN_RE = re.compile(r"\S+")
_IDENT_RE = re.compile(r"^[A-Za-z0-9_.\-+]+$")
_KEYWORDS = {"node", "branch", "omega", "sigma"} | {k.value for k in SourceKind}
_SOURCE_VALUE_KEY = {
    SourceKind.ISRC: "i",
    SourceKind.VSRC: "v",
    SourceKind.VCCS: "gain",
    SourceKind.CCCS: "gain",
    SourceKind.VCVS: "gain",
    SourceKind.CCVS: "gain",
}


@dataclass(frozen=True)
class _Token:
    text: str
    col: int


@dataclass
class _Draft:
    """Mutable accumulator used while reading statements"""
    nodes: List[str]
    declared: Dict[str, int]
    branches: List[Branch]
    sources: List[Source]
    omega: Optional[Fraction] = None
    sigma: Optional[Fraction] = None


def _tokens(line: str) -> List[_Token]:
    body = line.split("#", 1)[0]
    return [_Token(m.group(0), m.start() + 1) for m in _TOKEN_RE.finditer(body)]


# ────────────────────────────────────────────────────────────────
# Parser
# ────────────────────────────────────────────────────────────────

def parse(text: str) -> Netlist:
    """Parse netlist text into a validated :class:`Netlist`"""
    draft = _Draft(nodes=[], declared={}, branches=[], sources=[])
    pending_refs: List[Tuple[int, _Token, str]] = []
    names: Dict[str, Dict[str, int]] = {"branch": {}, "source": {}}

    for line_no, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        keyword = toks[0].text.lower()
        if keyword not in _KEYWORDS:
            raise NetlistSyntaxError(line_no, toks[0].col, f"unknown statement '{toks[0].text}'")

        if keyword == "node":
            _expect_count(toks, 2, line_no, "node NAME")
            name = _ident(toks[1], line_no)
            if name in draft.declared:
                raise DuplicateNameError(f"line {line_no}: node '{name}' declared twice")
            draft.declared[name] = line_no
            _touch(draft, name)
        elif keyword in ("omega", "sigma"):
            _expect_count(toks, 2, line_no, f"{keyword} REAL")
            setattr(draft, keyword, _real(toks[1], line_no))
        elif keyword == "branch":
            branch = _parse_branch(toks, line_no, draft)
            _claim(names["branch"], branch.name, line_no, "branch")
            draft.branches.append(branch)
        else:
            source, refs = _parse_source(SourceKind(keyword), toks, line_no, draft)
            _claim(names["source"], source.name, line_no, "source")
            draft.sources.append(source)
            pending_refs.extend(refs)

    for line_no, tok, kind in pending_refs:
        if kind == "node" and tok.text not in draft.nodes:
            raise UnknownNodeError(f"line {line_no}, col {tok.col}: unknown node '{tok.text}'")
        if kind == "branch" and tok.text not in names["branch"]:
            raise UnknownBranchError(f"line {line_no}, col {tok.col}: unknown branch '{tok.text}'")

    if draft.branches and len(draft.nodes) < 2:
        raise NetlistSyntaxError(1, 1, "a netlist with branches needs at least 2 nodes")

    try:
        nl = Netlist(
            nodes=tuple(draft.nodes),
            branches=tuple(draft.branches),
            sources=tuple(draft.sources),
            omega=draft.omega,
            sigma=draft.sigma,
        )
    except ValidationError as e:
        raise NetlistSyntaxError(1, 1, _first_error(e)) from e
    logger.debug(f"Parsed netlist: {nl.n} nodes, {len(nl.branches)} branches, {len(nl.sources)} sources")
    return nl


def load_netlist(path: Union[str, Path]) -> Netlist:
    return parse(Path(path).read_text(encoding="utf-8"))


def _parse_branch(toks: List[_Token], line_no: int, draft: _Draft) -> Branch:
    if len(toks) < 5:
        col = toks[-1].col + len(toks[-1].text)
        raise NetlistSyntaxError(line_no, col, "expected: branch NAME A B y=CPLX | g= c= r= l=")
    name = _ident(toks[1], line_no)
    head, tail = _ident(toks[2], line_no), _ident(toks[3], line_no)
    if head == tail:
        raise NetlistSyntaxError(line_no, toks[3].col, f"branch '{name}' is a self-loop")
    fields = _key_values(toks[4:], line_no, allowed={"y", "g", "c", "r", "l"})
    _touch(draft, head)
    _touch(draft, tail)

    if "y" in fields:
        if len(fields) > 1:
            tok = next(t for k, t in fields.items() if k != "y")
            raise NetlistSyntaxError(line_no, tok[1].col, "y= cannot be combined with g/c/r/l")
        return Branch(name=name, head=head, tail=tail, y=_cplx(fields["y"], line_no))

    values = {k: _real(fields[k], line_no) if k in fields else Fraction(0) for k in "gcrl"}
    reason = gcrl_violation(values["g"], values["c"], values["r"], values["l"])
    if reason:
        raise InvalidGCRLError(f"line {line_no}: branch '{name}': {reason}")
    return Branch(name=name, head=head, tail=tail, gcrl=GCRL(**values))


def _parse_source(
    kind: SourceKind, toks: List[_Token], line_no: int, draft: _Draft
) -> Tuple[Source, List[Tuple[int, _Token, str]]]:
    if len(toks) < 5:
        col = toks[-1].col + len(toks[-1].text)
        raise NetlistSyntaxError(line_no, col, f"incomplete {kind.value} statement")
    name = _ident(toks[1], line_no)
    first, second = _ident(toks[2], line_no), _ident(toks[3], line_no)
    if first == second:
        raise NetlistSyntaxError(line_no, toks[3].col, f"source '{name}' has both terminals on '{first}'")

    value_key = _SOURCE_VALUE_KEY[kind]
    allowed = {value_key}
    if kind not in (SourceKind.ISRC, SourceKind.VSRC):
        allowed.add("ctrl")
    if kind in VOLTAGE_OUTPUT:
        allowed.add("series")
    fields = _key_values(toks[4:], line_no, allowed=allowed)
    if value_key not in fields:
        raise NetlistSyntaxError(line_no, toks[-1].col, f"{kind.value} '{name}' needs {value_key}=")

    _touch(draft, first)
    _touch(draft, second)
    # isrc lists the tail first: "isrc NAME Q P" injects at P
    pos, neg = (second, first) if kind == SourceKind.ISRC else (first, second)
    data: Dict[str, Any] = {
        "name": name,
        "kind": kind,
        "pos": pos,
        "neg": neg,
        "value": _cplx(fields[value_key], line_no),
    }
    refs: List[Tuple[int, _Token, str]] = []

    if "ctrl" in allowed:
        if "ctrl" not in fields:
            raise NetlistSyntaxError(line_no, toks[-1].col, f"{kind.value} '{name}' needs ctrl=")
        key_tok, val_tok = fields["ctrl"]
        parts = val_tok.text.split(",")
        if kind in (SourceKind.VCCS, SourceKind.VCVS):
            if len(parts) != 2 or not all(parts):
                raise NetlistSyntaxError(line_no, val_tok.col, "ctrl= expects two node names P,Q")
            data["ctrl_pos"], data["ctrl_neg"] = parts
            offset = len(parts[0]) + 1
            refs.append((line_no, _Token(parts[0], val_tok.col), "node"))
            refs.append((line_no, _Token(parts[1], val_tok.col + offset), "node"))
        else:
            if len(parts) != 1 or not parts[0]:
                raise NetlistSyntaxError(line_no, val_tok.col, "ctrl= expects one branch name")
            data["ctrl_branch"] = parts[0]
            refs.append((line_no, _Token(parts[0], val_tok.col), "branch"))
    if "series" in fields:
        data["series"] = _cplx(fields["series"], line_no)
    return Source(**data), refs


# ----------------------------
# Internal helpers
# ----------------------------

def _touch(draft: _Draft, name: str) -> None:
    if name not in draft.nodes:
        draft.nodes.append(name)


def _claim(registry: Dict[str, int], name: str, line_no: int, label: str) -> None:
    if name in registry:
        raise DuplicateNameError(
            f"line {line_no}: {label} '{name}' already defined on line {registry[name]}"
        )
    registry[name] = line_no


def _expect_count(toks: List[_Token], count: int, line_no: int, usage: str) -> None:
    if len(toks) != count:
        tok = toks[min(len(toks), count) - 1] if len(toks) > count else toks[-1]
        col = tok.col if len(toks) > count else tok.col + len(tok.text)
        raise NetlistSyntaxError(line_no, col, f"expected: {usage}")


def _ident(tok: _Token, line_no: int) -> str:
    if not _IDENT_RE.match(tok.text) or "=" in tok.text:
        raise NetlistSyntaxError(line_no, tok.col, f"invalid name '{tok.text}'")
    return tok.text


def _key_values(
    toks: Sequence[_Token], line_no: int, allowed: set
) -> Dict[str, Tuple[_Token, _Token]]:
    fields: Dict[str, Tuple[_Token, _Token]] = {}
    for tok in toks:
        key, sep, value = tok.text.partition("=")
        key = key.lower()
        if not sep or not value:
            raise NetlistSyntaxError(line_no, tok.col, f"expected key=value, got '{tok.text}'")
        if key not in allowed:
            raise NetlistSyntaxError(line_no, tok.col, f"unexpected field '{key}='")
        if key in fields:
            raise NetlistSyntaxError(line_no, tok.col, f"field '{key}=' given twice")
        fields[key] = (tok, _Token(value, tok.col + len(key) + 1))
    return fields


def _real(item: Union[_Token, Tuple[_Token, _Token]], line_no: int) -> Fraction:
    tok = item[1] if isinstance(item, tuple) else item
    try:
        return parse_real(tok.text)
    except ValueError as e:
        raise NetlistSyntaxError(line_no, tok.col, str(e)) from None


def _cplx(item: Tuple[_Token, _Token], line_no: int) -> ExactComplex:
    tok = item[1]
    try:
        return parse_complex(tok.text)
    except ValueError as e:
        raise NetlistSyntaxError(line_no, tok.col, str(e)) from None


def _first_error(e: ValidationError) -> str:
    errors = e.errors()
    return errors[0]["msg"] if errors else str(e)


# ────────────────────────────────────────────────────────────────
# Serializer
# ────────────────────────────────────────────────────────────────

def serialize(nl: Netlist) -> str:
    """Emit the netlist in the text format; parse(serialize(nl)) == nl"""
    lines = [f"node {name}" for name in nl.nodes]
    if nl.omega is not None:
        lines.append(f"omega {format_fraction(nl.omega)}")
    if nl.sigma is not None:
        lines.append(f"sigma {format_fraction(nl.sigma)}")
    for b in nl.branches:
        if b.kind == ElementKind.DIRECT:
            elem = f"y={format_literal(b.y)}"
        else:
            parts = [
                f"{k}={format_fraction(getattr(b.gcrl, k))}"
                for k in "gcrl"
                if getattr(b.gcrl, k) != 0
            ]
            elem = " ".join(parts)
        lines.append(f"branch {b.name} {b.head} {b.tail} {elem}")
    for s in nl.sources:
        key = _SOURCE_VALUE_KEY[s.kind]
        if s.kind == SourceKind.ISRC:
            head = f"isrc {s.name} {s.neg} {s.pos}"
        else:
            head = f"{s.kind.value} {s.name} {s.pos} {s.neg}"
        parts = [head]
        if s.ctrl_branch:
            parts.append(f"ctrl={s.ctrl_branch}")
        elif s.ctrl_pos:
            parts.append(f"ctrl={s.ctrl_pos},{s.ctrl_neg}")
        parts.append(f"{key}={format_literal(s.value)}")
        if s.series is not None:
            parts.append(f"series={format_literal(s.series)}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


# ────────────────────────────────────────────────────────────────
# Element evaluation and editing
# ────────────────────────────────────────────────────────────────

def element_admittance(gcrl: GCRL, s: Any, tol: Tolerance = DEFAULT_TOLERANCE) -> Scalar:
    """y(s) = (g + s c) / (r + s l); exact when ``s`` is exact"""
    exact = isinstance(s, (ExactComplex, Fraction, int))
    if exact:
        s = ExactComplex.coerce(s)
        den = s * gcrl.l + gcrl.r
        if den == 0:
            raise ZeroDivisionError
        return (s * gcrl.c + gcrl.g) / den
    s = complex(s)
    den = float(gcrl.r) + s * float(gcrl.l)
    if abs(den) <= tol.abs_tol:
        raise ZeroDivisionError
    return (float(gcrl.g) + s * float(gcrl.c)) / den


def eval_elements(nl: Netlist, s: Any, tol: Tolerance = DEFAULT_TOLERANCE) -> Netlist:
    """Replace every (g,c,r,l) branch by its admittance at ``s``"""
    if nl.all_direct:
        return nl
    if s is None:
        raise PreconditionViolatedError("GCRL branches need an evaluation point (omega/sigma)")
    branches = []
    for b in nl.branches:
        if b.kind == ElementKind.GCRL:
            try:
                y = element_admittance(b.gcrl, s, tol)
            except ZeroDivisionError:
                raise PoleAtSError(b.name) from None
            b = Branch(name=b.name, head=b.head, tail=b.tail, y=y)
        branches.append(b)
    return _rebuild(nl, branches=branches)


def branch_admittances(nl: Netlist, mode: ScalarMode) -> Dict[str, Scalar]:
    out: Dict[str, Scalar] = {}
    for b in nl.branches:
        if b.kind != ElementKind.DIRECT:
            raise NonDirectBranchError(f"branch '{b.name}' is not evaluated; run eval_elements first")
        out[b.name] = to_scalar(b.y, mode)
    return out


def _rebuild(nl: Netlist, **changes: Any) -> Netlist:
    data = {
        "nodes": nl.nodes,
        "branches": nl.branches,
        "sources": nl.sources,
        "omega": nl.omega,
        "sigma": nl.sigma,
    }
    data.update(changes)
    return Netlist(**data)


def delete_branch(nl: Netlist, name: str) -> Netlist:
    nl.branch(name)
    for s in nl.sources:
        if s.ctrl_branch == name:
            raise PreconditionViolatedError(f"branch '{name}' controls source '{s.name}'")
    return _rebuild(nl, branches=[b for b in nl.branches if b.name != name])


def add_branch(nl: Netlist, name: str, head: str, tail: str, y: Any) -> Netlist:
    for node in (head, tail):
        nl.index_of(node)
    return _rebuild(nl, branches=list(nl.branches) + [Branch(name=name, head=head, tail=tail, y=y)])


def contract_netlist(nl: Netlist, j: Any, k: Any, keep: Any = None) -> Netlist:
    """Identify nodes j and k; the lower-indexed name survives unless ``keep`` names the other"""
    jj, kk = sorted((nl.resolve_node(j), nl.resolve_node(k)))
    if jj == kk:
        raise PreconditionViolatedError("contraction needs two distinct nodes")
    keep_name, drop = nl.name_of(jj), nl.name_of(kk)
    if keep is not None and nl.resolve_node(keep) == kk:
        keep_name, drop = drop, keep_name

    def ren(name: Optional[str]) -> Optional[str]:
        return keep_name if name == drop else name

    branches = []
    for b in nl.branches:
        if {b.head, b.tail} == {keep_name, drop}:
            continue
        branches.append(b.model_copy(update={"head": ren(b.head), "tail": ren(b.tail)}))
    kept_names = {b.name for b in branches}
    sources = []
    for s in nl.sources:
        if s.ctrl_branch and s.ctrl_branch not in kept_names:
            raise PreconditionViolatedError(f"contraction removes branch controlling '{s.name}'")
        moved = s.model_copy(update={
            "pos": ren(s.pos),
            "neg": ren(s.neg),
            "ctrl_pos": ren(s.ctrl_pos),
            "ctrl_neg": ren(s.ctrl_neg),
        })
        if moved.pos == moved.neg:
            logger.debug(f"Source '{s.name}' shorted by contraction; dropped")
            continue
        sources.append(moved)
    nodes = [name for name in nl.nodes if name != drop]
    return _rebuild(nl, nodes=nodes, branches=branches, sources=sources)
