"""
Polynomials and rational functions in the Laplace variable s, and the
positive-real test battery for network impedance functions.

Polynomials wrap :class:`sympy.Poly` in ``s``. Coefficients are real: the
domain is QQ when every input is rational (exact gcd, square-free
factorization and root multiplicities) and RR otherwise (tolerance-based
gcd, clustered roots). Rational functions also act as matrix scalars, so
the determinant and cofactor routines of ``linalg`` work on admittance
matrices Y(s) unchanged.
"""

from __future__ import annotations

import cmath
import logging
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from mpmath.libmp.libhyper import NoConvergence
from sympy.polys.domains import QQ, RR

from .config import GCD_TOL, NROOTS_DIGITS, NROOTS_MAXSTEPS, PHASE_TOL, ROOT_CLUSTER_TOL
from .errors import (
    DisconnectedError,
    EqualIndicesError,
    InconsistentSolutionError,
    NotPositiveRealError,
    PreconditionViolatedError,
    RationalDivisionError,
    RootFindingFailedError,
)
from .graph import BranchGraph, is_connected, spanning_trees, tree_pairs
from .linalg import cofactor1, cofactor2
from .models import ElementKind, Netlist
from .scalar import ExactComplex, format_fraction

logger = logging.getLogger(__name__)

Coefficient = Union[Fraction, float]

S = sympy.Symbol("s")
# Sample grid for the contractive angle condition |arg f(s)| <= |arg s|
ANGLE_GRID = tuple(math.pi * k / 24 for k in range(1, 13))
RADIUS_GRID = tuple(10.0 ** (e / 2) for e in range(-6, 7))
# Points where two float rational functions are compared
SAMPLE_POINTS = (0.37 + 0.91j, 1.3 + 0.2j, 2.1 - 0.7j, 0.1 + 3.5j, 0.05 - 0.4j)


def _coef(x: Any) -> Coefficient:
    if isinstance(x, ExactComplex):
        if x.im:
            raise ValueError(f"coefficient {x} is not real")
        return x.re
    if isinstance(x, sympy.Rational):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, numbers.Rational):
        return Fraction(x)
    if isinstance(x, numbers.Real):
        return float(x)
    if isinstance(x, numbers.Complex):
        z = complex(x)
        if z.imag:
            raise ValueError(f"coefficient {z} is not real")
        return z.real
    raise TypeError(f"not a polynomial coefficient: {x!r}")


def _format_coef(c: Coefficient) -> str:
    return format_fraction(c) if isinstance(c, Fraction) else f"{c:.6g}"


# -------------------------
# 1) Polynomials
# -------------------------

class Poly:
    """
    Real polynomial in s backed by :class:`sympy.Poly` over QQ or RR.
    ``coeffs`` lists the coefficients in ascending degree, no trailing zeros.
    """

    __slots__ = ("rep", "coeffs")

    def __init__(self, coeffs: Iterable[Any] = ()):
        values = [_coef(c) for c in coeffs]
        if all(isinstance(c, Fraction) for c in values):
            terms = [QQ(c.numerator, c.denominator) for c in reversed(values)]
            rep = sympy.Poly.from_list(terms or [QQ(0)], S, domain=QQ)
        else:
            rep = sympy.Poly.from_list([float(c) for c in reversed(values)], S, domain=RR)
        self._set(rep)

    def _set(self, rep: sympy.Poly) -> None:
        domain = rep.get_domain()
        if domain.is_ZZ:
            rep = rep.set_domain(QQ)
        elif not (domain.is_QQ or domain.is_RR):
            raise ValueError(f"polynomial {rep.as_expr()} does not have real rational or float coefficients")
        if rep.get_domain().is_QQ:
            coeffs = tuple(Fraction(int(c.p), int(c.q)) for c in reversed(rep.all_coeffs()))
        else:
            coeffs = tuple(float(c) for c in reversed(rep.all_coeffs()))
        if rep.is_zero:
            coeffs = ()
        object.__setattr__(self, "rep", rep)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def wrap(cls, rep: sympy.Poly) -> "Poly":
        out = object.__new__(cls)
        out._set(rep)
        return out

    @classmethod
    def from_sympy(cls, expr: Any) -> "Poly":
        return cls.wrap(sympy.Poly(sympy.sympify(expr), S))

    @classmethod
    def s(cls) -> "Poly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial"""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Coefficient:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    @property
    def is_exact(self) -> bool:
        return self.rep.get_domain().is_Exact

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_float(self) -> "Poly":
        return Poly(float(c) for c in self.coeffs)

    def to_sympy(self) -> sympy.Expr:
        return self.rep.as_expr()

    def _scaled(self, factor: Any) -> "Poly":
        return Poly(c * factor for c in self.coeffs)

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return Poly.wrap(self.rep.monic())

    def derivative(self) -> "Poly":
        return Poly.wrap(self.rep.diff(S))

    def reflected(self) -> "Poly":
        """p(-s)"""
        return self.compose(Poly((0, -1)))

    def __call__(self, s: Any) -> Any:
        # Horner, so s may be any ring element: complex, ExactComplex, Poly or RationalFunction
        if not self.coeffs:
            return s * 0
        acc: Any = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * s + c
        return acc

    def compose(self, other: "Poly") -> "Poly":
        """p(q(s))"""
        o = _as_poly(other)
        if o is None:
            raise TypeError(f"cannot compose with {other!r}")
        return Poly.wrap(self.rep.compose(o.rep))

    # ----------------------------
    # Ring operations
    # ----------------------------
    def __add__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        return Poly.wrap(self.rep + o.rep)

    __radd__ = __add__

    def __neg__(self):
        return Poly.wrap(-self.rep)

    def __sub__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        return Poly.wrap(self.rep - o.rep)

    def __rsub__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        return Poly.wrap(o.rep - self.rep)

    def __mul__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        return Poly.wrap(self.rep * o.rep)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, numbers.Integral) or exponent < 0:
            return NotImplemented
        return Poly.wrap(self.rep ** int(exponent))

    def __divmod__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise RationalDivisionError("polynomial division by zero")
        q, r = self.rep.div(o.rep)
        return Poly.wrap(q), Poly.wrap(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[_format_coef(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms: List[Tuple[str, str]] = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = abs(c)
            body = _format_coef(mag) if (mag != 1 or k == 0) else ""
            power = "" if k == 0 else ("s" if k == 1 else f"s^{k}")
            terms.append(("-" if c < 0 else "+", " ".join(x for x in (body, power) if x)))
        text = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


def _as_poly(x: Any) -> Optional[Poly]:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (numbers.Number, ExactComplex)):
        return Poly((x,))
    return None


def _norm(p: Poly) -> float:
    return max((abs(float(c)) for c in p.coeffs), default=0.0)


def _chop(p: Poly, threshold: float) -> Poly:
    """Drop top-degree float coefficients at or below ``threshold``"""
    if p.is_exact:
        return p
    values = list(p.coeffs)
    while values and abs(values[-1]) <= threshold:
        values.pop()
    return Poly(values)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """
    Monic greatest common divisor. Exact coefficients use sympy's gcd over
    QQ; in float mode Euclid's remainders are treated as zero below GCD_TOL
    relative to the (monic) dividend.
    """
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_exact and b.is_exact:
        return Poly.wrap(a.rep.gcd(b.rep)).monic()
    a, b = a.to_float().monic(), b.to_float().monic()
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        r = _chop(a % b, GCD_TOL * max(_norm(a), 1.0))
        a, b = b, r.monic()
    return a.monic()


def squarefree(p: Poly) -> List[Tuple[Poly, int]]:
    """
    Square-free factorization through sympy's ``sqf_list``: monic factors
    with their multiplicities. Float coefficients are taken at face value.
    """
    if p.degree <= 0:
        return []
    _, factors = p.rep.sqf_list()
    return [(Poly.wrap(f).monic(), k) for f, k in factors if f.degree() > 0]


# ----------------------------
# Root finding
# ----------------------------

@dataclass(frozen=True)
class Root:
    value: complex
    multiplicity: int = 1

    @property
    def on_imaginary_axis(self) -> bool:
        return abs(self.value.real) <= ROOT_CLUSTER_TOL * max(1.0, abs(self.value))

    @property
    def in_right_half_plane(self) -> bool:
        return self.value.real > ROOT_CLUSTER_TOL * max(1.0, abs(self.value))

    @property
    def is_real(self) -> bool:
        return abs(self.value.imag) <= ROOT_CLUSTER_TOL * max(1.0, abs(self.value))


def _factor_roots(p: Poly) -> List[complex]:
    """Roots of a square-free exact polynomial by sympy's ``nroots``"""
    try:
        values = p.rep.nroots(n=NROOTS_DIGITS, maxsteps=NROOTS_MAXSTEPS)
    except NoConvergence as e:
        raise RootFindingFailedError(f"nroots did not converge on a degree {p.degree} polynomial: {e}") from e
    if len(values) != p.degree:
        raise RootFindingFailedError(f"expected {p.degree} roots, got {len(values)}")
    return [complex(z) for z in values]


def _pair_conjugates(zs: Sequence[complex]) -> List[complex]:
    """Snap near-real roots onto the axis and make complex roots exact conjugate pairs"""
    real, upper, lower = [], [], []
    for z in zs:
        slack = ROOT_CLUSTER_TOL * max(1.0, abs(z))
        if abs(z.imag) <= slack:
            real.append(complex(z.real, 0.0))
        elif z.imag > 0:
            upper.append(z)
        else:
            lower.append(z)
    if len(upper) != len(lower):
        logger.debug(f"Unpaired complex roots: {len(upper)} upper vs {len(lower)} lower")
        return real + upper + lower
    paired: List[complex] = []
    for z in upper:
        partner = min(lower, key=lambda w: abs(w - z.conjugate()))
        lower.remove(partner)
        mid = (z + partner.conjugate()) / 2
        paired.extend((mid, mid.conjugate()))
    return real + paired


def _merge(found: Sequence[Root]) -> List[Root]:
    """Fuse roots closer than ROOT_CLUSTER_TOL (relative), adding multiplicities"""
    groups: List[List[Root]] = []
    for root in found:
        for group in groups:
            weight = sum(r.multiplicity for r in group)
            centre = sum(r.value * r.multiplicity for r in group) / weight
            if abs(root.value - centre) <= ROOT_CLUSTER_TOL * max(1.0, abs(centre)):
                group.append(root)
                break
        else:
            groups.append([root])
    out: List[Root] = []
    for group in groups:
        weight = sum(r.multiplicity for r in group)
        out.append(Root(sum(r.value * r.multiplicity for r in group) / weight, weight))
    return out


def root_multiplicities(p: Poly) -> List[Root]:
    """
    Roots with multiplicity, sorted by real then imaginary part.

    The polynomial is split by ``squarefree`` and every factor is solved
    with sympy's ``nroots`` to NROOTS_DIGITS digits. Exact input therefore
    gets exact multiplicities. Float coefficients are split at their binary
    values; roots that rounding has pulled apart by less than
    ROOT_CLUSTER_TOL (relative) are then fused into one multiple root.
    """
    if p.degree <= 0:
        return []
    exact = p if p.is_exact else Poly(Fraction(c) for c in p.coeffs)
    found = [
        Root(z, mult) for factor, mult in squarefree(exact) for z in _pair_conjugates(_factor_roots(factor))
    ]
    if not p.is_exact:
        found = _merge(found)
    return sorted(found, key=lambda r: (r.value.real, r.value.imag))


def roots(p: Poly) -> List[complex]:
    """Roots repeated according to multiplicity"""
    return [r.value for r in root_multiplicities(p) for _ in range(r.multiplicity)]


# -------------------------
# 2) Rational functions
# -------------------------

class RationalFunction:
    """num(s) / den(s) with real coefficients, gcd-reduced, monic denominator"""

    __slots__ = ("num", "den")

    def __init__(self, num: Any = 0, den: Any = 1, reduce: bool = True):
        n, d = _as_poly(num), _as_poly(den)
        if n is None or d is None:
            raise TypeError(f"cannot build a rational function from {num!r} / {den!r}")
        if d.is_zero():
            raise RationalDivisionError("denominator is the zero polynomial")
        if n.is_zero():
            n, d = Poly(), Poly((1,))
        elif reduce and d.degree > 0 and n.degree > 0:
            g = poly_gcd(n, d)
            if g.degree > 0:
                n, d = n // g, d // g
        scale = 1 / d.leading
        object.__setattr__(self, "num", n._scaled(scale))
        object.__setattr__(self, "den", d._scaled(scale))

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def from_sympy(cls, expr: Any) -> "RationalFunction":
        num, den = sympy.fraction(sympy.cancel(sympy.sympify(expr)))
        return cls(Poly.from_sympy(num), Poly.from_sympy(den))

    @classmethod
    def s(cls) -> "RationalFunction":
        return cls(Poly.s())

    def to_sympy(self) -> sympy.Expr:
        return self.num.to_sympy() / self.den.to_sympy()

    @property
    def degree_gap(self) -> int:
        """deg num - deg den (0 for the zero function)"""
        if self.num.is_zero():
            return 0
        return self.num.degree - self.den.degree

    @property
    def is_exact(self) -> bool:
        return self.num.is_exact and self.den.is_exact

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def to_float(self) -> "RationalFunction":
        return RationalFunction(self.num.to_float(), self.den.to_float(), reduce=False)

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise RationalDivisionError("the zero function has no inverse")
        return RationalFunction(self.den, self.num)

    def derivative(self) -> "RationalFunction":
        n, d = self.num, self.den
        return RationalFunction(n.derivative() * d - n * d.derivative(), d * d)

    def __call__(self, s: Any) -> Any:
        try:
            return self.num(s) / self.den(s)
        except ZeroDivisionError:
            raise RationalDivisionError(f"pole at s = {s}") from None

    # ----------------------------
    # Field operations
    # ----------------------------
    def __add__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise RationalDivisionError("division by the zero function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, numbers.Integral):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return RationalFunction(self.num ** int(exponent), self.den ** int(exponent))

    def __eq__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"RationalFunction({self.num!r}, {self.den!r})"

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"


def _as_rf(x: Any) -> Optional[RationalFunction]:
    if isinstance(x, RationalFunction):
        return x
    p = _as_poly(x)
    return None if p is None else RationalFunction(p)


def compose(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    """f(g(s)); exact functions go through sympy's substitution and cancel"""
    f, g = _as_rf(f), _as_rf(g)
    if f is None or g is None:
        raise TypeError("compose expects rational functions")
    if g.den.degree == 0:
        # monic denominator: g is the polynomial g.num
        return RationalFunction(f.num.compose(g.num), f.den.compose(g.num))
    if f.is_exact and g.is_exact:
        return RationalFunction.from_sympy(f.to_sympy().subs(S, g.to_sympy()))
    return _as_rf(f.num(g)) / _as_rf(f.den(g))


def rf_close(f: RationalFunction, g: RationalFunction, rel_tol: float = 1e-7) -> bool:
    """Equality for exact functions, agreement at SAMPLE_POINTS otherwise"""
    f, g = _as_rf(f), _as_rf(g)
    if f.is_exact and g.is_exact:
        return f == g
    for s in SAMPLE_POINTS:
        try:
            a, b = complex(f(s)), complex(g(s))
        except RationalDivisionError:
            continue
        if abs(a - b) > rel_tol * max(1.0, abs(a), abs(b)):
            return False
    return True


def branch_function(g: Any, c: Any, r: Any, l: Any) -> RationalFunction:
    """Element admittance (g + c s) / (r + l s)"""
    return RationalFunction(Poly((g, c)), Poly((r, l)))


# -------------------------
# 3) Poles, zeros and residues
# -------------------------

@dataclass(frozen=True)
class PoleZeroReport:
    poles: Tuple[Root, ...]
    zeros: Tuple[Root, ...]
    residues: Tuple[Tuple[complex, complex], ...]
    degree_gap: int
    leading: float

    def residue_at(self, s: complex) -> Optional[complex]:
        for pole, value in self.residues:
            if abs(pole - s) <= ROOT_CLUSTER_TOL * max(1.0, abs(s)):
                return value
        return None

    @property
    def pole_at_infinity(self) -> int:
        return max(self.degree_gap, 0)

    @property
    def zero_at_infinity(self) -> int:
        return max(-self.degree_gap, 0)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "poles": [{"value": r.value, "multiplicity": r.multiplicity} for r in self.poles],
            "zeros": [{"value": r.value, "multiplicity": r.multiplicity} for r in self.zeros],
            "residues": [{"pole": p, "residue": v} for p, v in self.residues],
            "degree_gap": self.degree_gap,
            "leading": self.leading,
        }


def _simple_residue(num: Poly, den: Poly, z: complex) -> complex:
    """num/den at a simple root z of den: num(z) / den'(z)"""
    return complex(num(z)) / complex(den.derivative()(z))


def poles_zeros(f: RationalFunction) -> PoleZeroReport:
    f = _as_rf(f)
    if f.is_zero():
        raise PreconditionViolatedError("poles and zeros of the zero function are undefined")
    poles = root_multiplicities(f.den)
    zeros = root_multiplicities(f.num)
    residues = tuple(
        (r.value, _simple_residue(f.num, f.den, r.value)) for r in poles if r.multiplicity == 1
    )
    return PoleZeroReport(
        poles=tuple(poles),
        zeros=tuple(zeros),
        residues=residues,
        degree_gap=f.degree_gap,
        leading=float(f.num.leading),
    )


# -------------------------
# 4) Positive-real and reactance tests
# -------------------------

@dataclass(frozen=True)
class PositiveRealVerdict:
    positive_real: bool
    reason: Optional[str] = None
    witness: Optional[complex] = None

    def __bool__(self) -> bool:
        return self.positive_real


def _reject(reason: str, witness: Optional[complex] = None) -> PositiveRealVerdict:
    logger.debug(f"Not positive-real: {reason} (witness {witness})")
    return PositiveRealVerdict(False, reason, witness)


def even_polynomial(f: RationalFunction) -> Poly:
    """
    E(u) with Re f(jw) = E(w^2) / |den(jw)|^2: the even coefficients p_2m of
    num(s) den(-s) taken as sum_m p_2m (-1)^m u^m.
    """
    P = f.num * f.den.reflected()
    return Poly(c if m % 2 == 0 else -c for m, c in enumerate(P.coeffs[::2]))


def _real_positive(value: Optional[complex]) -> bool:
    if value is None:
        return False
    return value.real > 0 and abs(value.imag) <= ROOT_CLUSTER_TOL * max(1.0, abs(value))


def _negative_at(E: Poly, u: float) -> bool:
    if E.is_exact:
        return E(Fraction(u)) < 0
    scale = sum(abs(float(c)) * u ** k for k, c in enumerate(E.coeffs))
    return float(E(u)) < -GCD_TOL * scale


def _first_negative(E: Poly) -> Optional[float]:
    """A point u > 0 with E(u) < 0, or None when E is nonnegative on u >= 0"""
    if E.is_zero():
        return None
    positive = [r for r in root_multiplicities(E) if r.is_real and r.value.real > ROOT_CLUSTER_TOL]
    marks = [r.value.real for r in positive]
    samples = [marks[0] / 2] if marks else [1.0]
    samples += [(a + b) / 2 for a, b in zip(marks, marks[1:])]
    if marks:
        samples.append(marks[-1] + max(1.0, marks[-1]))
    for u in samples:
        if _negative_at(E, u):
            return u
    for r in positive:
        if r.multiplicity % 2:
            return r.value.real
    return None


def _angle_violation(f: RationalFunction) -> Optional[complex]:
    num, den = f.num.to_float(), f.den.to_float()
    scale = max(_norm(num), _norm(den), 1.0)
    for phi in ANGLE_GRID:
        for radius in RADIUS_GRID:
            for sign in (1, -1):
                s = cmath.rect(radius, sign * phi)
                a, b = complex(num(s)), complex(den(s))
                tiny = 1e-12 * scale * max(1.0, radius) ** max(num.degree, den.degree, 0)
                if abs(a) <= tiny or abs(b) <= tiny:
                    continue
                if abs(cmath.phase(a / b)) > phi + PHASE_TOL:
                    return s
    return None


def is_positive_real(f: Any) -> PositiveRealVerdict:
    """
    Brune test for a real rational function. Checks in order: degree gap at
    most 1, no poles or zeros with Re s > 0, simple imaginary-axis poles of f
    and 1/f with real positive residues (infinity included through the
    leading coefficient), Re f(jw) >= 0 through E(u), and the contractive
    angle condition on a sample grid.
    """
    f = _as_rf(f)
    if f is None:
        raise TypeError("is_positive_real expects a rational function")
    if f.is_zero():
        return _reject("identically zero")
    gap = f.degree_gap
    if abs(gap) > 1:
        return _reject(f"numerator and denominator degrees differ by {gap}")
    report = poles_zeros(f)
    for label, found in (("pole", report.poles), ("zero", report.zeros)):
        for root in found:
            if root.in_right_half_plane:
                return _reject(f"{label} in the right half plane", root.value)
    for root in report.poles:
        if not root.on_imaginary_axis:
            continue
        if root.multiplicity > 1:
            return _reject(f"pole of order {root.multiplicity} on the imaginary axis", root.value)
        residue = report.residue_at(root.value)
        if not _real_positive(residue):
            return _reject(f"imaginary-axis pole with residue {residue}", root.value)
    for root in report.zeros:
        if not root.on_imaginary_axis:
            continue
        if root.multiplicity > 1:
            return _reject(f"zero of order {root.multiplicity} on the imaginary axis", root.value)
        residue = _simple_residue(f.den, f.num, root.value)
        if not _real_positive(residue):
            return _reject(f"imaginary-axis zero with 1/f residue {residue}", root.value)
    if f.num.leading <= 0:
        return _reject("negative value at infinity")
    u = _first_negative(even_polynomial(f))
    if u is not None:
        return _reject("negative real part on the imaginary axis", complex(0.0, math.sqrt(u)))
    s = _angle_violation(f)
    if s is not None:
        return _reject("contractive angle condition fails", s)
    return PositiveRealVerdict(True)


@dataclass(frozen=True)
class ReactanceReport:
    reactance: bool
    poles: Tuple[float, ...]
    zeros: Tuple[float, ...]
    interleaved: bool
    increasing: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.reactance


def reactance_at(f: RationalFunction, omega: float) -> float:
    """X(w) = Im f(jw)"""
    return complex(f(1j * omega)).imag


def _alternates(poles: Sequence[float], zeros: Sequence[float]) -> bool:
    tagged = sorted([(w, "pole") for w in poles] + [(w, "zero") for w in zeros])
    return all(a[1] != b[1] for a, b in zip(tagged, tagged[1:]))


def _increasing(f: RationalFunction, critical: Sequence[float]) -> bool:
    # dX/dw = f'(jw) on the imaginary axis
    df = f.derivative().to_float()
    marks = sorted(critical)
    if marks:
        samples = [marks[0] - 1.0] + [(a + b) / 2 for a, b in zip(marks, marks[1:])] + [marks[-1] + 1.0]
    else:
        samples = [-1.0, 1.0]
    return all(complex(df(1j * w)).real > 0 for w in samples)


def _negligible(E: Poly, f: RationalFunction) -> bool:
    if E.is_exact:
        return E.is_zero()
    return _norm(E) <= GCD_TOL * max(_norm(f.num) * _norm(f.den), 1.0)


def is_reactance_function(f: Any) -> ReactanceReport:
    """
    Foster test: Re f(jw) = 0 identically, poles and zeros on the imaginary
    axis interleave, and X(w) is strictly increasing between poles.
    """
    f = _as_rf(f)
    verdict = is_positive_real(f)
    if not verdict:
        raise NotPositiveRealError(f"reactance test needs a positive-real function: {verdict.reason}")
    report = poles_zeros(f)
    poles = tuple(sorted(r.value.imag for r in report.poles if r.on_imaginary_axis))
    zeros = tuple(sorted(r.value.imag for r in report.zeros if r.on_imaginary_axis))
    interleaved = _alternates(poles, zeros)
    increasing = _increasing(f, poles + zeros)
    reason = None
    if not _negligible(even_polynomial(f), f):
        reason = "real part on the imaginary axis is not identically zero"
    elif len(poles) != len(report.poles) or len(zeros) != len(report.zeros):
        reason = "poles or zeros off the imaginary axis"
    elif not interleaved:
        reason = "poles and zeros do not interleave"
    elif not increasing:
        reason = "reactance is not strictly increasing"
    return ReactanceReport(
        reactance=reason is None,
        poles=poles,
        zeros=zeros,
        interleaved=interleaved,
        increasing=increasing,
        reason=reason,
    )


def is_strictly_positive_real_function(f: Any) -> bool:
    """Positive-real with no finite poles or zeros on the imaginary axis"""
    f = _as_rf(f)
    if not is_positive_real(f):
        return False
    report = poles_zeros(f)
    return not any(r.on_imaginary_axis for r in report.poles + report.zeros)


# -------------------------
# 5) Network functions of s
# -------------------------

def _element_polys(nl: Netlist) -> Dict[Hashable, Tuple[Poly, Poly]]:
    """p_a(s) = g + c s and q_a(s) = r + l s for every branch"""
    out: Dict[Hashable, Tuple[Poly, Poly]] = {}
    for b in nl.branches:
        if b.kind != ElementKind.GCRL:
            raise PreconditionViolatedError(
                f"branch '{b.name}' has a fixed admittance; functions of s need (g,c,r,l) branches"
            )
        e = b.gcrl
        out[b.name] = (Poly((e.g, e.c)), Poly((e.r, e.l)))
    return out


def _prepared(nl: Netlist) -> Tuple[BranchGraph, Dict[Hashable, Tuple[Poly, Poly]]]:
    polys = _element_polys(nl)
    g = BranchGraph.from_netlist(nl)
    if not is_connected(g):
        raise DisconnectedError("network functions of s need a connected network")
    return g, polys


def _term(chosen: Iterable[Hashable], polys: Dict[Hashable, Tuple[Poly, Poly]]) -> Poly:
    inside = set(chosen)
    term = Poly((1,))
    for name, (p, q) in polys.items():
        term = term * (p if name in inside else q)
    return term


def _pair(nl: Netlist, j: Any, k: Any) -> Tuple[int, int]:
    jj, kk = nl.resolve_node(j), nl.resolve_node(k)
    if jj == kk:
        raise EqualIndicesError(f"node pair needs distinct nodes, got {jj} twice")
    return jj, kk


def characteristic_polynomial(nl: Netlist) -> Poly:
    """C(s): sum over spanning trees of prod p over the tree times prod q over the cotree"""
    g, polys = _prepared(nl)
    total = Poly()
    for tree in spanning_trees(g):
        total = total + _term(tree, polys)
    return total


def impedance_numerator(nl: Netlist, j: Any, k: Any) -> Tuple[Poly, Poly]:
    """Unreduced (N(s), C(s)) with Z_jk(s) = N(s) / C(s); N sums over spanning tree pairs"""
    jj, kk = _pair(nl, j, k)
    g, polys = _prepared(nl)
    numerator = Poly()
    for side_j, side_k in tree_pairs(g, jj, kk):
        numerator = numerator + _term(side_j + side_k, polys)
    return numerator, characteristic_polynomial(nl)


def admittance_matrix_s(nl: Netlist) -> np.ndarray:
    """Y(s) as an object array of rational functions"""
    polys = _element_polys(nl)
    Y = np.empty((nl.n, nl.n), dtype=object)
    Y.fill(RationalFunction(0))
    for b in nl.branches:
        y = RationalFunction(*polys[b.name])
        a, c = nl.index_of(b.head) - 1, nl.index_of(b.tail) - 1
        Y[a, a] = Y[a, a] + y
        Y[c, c] = Y[c, c] + y
        Y[a, c] = Y[a, c] - y
        Y[c, a] = Y[c, a] - y
    return Y


def _tz(Ys: np.ndarray, c: RationalFunction, p: int, q: int, j: int, k: int) -> RationalFunction:
    return _as_rf(cofactor2(Ys, p, q, j, k)) / c


def transfer_impedance_s(nl: Netlist, p: Any, q: Any, j: Any, k: Any) -> RationalFunction:
    """tz(pq;jk)(s) = C_{pq,jk}(Y(s)) / c(Y(s))"""
    pp, qq, jj, kk = (nl.resolve_node(x) for x in (p, q, j, k))
    _prepared(nl)
    Ys = admittance_matrix_s(nl)
    return _tz(Ys, _as_rf(cofactor1(Ys, 1, 1)), pp, qq, jj, kk)


def impedance_s_cofactor(nl: Netlist, j: Any, k: Any) -> RationalFunction:
    jj, kk = _pair(nl, j, k)
    return transfer_impedance_s(nl, jj, kk, jj, kk)


def network_impedance_s(nl: Netlist, j: Any, k: Any, cross_check: bool = True) -> RationalFunction:
    """
    Driving-point impedance Z_jk(s) from the tree-pair sum over C(s),
    gcd-reduced. With ``cross_check`` the result is compared with the
    cofactor ratio over Y(s).
    """
    numerator, C = impedance_numerator(nl, j, k)
    Z = RationalFunction(numerator, C)
    if numerator.degree + C.degree > Z.num.degree + Z.den.degree:
        logger.debug(f"Pole-zero cancellation in Z({j},{k}): common factor removed")
    if cross_check:
        reference = impedance_s_cofactor(nl, j, k)
        if not rf_close(Z, reference):
            raise InconsistentSolutionError(f"tree formula {Z} disagrees with cofactor ratio {reference}")
    return Z


@dataclass(frozen=True)
class StrictPositiveRealReport:
    """
    ``strict`` applies the branch criteria (no imaginary-axis poles of any
    branch transfer impedance, plus one lossy branch with g, r > 0 whose
    transfer impedance is nonzero with no imaginary-axis zeros); ``direct``
    checks Z_jk(s) itself.
    """

    strict: bool
    direct: bool
    impedance: RationalFunction
    pole_branches: Tuple[str, ...]
    witness_branch: Optional[str]

    @property
    def agrees(self) -> bool:
        return self.strict == self.direct


def is_strictly_positive_real(nl: Netlist, j: Any, k: Any) -> StrictPositiveRealReport:
    jj, kk = _pair(nl, j, k)
    _prepared(nl)
    Ys = admittance_matrix_s(nl)
    c = _as_rf(cofactor1(Ys, 1, 1))
    pole_branches: List[str] = []
    witness: Optional[str] = None
    for b in nl.branches:
        tz = _tz(Ys, c, nl.index_of(b.head), nl.index_of(b.tail), jj, kk)
        if tz.is_zero():
            continue
        report = poles_zeros(tz)
        if any(r.on_imaginary_axis for r in report.poles):
            pole_branches.append(b.name)
        lossy = b.gcrl.g > 0 and b.gcrl.r > 0
        if witness is None and lossy and not any(r.on_imaginary_axis for r in report.zeros):
            witness = b.name
    Z = _tz(Ys, c, jj, kk, jj, kk)
    result = StrictPositiveRealReport(
        strict=not pole_branches and witness is not None,
        direct=is_strictly_positive_real_function(Z),
        impedance=Z,
        pole_branches=tuple(pole_branches),
        witness_branch=witness,
    )
    if not result.agrees:
        logger.warning(
            f"Strict positive-real criteria ({result.strict}) and direct check ({result.direct}) "
            f"disagree for Z({jj},{kk}) = {Z}"
        )
    return result
