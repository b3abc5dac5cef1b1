"""
Scalar tower for NetKit.

Two instantiations are used across the package:

* float mode: Python/numpy ``complex`` (complex128 arrays)
* exact mode: :class:`ExactComplex`, a Gaussian rational backed by
  sympy's ``QQ_I`` domain with ``Fraction`` real and imaginary parts
  (object arrays)

The laplace module adds rational functions of ``s`` as a third scalar.
"""

from __future__ import annotations

import math
import numbers
import operator
import re
from enum import Enum
from fractions import Fraction
from typing import Any, Optional, Union

import sympy
from pydantic import BaseModel, ConfigDict, Field
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.polyerrors import CoercionFailed

from .config import ABS_TOLERANCE, REL_TOLERANCE


class ScalarMode(str, Enum):
    FLOAT64 = "float64"
    EXACT = "exact"


class Tolerance(BaseModel):
    """Relative/absolute tolerance pair for float comparisons"""

    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=REL_TOLERANCE, ge=0.0)
    abs_tol: float = Field(default=ABS_TOLERANCE, ge=0.0)


DEFAULT_TOLERANCE = Tolerance()


def _rational(x: Any) -> Any:
    """An exact real as an element of sympy's QQ"""
    if isinstance(x, sympy.Rational):
        return QQ(int(x.p), int(x.q))
    f = Fraction(x)
    return QQ(f.numerator, f.denominator)


def _fraction(q: Any) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class ExactComplex:
    """
    Exact complex-rational number ``re + im*j``: an element of the Gaussian
    rationals ``QQ_I`` with Fraction-valued ``re`` and ``im``. Mixing with a
    float or complex operand degrades to ``complex``, as Fraction does.
    """

    __slots__ = ("element",)

    def __init__(self, re: Any = 0, im: Any = 0):
        object.__setattr__(self, "element", QQ_I(_rational(re), _rational(im)))

    def __setattr__(self, name, value):
        raise AttributeError("ExactComplex is immutable")

    # ----------------------------
    # Construction helpers
    # ----------------------------
    @classmethod
    def from_element(cls, element: Any) -> "ExactComplex":
        out = object.__new__(cls)
        object.__setattr__(out, "element", element)
        return out

    @classmethod
    def coerce(cls, value: Any) -> Optional["ExactComplex"]:
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, numbers.Rational):
            return cls(value)
        return None

    @classmethod
    def from_complex(cls, z: complex) -> "ExactComplex":
        z = complex(z)
        return cls(Fraction(z.real), Fraction(z.imag))

    @classmethod
    def from_sympy(cls, expr: Any) -> "ExactComplex":
        try:
            return cls.from_element(QQ_I.from_sympy(sympy.sympify(expr)))
        except CoercionFailed as e:
            raise ValueError(f"not a complex rational: {expr}") from e

    def to_sympy(self) -> sympy.Expr:
        return QQ_I.to_sympy(self.element)

    # ----------------------------
    # Field operations
    # ----------------------------
    def _binary(self, other, op):
        o = _operand(other)
        if o is not None:
            return ExactComplex.from_element(op(self.element, o))
        if isinstance(other, numbers.Complex):
            return op(complex(self), complex(other))
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, operator.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, operator.sub)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, operator.mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _operand(other)
        if o is not None and not o:
            raise ZeroDivisionError("ExactComplex division by zero")
        return self._binary(other, operator.truediv)

    def __rtruediv__(self, other):
        if not self:
            raise ZeroDivisionError("ExactComplex division by zero")
        return self._binary(other, lambda a, b: b / a)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, numbers.Integral):
            return NotImplemented
        e = int(exponent)
        if e < 0:
            if not self:
                raise ZeroDivisionError("ExactComplex division by zero")
            return ExactComplex.from_element(QQ_I(QQ(1), QQ(0)) / self.element ** (-e))
        return ExactComplex.from_element(self.element ** e)

    def __neg__(self):
        return ExactComplex.from_element(-self.element)

    def __pos__(self):
        return self

    # ----------------------------
    # Comparison / conversion
    # ----------------------------
    def __eq__(self, other):
        o = _operand(other)
        if o is not None:
            return self.element == o
        if isinstance(other, numbers.Complex):
            return complex(self) == complex(other)
        return NotImplemented

    def __hash__(self):
        if not self.element.y:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.element.x) or bool(self.element.y)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> float:
        return math.hypot(float(self.re), float(self.im))

    @property
    def re(self) -> Fraction:
        return _fraction(self.element.x)

    @property
    def im(self) -> Fraction:
        return _fraction(self.element.y)

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def conjugate(self) -> "ExactComplex":
        return ExactComplex.from_element(QQ_I(self.element.x, -self.element.y))

    def abs2(self) -> Fraction:
        """Exact squared magnitude"""
        a, b = self.re, self.im
        return a * a + b * b

    def is_real(self) -> bool:
        return not self.element.y

    def __repr__(self):
        return f"ExactComplex({self.re!s}, {self.im!s})"

    def __str__(self):
        return format_exact(self)


def _operand(value: Any) -> Any:
    """QQ_I element for exact operands, None otherwise"""
    if isinstance(value, ExactComplex):
        return value.element
    if isinstance(value, numbers.Rational):
        return QQ_I(_rational(value), QQ(0))
    return None


Scalar = Union[ExactComplex, complex]


# ----------------------------
# Literal parsing / formatting
# ----------------------------

_NUM = r"[0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?(?:/[0-9]+)?|\.[0-9]+(?:[eE][+-]?[0-9]+)?"
_REAL_RE = re.compile(rf"^[+-]?(?:{_NUM})$")
_IMAG_RE = re.compile(rf"^([+-]?)({_NUM})?j$")
_CPLX_RE = re.compile(rf"^([+-]?(?:{_NUM}))([+-])({_NUM})?j$")


def parse_real(text: str) -> Fraction:
    """Parse a REAL literal (decimal, exponent or ``p/q``) exactly"""
    text = text.strip()
    if not _REAL_RE.match(text):
        raise ValueError(f"not a real number: '{text}'")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a real number: '{text}'") from e


def parse_complex(text: str) -> ExactComplex:
    """Parse a CPLX literal such as ``2``, ``1.5-0.1j``, ``-10j`` or ``1/3+2/7j``"""
    text = text.strip().replace(" ", "")
    if _REAL_RE.match(text):
        return ExactComplex(parse_real(text))
    m = _IMAG_RE.match(text)
    if m:
        mag = parse_real(m.group(2)) if m.group(2) else Fraction(1)
        return ExactComplex(0, -mag if m.group(1) == "-" else mag)
    m = _CPLX_RE.match(text)
    if m:
        mag = parse_real(m.group(3)) if m.group(3) else Fraction(1)
        return ExactComplex(parse_real(m.group(1)), -mag if m.group(2) == "-" else mag)
    raise ValueError(f"not a complex number: '{text}'")


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_exact(z: ExactComplex) -> str:
    if not z.im:
        return format_fraction(z.re)
    if not z.re:
        return f"{format_fraction(z.im)} j"
    sign = "-" if z.im < 0 else "+"
    return f"{format_fraction(z.re)} {sign} {format_fraction(abs(z.im))} j"


def format_literal(z: Scalar) -> str:
    """Netlist-syntax literal that parses back to the same exact value"""
    if not isinstance(z, ExactComplex):
        z = ExactComplex.from_complex(z)
    if not z.im:
        return format_fraction(z.re)
    im = format_fraction(abs(z.im))
    if not z.re:
        return f"{'-' if z.im < 0 else ''}{im}j"
    return f"{format_fraction(z.re)}{'-' if z.im < 0 else '+'}{im}j"


# ----------------------------
# Mode handling
# ----------------------------

def to_scalar(value: Any, mode: ScalarMode) -> Scalar:
    """Convert a value to the scalar type of ``mode``"""
    if mode == ScalarMode.EXACT:
        if isinstance(value, str):
            return parse_complex(value)
        exact = ExactComplex.coerce(value)
        if exact is not None:
            return exact
        return ExactComplex.from_complex(value)
    return complex(value)


def is_exact_value(value: Any) -> bool:
    return isinstance(value, (ExactComplex, numbers.Rational))


def is_zero(value: Any, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    if is_exact_value(value):
        return value == 0
    if hasattr(value, "is_zero"):
        return value.is_zero()
    return abs(complex(value)) <= tol.abs_tol


def close(a: Any, b: Any, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Exact equality for exact scalars, relative/absolute test otherwise"""
    if is_exact_value(a) and is_exact_value(b):
        return a == b
    za, zb = complex(a), complex(b)
    scale = max(abs(za), abs(zb))
    return abs(za - zb) <= max(tol.rel_tol * scale, tol.abs_tol)


def real_part(value: Any) -> float:
    return complex(value).real


def imag_part(value: Any) -> float:
    return complex(value).imag
