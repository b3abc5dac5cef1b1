"""
Dense matrices, determinants and the cofactor calculus.

Matrices are numpy arrays. Object arrays hold exact scalars
(:class:`~src.scalar.ExactComplex`, or rational functions in the laplace
module) and are handed to sympy's ``DomainMatrix`` for determinants, rank
and solves; complex128 arrays use LAPACK LU via ``numpy.linalg``.

Exact scalar types other than ExactComplex take part through ``to_sympy()``
and a ``from_sympy(expr)`` classmethod.

Index arguments are 1-based throughout, matching node numbering.
"""

from __future__ import annotations

import itertools
import logging
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Sequence, Tuple

import numpy as np
import sympy
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from .config import LEIBNIZ_LIMIT
from .errors import (
    EqualIndicesError,
    IndexConflictError,
    IndexOutOfRangeError,
    LengthMismatchError,
    NotSquareError,
    SingularNetworkError,
    TooLargeError,
)
from .scalar import ExactComplex, ScalarMode, Tolerance, DEFAULT_TOLERANCE

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CofactorIndex:
    """Ordered row/column index tuples of a generalized cofactor"""

    rows: Tuple[int, ...] = ()
    cols: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        object.__setattr__(self, "cols", tuple(int(c) for c in self.cols))
        if len(self.rows) != len(self.cols):
            raise LengthMismatchError(
                f"cofactor index lengths differ: {len(self.rows)} rows, {len(self.cols)} cols"
            )

    def __len__(self):
        return len(self.rows)

    def extend(self, rows: Sequence[int], cols: Sequence[int]) -> "CofactorIndex":
        return CofactorIndex(tuple(rows) + self.rows, tuple(cols) + self.cols)


# ----------------------------
# Construction helpers
# ----------------------------

def is_exact(A: np.ndarray) -> bool:
    return A.dtype == object


def mode_of(A: np.ndarray) -> ScalarMode:
    return ScalarMode.EXACT if is_exact(A) else ScalarMode.FLOAT64


def zeros(rows: int, cols: int, mode: ScalarMode) -> np.ndarray:
    if mode == ScalarMode.EXACT:
        out = np.empty((rows, cols), dtype=object)
        out.fill(ExactComplex(0))
        return out
    return np.zeros((rows, cols), dtype=complex)


def zero_vector(n: int, mode: ScalarMode) -> np.ndarray:
    if mode == ScalarMode.EXACT:
        out = np.empty(n, dtype=object)
        out.fill(ExactComplex(0))
        return out
    return np.zeros(n, dtype=complex)


def as_matrix(rows: Sequence[Sequence[Any]], mode: ScalarMode) -> np.ndarray:
    """Build a matrix from nested sequences of numbers"""
    if mode == ScalarMode.EXACT:
        data = [[_exact(x) for x in row] for row in rows]
        out = np.empty((len(data), len(data[0]) if data else 0), dtype=object)
        for i, row in enumerate(data):
            for j, x in enumerate(row):
                out[i, j] = x
        return out
    return np.array(rows, dtype=complex)


def to_mode(A: np.ndarray, mode: ScalarMode) -> np.ndarray:
    if mode == mode_of(A):
        return A.copy()
    if mode == ScalarMode.FLOAT64:
        return np.array([[complex(x) for x in row] for row in A], dtype=complex).reshape(A.shape)
    out = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        out[idx] = ExactComplex.from_complex(x)
    return out


def _exact(x: Any) -> Any:
    coerced = ExactComplex.coerce(x)
    if coerced is not None:
        return coerced
    if isinstance(x, complex) or isinstance(x, float):
        return ExactComplex.from_complex(x)
    return x


def _one_like(A: np.ndarray) -> Any:
    if is_exact(A):
        return A.flat[0] * 0 + 1 if A.size else ExactComplex(1)
    return complex(1.0)


def _zero_like(A: np.ndarray) -> Any:
    if is_exact(A):
        return A.flat[0] * 0 if A.size else ExactComplex(0)
    return complex(0.0)


def _require_square(A: np.ndarray) -> int:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSquareError(f"matrix of shape {A.shape} is not square")
    return A.shape[0]


def _check_range(n: int, *indices: int) -> None:
    for idx in indices:
        if not 1 <= idx <= n:
            raise IndexOutOfRangeError(f"index {idx} outside [1, {n}]")


# ----------------------------
# sympy bridge
# ----------------------------

def _exact_kind(*arrays: np.ndarray) -> type:
    """Scalar type of exact object arrays: ExactComplex unless another exact type is present"""
    for A in arrays:
        for x in A.flat:
            if not isinstance(x, ExactComplex) and hasattr(type(x), "from_sympy"):
                return type(x)
    return ExactComplex


def _to_sympy(x: Any) -> Any:
    if hasattr(x, "to_sympy"):
        return x.to_sympy()
    if isinstance(x, numbers.Rational):
        f = Fraction(x)
        return sympy.Rational(f.numerator, f.denominator)
    return sympy.sympify(x)


def _domain_matrix(A: np.ndarray, kind: type) -> DomainMatrix:
    rows, cols = A.shape
    if kind is ExactComplex:
        return DomainMatrix([[_exact(x).element for x in row] for row in A], (rows, cols), QQ_I)
    return DomainMatrix.from_list_sympy(rows, cols, [[_to_sympy(x) for x in row] for row in A])


def _lift(element: Any, domain: Any, kind: type) -> Any:
    """Domain element back to the package scalar ``kind``"""
    if kind is ExactComplex:
        if domain != QQ_I:
            element = QQ_I.from_sympy(domain.to_sympy(element))
        return ExactComplex.from_element(element)
    return kind.from_sympy(domain.to_sympy(element))


def _from_domain_matrix(M: DomainMatrix, kind: type) -> np.ndarray:
    rows, cols = M.shape
    out = np.empty((rows, cols), dtype=object)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = _lift(M[i, j].element, M.domain, kind)
    return out


def _nonsingular_field_matrix(A: np.ndarray, kind: type) -> DomainMatrix:
    M = _domain_matrix(A, kind).to_field()
    if M.domain.is_zero(M.det()):
        raise SingularNetworkError("singular system (exact determinant is zero)")
    return M


# ----------------------------
# Determinants
# ----------------------------

def det(A: np.ndarray) -> Any:
    """Determinant: sympy DomainMatrix for exact scalars, LU for complex128"""
    n = _require_square(A)
    if n == 0:
        return _one_like(A)
    if is_exact(A):
        kind = _exact_kind(A)
        M = _domain_matrix(A, kind)
        return _lift(M.det(), M.domain, kind)
    return complex(np.linalg.det(A))


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def det_leibniz(A: np.ndarray) -> Any:
    """Signed sum over all permutations; reference oracle for small n"""
    n = _require_square(A)
    if n > LEIBNIZ_LIMIT:
        raise TooLargeError(f"Leibniz expansion limited to n <= {LEIBNIZ_LIMIT}, got {n}")
    total = _zero_like(A)
    if n == 0:
        return _one_like(A)
    for perm in itertools.permutations(range(n)):
        term = A[0, perm[0]]
        for row in range(1, n):
            term = term * A[row, perm[row]]
        total = total + term if _permutation_sign(perm) > 0 else total - term
    return total


# ----------------------------
# Index conventions
# ----------------------------

def sigma(a: int, b: int) -> int:
    """Sign exponent of a second cofactor: a+b-1 if a<b else a+b"""
    if a == b:
        raise EqualIndicesError(f"sigma requires distinct indices, got {a} twice")
    return a + b - 1 if a < b else a + b


def shift_index(a: int, p: int) -> int:
    """Index of ``p`` once row/column ``a`` has been deleted"""
    return sigma(a, p) - a


def minor(A: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    """Delete the listed (1-based) rows and columns"""
    out = np.delete(A, [r - 1 for r in rows], axis=0)
    return np.delete(out, [c - 1 for c in cols], axis=1)


# ----------------------------
# Cofactors
# ----------------------------

def cofactor1(A: np.ndarray, j: int, k: int) -> Any:
    n = _require_square(A)
    _check_range(n, j, k)
    value = det(minor(A, [j], [k]))
    return value if (j + k) % 2 == 0 else -value


def cofactor2(A: np.ndarray, j: int, p: int, k: int, q: int) -> Any:
    """C_{jp,kq}(A); zero when j == p or k == q"""
    n = _require_square(A)
    _check_range(n, j, p, k, q)
    if j == p or k == q:
        return _zero_like(A)
    value = det(minor(A, [j, p], [k, q]))
    return value if (sigma(j, p) + sigma(k, q)) % 2 == 0 else -value


def cofactor_gen(A: np.ndarray, idx: CofactorIndex) -> Any:
    """Generalized cofactor, defined recursively one row/column pair at a time"""
    n = _require_square(A)
    if len(idx) > n:
        raise IndexOutOfRangeError(f"{len(idx)} index pairs exceed matrix size {n}")
    _check_range(n, *idx.rows, *idx.cols)
    if len(set(idx.rows)) != len(idx.rows) or len(set(idx.cols)) != len(idx.cols):
        return _zero_like(A)
    return _cofactor_recursive(A, list(idx.rows), list(idx.cols))


def _cofactor_recursive(A: np.ndarray, rows: List[int], cols: List[int]) -> Any:
    if not rows:
        return det(A)
    j, k = rows[0], cols[0]
    sub = minor(A, [j], [k])
    rest_rows = [shift_index(j, p) for p in rows[1:]]
    rest_cols = [shift_index(k, q) for q in cols[1:]]
    value = _cofactor_recursive(sub, rest_rows, rest_cols) if sub.size or rest_rows else _one_like(A)
    return value if (j + k) % 2 == 0 else -value


def cofactor3(A: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> Any:
    return cofactor_gen(A, CofactorIndex(tuple(rows), tuple(cols)))


def laplace2_expand(A: np.ndarray, j: int, p: int, unordered: bool = False) -> Any:
    """Determinant by second-order expansion along rows j and p.

    ``unordered=False`` sums over ordered column pairs (r, t), r != t;
    ``unordered=True`` sums over r < t with the 2x2 minor of rows j, p.
    """
    n = _require_square(A)
    if j == p:
        raise EqualIndicesError(f"expansion rows must differ, got {j} twice")
    _check_range(n, j, p)
    total = _zero_like(A)
    if unordered:
        for r, t in itertools.combinations(range(1, n + 1), 2):
            pair = A[j - 1, r - 1] * A[p - 1, t - 1] - A[j - 1, t - 1] * A[p - 1, r - 1]
            total = total + pair * cofactor2(A, j, p, r, t)
        return total
    for r in range(1, n + 1):
        for t in range(1, n + 1):
            if t == r:
                continue
            total = total + A[j - 1, r - 1] * A[p - 1, t - 1] * cofactor2(A, j, p, r, t)
    return total


def check_sylvester(
    A: np.ndarray,
    p: int,
    q: int,
    r: int,
    s: int,
    alpha: Sequence[int] = (),
    beta: Sequence[int] = (),
) -> Any:
    """LHS - RHS of the cofactor form of Sylvester's determinant identity"""
    n = _require_square(A)
    alpha, beta = tuple(alpha), tuple(beta)
    if len(alpha) != len(beta):
        raise LengthMismatchError("alpha and beta must have equal length")
    if p in alpha or q in alpha or r in beta or s in beta:
        raise IndexConflictError("p, q must avoid alpha and r, s must avoid beta")
    if len(alpha) > n - 2:
        raise IndexOutOfRangeError(f"|alpha| = {len(alpha)} exceeds n - 2 = {n - 2}")

    def c(rows, cols):
        return cofactor_gen(A, CofactorIndex(tuple(rows) + alpha, tuple(cols) + beta))

    lhs = c([p], [r]) * c([q], [s]) - c([p], [s]) * c([q], [r])
    rhs = c([p, q], [r, s]) * c([], [])
    return lhs - rhs


# ----------------------------
# Rank and solves
# ----------------------------

def rank(A: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    if A.size == 0:
        return 0
    if not is_exact(A):
        return int(np.linalg.matrix_rank(A))
    return int(_domain_matrix(A, _exact_kind(A)).to_field().rank())


def solve_linear(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b for square nonsingular A"""
    n = _require_square(A)
    if n == 0:
        return b.copy()
    if not is_exact(A):
        try:
            return np.linalg.solve(A, np.asarray(b, dtype=complex))
        except np.linalg.LinAlgError as e:
            raise SingularNetworkError(f"singular system: {e}") from e
    rhs = np.asarray(b, dtype=object)
    single = rhs.ndim == 1
    columns = rhs.reshape(n, 1) if single else rhs
    kind = _exact_kind(A, columns)
    M = _nonsingular_field_matrix(A, kind)
    M, R = M.unify(_domain_matrix(columns, kind).to_field())
    out = _from_domain_matrix(M.lu_solve(R), kind)
    return out[:, 0] if single else out


def inverse(A: np.ndarray) -> np.ndarray:
    n = _require_square(A)
    if not is_exact(A):
        try:
            return np.linalg.inv(A)
        except np.linalg.LinAlgError as e:
            raise SingularNetworkError(f"singular matrix: {e}") from e
    if n == 0:
        return A.copy()
    kind = _exact_kind(A)
    return _from_domain_matrix(_nonsingular_field_matrix(A, kind).inv(), kind)
