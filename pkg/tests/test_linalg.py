"""
Tests for determinants, cofactors and the index conventions.
"""

import itertools
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.admittance import build
from src.errors import EqualIndicesError, IndexOutOfRangeError, SingularNetworkError, TooLargeError
from src.linalg import (
    CofactorIndex,
    as_matrix,
    check_sylvester,
    cofactor1,
    cofactor2,
    cofactor3,
    cofactor_gen,
    det,
    det_leibniz,
    inverse,
    laplace2_expand,
    minor,
    rank,
    shift_index,
    sigma,
    solve_linear,
    zeros,
)
from src.laplace import Poly, RationalFunction
from src.scalar import ExactComplex, ScalarMode


def _exact(rows):
    return as_matrix(rows, ScalarMode.EXACT)


def _symbolic_bridge(a, b, g, d):
    """Wheatstone Y with y_sigma = y_tau = 0, exact"""
    return _exact([
        [a + g, 0, -a, -g],
        [0, b + d, -b, -d],
        [-a, -b, a + b, 0],
        [-g, -d, 0, g + d],
    ])


class TestDeterminants:
    """Exact determinants against the Leibniz oracle"""

    def test_empty_matrix(self):
        """det of a 0x0 matrix is 1"""
        assert det(zeros(0, 0, ScalarMode.EXACT)) == 1

    def test_exact_matches_leibniz(self, random_small_corpus):
        """Exact determinants of minors agree on a random corpus"""
        for nl in random_small_corpus:
            Y = build(nl, ScalarMode.EXACT).Y
            M = minor(Y, [1], [1])
            assert det(M) == det_leibniz(M)

    def test_pivot_swap(self):
        """A zero leading pivot is handled by a row swap"""
        A = _exact([[0, 1], [1, 0]])
        assert det(A) == -1

    def test_singular(self):
        A = _exact([[1, 2], [2, 4]])
        assert det(A) == 0

    def test_float_matches_exact(self):
        """complex128 determinant agrees with the exact one"""
        rows = [[2, -1, 0], [-1, 3, -1], [0, -1, 2]]
        assert abs(det(as_matrix(rows, ScalarMode.FLOAT64)) - complex(det(_exact(rows)))) < 1e-12

    def test_leibniz_limit(self):
        """Leibniz refuses large matrices"""
        A = np.identity(12, dtype=complex)
        with pytest.raises(TooLargeError):
            det_leibniz(A)


class TestIndexConventions:
    """sigma and the index shift after deleting a row"""

    def test_sigma(self):
        assert sigma(1, 2) == 2
        assert sigma(2, 1) == 3
        assert sigma(3, 5) == 7

    def test_sigma_equal(self):
        with pytest.raises(EqualIndicesError):
            sigma(2, 2)

    def test_shift_index(self):
        """Indices above the deleted one move down by one"""
        assert shift_index(2, 1) == 1
        assert shift_index(2, 3) == 2
        assert shift_index(1, 4) == 3


class TestCofactors:
    """First, second and generalized cofactors"""

    def test_second_cofactor_equal_indices(self):
        """C_{jj,kq} is zero"""
        Y = _symbolic_bridge(1, 2, 3, 4)
        assert cofactor2(Y, 1, 1, 2, 3) == 0
        assert cofactor2(Y, 1, 2, 3, 3) == 0

    def test_cofactor_antisymmetry(self):
        """Swapping j and p flips the sign"""
        Y = _symbolic_bridge(1, 2, 3, 5)
        assert cofactor2(Y, 1, 2, 3, 4) == -cofactor2(Y, 2, 1, 3, 4)
        assert cofactor2(Y, 1, 2, 3, 4) == -cofactor2(Y, 1, 2, 4, 3)

    def test_bridge_cofactor(self):
        """C_{12,34} = alpha*delta - beta*gamma when sigma = tau = 0"""
        a, b, g, d = Fraction(3), Fraction(5), Fraction(7), Fraction(11)
        Y = _symbolic_bridge(a, b, g, d)
        assert cofactor2(Y, 1, 2, 3, 4) == a * d - b * g

    def test_balanced_bridge(self):
        """A balanced bridge has a vanishing transfer cofactor"""
        Y = _symbolic_bridge(2, 3, 4, 6)
        assert cofactor2(Y, 1, 2, 3, 4) == 0

    def test_generalized_matches_second(self, random_small_corpus):
        """cofactor_gen of order two equals cofactor2 for every index choice"""
        nl = random_small_corpus[0]
        Y = build(nl, ScalarMode.EXACT).Y
        n = Y.shape[0]
        for j, p, k, q in itertools.product(range(1, n + 1), repeat=4):
            if j == p or k == q:
                continue
            assert cofactor_gen(Y, CofactorIndex((j, p), (k, q))) == cofactor2(Y, j, p, k, q)

    def test_generalized_order_one(self):
        Y = _symbolic_bridge(1, 2, 3, 4)
        assert cofactor_gen(Y, CofactorIndex((2,), (3,))) == cofactor1(Y, 2, 3)

    def test_third_order_repeated_index(self):
        """A repeated row index gives zero"""
        Y = _symbolic_bridge(1, 2, 3, 4)
        assert cofactor3(Y, (1, 1, 2), (1, 2, 3)) == 0

    def test_first_cofactors_equal(self, wheatstone):
        """Every first cofactor of a zero-sum matrix is the same"""
        Y = build(wheatstone, ScalarMode.EXACT).Y
        reference = cofactor1(Y, 1, 1)
        for j in range(1, 5):
            for k in range(1, 5):
                assert cofactor1(Y, j, k) == reference

    def test_out_of_range(self):
        Y = _symbolic_bridge(1, 2, 3, 4)
        with pytest.raises(IndexOutOfRangeError):
            cofactor1(Y, 0, 1)
        with pytest.raises(IndexOutOfRangeError):
            cofactor2(Y, 1, 5, 1, 2)


class TestExpansionIdentities:
    """Second-order Laplace expansion and Sylvester's identity"""

    def test_laplace_ordered_and_unordered(self):
        """Ordered and unordered column-pair sums both reproduce det"""
        A = _exact([[2, 1, 0, 3], [1, 4, 1, 0], [0, 1, 5, 2], [3, 0, 2, 6]])
        assert laplace2_expand(A, 1, 2, unordered=True) == det(A)
        assert laplace2_expand(A, 1, 2) == det(A)

    def test_sylvester_random(self, random_small_corpus):
        """Sylvester's identity holds exactly for every admissible index choice"""
        for nl in random_small_corpus[:5]:
            Y = build(nl, ScalarMode.EXACT).Y
            n = Y.shape[0]
            if n < 3:
                continue
            pairs = list(itertools.combinations(range(1, n + 1), 2))
            for (p, q), (r, s) in itertools.product(pairs, repeat=2):
                assert check_sylvester(Y, p, q, r, s) == 0

    def test_sylvester_with_alpha(self):
        A = _exact([[2, 1, 0, 3, 1], [1, 4, 1, 0, 2], [0, 1, 5, 2, 1], [3, 0, 2, 6, 0], [1, 2, 1, 0, 7]])
        assert check_sylvester(A, 1, 2, 3, 4, alpha=(5,), beta=(5,)) == 0


class TestSolves:
    """Rank, linear solves and inverses"""

    def test_rank_laplacian(self, wheatstone):
        """A connected network's Y has rank n - 1"""
        assert rank(build(wheatstone, ScalarMode.EXACT).Y) == 3
        assert rank(build(wheatstone, ScalarMode.FLOAT64).Y) == 3

    def test_solve_exact(self):
        A = _exact([[2, 1], [1, 3]])
        x = solve_linear(A, np.array([ExactComplex(3), ExactComplex(5)], dtype=object))
        assert x[0] == Fraction(4, 5)
        assert x[1] == Fraction(7, 5)

    def test_solve_singular(self):
        with pytest.raises(SingularNetworkError):
            solve_linear(_exact([[1, 1], [1, 1]]), np.array([ExactComplex(1), ExactComplex(0)], dtype=object))
        with pytest.raises(SingularNetworkError):
            solve_linear(np.array([[1, 1], [1, 1]], dtype=complex), np.array([1, 0], dtype=complex))

    def test_inverse_exact(self):
        A = _exact([[2, 1], [1, 3]])
        Ainv = inverse(A)
        product = A.dot(Ainv)
        assert product[0, 0] == 1 and product[0, 1] == 0
        assert product[1, 0] == 0 and product[1, 1] == 1

    def test_solve_complex_matrix_rhs(self):
        """Gaussian-rational entries and a two-column right-hand side"""
        A = _exact([[ExactComplex(1, 1), 2], [0, ExactComplex(0, 1)]])
        B = _exact([[ExactComplex(1, 1), 3], [ExactComplex(0, 2), ExactComplex(0, 1)]])
        X = solve_linear(A, B)
        assert X.shape == (2, 2)
        assert all(isinstance(x, ExactComplex) for x in X.flat)
        assert X[1, 0] == 2 and X[1, 1] == 1
        assert X[0, 0] == ExactComplex(-1, 2)
        assert X[0, 1] == ExactComplex(Fraction(1, 2), Fraction(-1, 2))

    def test_inverse_singular(self):
        with pytest.raises(SingularNetworkError):
            inverse(_exact([[1, 2], [2, 4]]))

    def test_rank_exact_complex(self):
        """Row 2 is j times row 1"""
        A = _exact([[1, ExactComplex(0, 1)], [ExactComplex(0, 1), -1]])
        assert rank(A) == 1

    def test_rational_function_entries(self):
        """Object arrays of rational functions go through the same determinant"""
        s = RationalFunction.s()
        A = np.empty((2, 2), dtype=object)
        A[0, 0], A[0, 1], A[1, 0], A[1, 1] = s + 1, s, s, s + 2
        value = det(A)
        assert isinstance(value, RationalFunction)
        assert value == RationalFunction(Poly((2, 3)))
        assert value == det_leibniz(A)


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
