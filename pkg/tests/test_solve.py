"""
Tests for grounded solves, transfer impedances and the identity checks.
"""

import itertools
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.admittance import build
from src.errors import SingularNetworkError, UnbalancedInjectionError
from src.kirchhoff import kappa
from src.netlist import load_netlist, parse
from src.scalar import ExactComplex, ScalarMode, close
from src.solve import (
    check_foster,
    check_jacobi,
    check_kcl_identity,
    check_superposition,
    check_tellegen,
    check_transitivity,
    common_cofactor,
    driving_point_impedance,
    impedance_table,
    injection_vector,
    solve_grounded,
    solve_row_replacement,
    transfer_from_dp,
    transfer_impedance,
    transfer_matrix,
)

Z13_INDUCTIVE = ExactComplex(Fraction(500, 54020), Fraction(5251, 54020))
Z14_INDUCTIVE = ExactComplex(Fraction(100, 2701), Fraction(510, 2701))

Z13_RESISTIVE = ExactComplex(Fraction(13643000, 139377603), Fraction(1470730, 139377603))
Z14_RESISTIVE = ExactComplex(Fraction(26671000, 139377603), Fraction(5667550, 139377603))
Z34_RESISTIVE = ExactComplex(Fraction(13628000, 139377603), Fraction(1537220, 139377603))


def _exact(v):
    return np.array([ExactComplex(x) for x in v], dtype=object)


class TestWheatstoneImpedances:
    """Bit-exact driving-point impedances of the two bridge instances"""

    def test_common_cofactor(self, wheatstone):
        """c(Y) equals the tree sum -40 + 204j"""
        Y = build(wheatstone, ScalarMode.EXACT)
        assert common_cofactor(Y) == ExactComplex(-40, 204)
        assert kappa(wheatstone, ScalarMode.EXACT) == ExactComplex(-40, 204)

    def test_inductive_bridge(self, wheatstone):
        Y = build(wheatstone, ScalarMode.EXACT)
        assert driving_point_impedance(Y, 1, 3) == Z13_INDUCTIVE
        assert driving_point_impedance(Y, 3, 4) == Z13_INDUCTIVE
        assert driving_point_impedance(Y, 1, 4) == Z14_INDUCTIVE

    def test_resistive_bridge(self, wheatstone_reflected):
        Y = build(wheatstone_reflected, ScalarMode.EXACT)
        assert driving_point_impedance(Y, 1, 3) == Z13_RESISTIVE
        assert driving_point_impedance(Y, 1, 4) == Z14_RESISTIVE
        assert driving_point_impedance(Y, 3, 4) == Z34_RESISTIVE

    def test_float_agrees(self, wheatstone):
        """Float mode matches the exact values to tolerance"""
        Y = build(wheatstone, ScalarMode.FLOAT64)
        assert close(driving_point_impedance(Y, 1, 3), complex(Z13_INDUCTIVE))
        assert close(driving_point_impedance(Y, 1, 4), complex(Z14_INDUCTIVE))

    def test_impedance_table(self, wheatstone):
        """Symmetric with a zero diagonal"""
        Z = impedance_table(build(wheatstone, ScalarMode.EXACT))
        assert Z[0, 2] == Z13_INDUCTIVE
        for a in range(4):
            assert Z[a, a] == 0
            for b in range(4):
                assert Z[a, b] == Z[b, a]

    def test_transfer_antisymmetry(self, wheatstone):
        Y = build(wheatstone, ScalarMode.EXACT)
        assert transfer_impedance(Y, 1, 2, 3, 4) == -transfer_impedance(Y, 2, 1, 3, 4)
        assert transfer_impedance(Y, 1, 2, 3, 4) == transfer_impedance(Y, 3, 4, 1, 2)

    def test_transfer_from_driving_points(self, wheatstone):
        """tz(pq;jk) = (Z_pk + Z_qj - Z_pj - Z_qk) / 2"""
        Y = build(wheatstone, ScalarMode.EXACT)
        Z = impedance_table(Y)
        expected = transfer_impedance(Y, 1, 2, 3, 4)
        assert transfer_from_dp(Z[0, 3], Z[1, 2], Z[0, 2], Z[1, 3]) == expected

    def test_transfer_matrix_float(self, wheatstone_reflected):
        Y = build(wheatstone_reflected, ScalarMode.FLOAT64)
        T = transfer_matrix(Y, 4)
        assert close(T.impedance(1, 3), complex(Z13_RESISTIVE))


class TestGroundedSolve:
    """Unique solution with a grounded node"""

    def test_dc_load_flow_solution(self, netlists_dir):
        """Generator current sized for |v1| = 1"""
        nl = load_netlist(netlists_dir / "dc_load_flow.net")
        Y = build(nl, ScalarMode.EXACT)
        sol = solve_grounded(Y, injection_vector(nl, ScalarMode.EXACT), nl.index_of("g"))
        v1 = sol.voltage(nl.index_of("1"))
        assert v1.abs2() == 1
        assert sol.residual == 0

    def test_injection_vector(self, netlists_dir):
        nl = load_netlist(netlists_dir / "dc_load_flow.net")
        i = injection_vector(nl, ScalarMode.EXACT)
        assert i[nl.index_of("1") - 1] == ExactComplex(Fraction(100, 101), Fraction(-201, 1010))
        assert sum(i, ExactComplex(0)) == 0

    def test_ground_shift(self, wheatstone):
        """Any ground gives the same voltage differences"""
        Y = build(wheatstone, ScalarMode.EXACT)
        i = _exact([1, 0, -1, 0])
        a = solve_grounded(Y, i, 1).v
        b = solve_grounded(Y, i, 4).v
        assert a[0] - a[2] == b[0] - b[2]
        assert a[0] - a[2] == Z13_INDUCTIVE

    def test_shifted(self, wheatstone):
        sol = solve_grounded(build(wheatstone, ScalarMode.EXACT), _exact([1, 0, -1, 0]), 2)
        moved = sol.shifted(ExactComplex(5))
        assert moved[1] == 5

    def test_unbalanced(self, wheatstone):
        with pytest.raises(UnbalancedInjectionError):
            solve_grounded(build(wheatstone, ScalarMode.EXACT), _exact([1, 0, 0, 0]), 1)

    def test_disconnected(self):
        nl = parse("node a\nnode b\nnode c\nbranch x a b y=1\n")
        with pytest.raises(SingularNetworkError):
            solve_grounded(build(nl, ScalarMode.EXACT), _exact([1, -1, 0]), 1)

    def test_row_replacement(self, wheatstone):
        """Replacing row 1 by e_1 pins v_1 = 0; det equals c(Y)"""
        Y = build(wheatstone, ScalarMode.EXACT)
        i = _exact([1, 0, -1, 0])
        v, d = solve_row_replacement(Y, i, [1, 0, 0, 0], 1)
        assert d == common_cofactor(Y)
        assert list(v) == list(solve_grounded(Y, i, 1).v)

    def test_row_replacement_sum_constraint(self, wheatstone):
        """a = (1,1,1,1) gives det = n c(Y) and zero-mean voltages"""
        Y = build(wheatstone, ScalarMode.EXACT)
        v, d = solve_row_replacement(Y, _exact([1, 0, -1, 0]), [1, 1, 1, 1], 2)
        assert d == 4 * common_cofactor(Y)
        assert sum(v, ExactComplex(0)) == 0


class TestIdentities:
    """Jacobi, transitivity, node-current, Foster, Tellegen and superposition"""

    def test_jacobi(self, random_small_corpus):
        for nl in random_small_corpus:
            Y = build(nl, ScalarMode.EXACT)
            if nl.n < 4:
                continue
            for p, q, j, k in itertools.combinations(range(1, nl.n + 1), 4):
                assert check_jacobi(Y, p, q, j, k) == 0

    def test_transitivity(self, wheatstone):
        Y = build(wheatstone, ScalarMode.EXACT)
        assert check_transitivity(Y, 1, 2, 3, 1, 4) == 0
        assert check_transitivity(Y, 2, 4, 1, 3, 1) == 0

    def test_kcl_identity(self, wheatstone):
        Y = build(wheatstone, ScalarMode.EXACT)
        for j in range(1, 5):
            for p in range(1, 5):
                if j != p:
                    assert check_kcl_identity(Y, j, p) == 0

    def test_foster_exact(self, random_corpus):
        """sum of y_jk Z_jk over node pairs is n - 1"""
        for nl in random_corpus[:10]:
            report = check_foster(build(nl, ScalarMode.EXACT))
            assert report.residual == 0
            assert report.max_node_residual == 0.0

    def test_foster_float(self, wheatstone_reflected):
        report = check_foster(build(wheatstone_reflected, ScalarMode.FLOAT64))
        assert abs(complex(report.residual)) < 1e-9

    def test_tellegen(self, netlists_dir):
        nl = load_netlist(netlists_dir / "dc_load_flow.net")
        Y = build(nl, ScalarMode.EXACT)
        sol = solve_grounded(Y, injection_vector(nl, ScalarMode.EXACT), 1)
        report = check_tellegen(nl, sol)
        assert all(r == 0 for r in report.residuals)
        assert report.quadratic_residual == 0.0
        assert report.transfer_residual == 0.0

    def test_superposition(self, wheatstone):
        Y = build(wheatstone, ScalarMode.EXACT)
        parts = [_exact([1, -1, 0, 0]), _exact([0, 0, 2, -2]), _exact([3, 0, 0, -3])]
        assert check_superposition(Y, parts, 1) == 0.0


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
