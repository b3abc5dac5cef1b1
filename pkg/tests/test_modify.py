"""
Tests for expansion, contraction and augmentation of Y.
"""

import itertools
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.admittance import build
from src.errors import EqualIndicesError, IndexConflictError, PreconditionViolatedError, UnknownCaseError
from src.linalg import CofactorIndex, as_matrix, cofactor2
from src.modify import (
    ModKind,
    augment,
    augment_cofactor1,
    augment_cofactor2,
    augment_via_expand_contract,
    contract,
    contract_cofactor1,
    contract_cofactor2,
    contract_cofactor3,
    contract_impedance,
    expand,
    expand_cofactor1,
    expand_cofactors,
    map_index,
)
from src.netlist import add_branch, contract_netlist
from src.scalar import ExactComplex, ScalarMode
from src.solve import common_cofactor, driving_point_impedance

Y_PLUS = ExactComplex(Fraction(3, 2), Fraction(-1, 3))


class TestExpand:
    """Hanging a new node from node k"""

    def test_two_node(self):
        """Expanding a single branch y1 by y2 gives c = y1 y2"""
        Y = as_matrix([[2, -2], [-2, 2]], ScalarMode.EXACT)
        Yp, record = expand(Y, 2, ExactComplex(5))
        assert common_cofactor(Yp) == 10
        assert expand_cofactor1(Y, record) == 10
        assert record.nu == 3
        assert record.n_after == 3

    def test_matrix_shape(self, wheatstone):
        Y = build(wheatstone, ScalarMode.EXACT).Y
        Yp, record = expand(Y, 2, Y_PLUS)
        assert Yp.shape == (5, 5)
        assert Yp[4, 1] == -Y_PLUS
        assert Yp[1, 1] == Y[1, 1] + Y_PLUS
        assert record.kind == ModKind.EXPAND

    def test_second_cofactors(self, wheatstone):
        """Every second cofactor of Y+ matches the formula"""
        Y = build(wheatstone, ScalarMode.EXACT).Y
        Yp, record = expand(Y, 3, Y_PLUS)
        n = Yp.shape[0]
        for a, b, c, d in itertools.product(range(1, n + 1), repeat=4):
            formula = expand_cofactors(Y, record, CofactorIndex((a, b), (c, d)))
            assert formula == cofactor2(Yp, a, b, c, d)

    def test_wrong_record(self, wheatstone):
        Y = build(wheatstone, ScalarMode.EXACT).Y
        _, record = augment(Y, 1, 2, Y_PLUS)
        with pytest.raises(UnknownCaseError):
            expand_cofactors(Y, record, CofactorIndex((1, 2), (1, 2)))
        with pytest.raises(UnknownCaseError):
            _ = record.nu


class TestContract:
    """Identifying two nodes"""

    def test_cofactor1(self, wheatstone):
        """c(Y-) = C_{jk,jk}(Y)"""
        Y = build(wheatstone, ScalarMode.EXACT).Y
        Ym, _ = contract(Y, 1, 3)
        assert common_cofactor(Ym) == contract_cofactor1(Y, 1, 3)

    def test_index_map(self, wheatstone):
        Y = build(wheatstone, ScalarMode.EXACT).Y
        _, record = contract(Y, 2, 3)
        assert [map_index(record, p) for p in range(1, 5)] == [1, 2, 2, 3]

    def test_second_cofactors(self, random_small_corpus):
        """C_{p'q',r's'}(Y-) from cofactors of Y"""
        for nl in random_small_corpus[:6]:
            Y = build(nl, ScalarMode.EXACT).Y
            n = nl.n
            if n < 4:
                continue
            j, k = 1, 2
            Ym, record = contract(Y, j, k)
            others = [p for p in range(1, n + 1) if p != k]
            for p, q, r, s in itertools.product(others, repeat=4):
                pm, qm, rm, sm = (map_index(record, x) for x in (p, q, r, s))
                assert cofactor2(Ym, pm, qm, rm, sm) == contract_cofactor2(Y, j, k, p, q, r, s)

    def test_cofactor3(self, tetrahedron):
        Y = build(tetrahedron, ScalarMode.EXACT).Y
        Ym, record = contract(Y, 1, 2)
        p, q = 3, 4
        pm, qm = map_index(record, p), map_index(record, q)
        assert cofactor2(Ym, 1, pm, 1, qm) == contract_cofactor3(Y, 1, 2, p, q)

    def test_impedance(self, wheatstone):
        """Z after shorting (j,k) equals Z_pq - tz^2 / Z_jk"""
        Y = build(wheatstone, ScalarMode.EXACT).Y
        Ym, record = contract(Y, 1, 2)
        expected = driving_point_impedance(Ym, map_index(record, 3), map_index(record, 4))
        assert contract_impedance(Y, 1, 2, 3, 4) == expected

    def test_netlist_route(self, wheatstone):
        """Contracting the netlist and rebuilding gives the same matrix"""
        Y = build(wheatstone, ScalarMode.EXACT).Y
        Ym, _ = contract(Y, 1, 2)
        rebuilt = build(contract_netlist(wheatstone, 1, 2), ScalarMode.EXACT).Y
        assert (Ym == rebuilt).all()

    def test_preconditions(self, wheatstone):
        Y = build(wheatstone, ScalarMode.EXACT).Y
        with pytest.raises(PreconditionViolatedError):
            contract(Y, 3, 1)
        with pytest.raises(EqualIndicesError):
            contract(Y, 2, 2)
        with pytest.raises(IndexConflictError):
            contract_cofactor2(Y, 1, 2, 2, 3, 3, 4)


class TestAugment:
    """Adding a branch between existing nodes"""

    def test_equals_expand_then_contract(self, wheatstone):
        Y = build(wheatstone, ScalarMode.EXACT).Y
        Yb, record = augment(Y, 1, 2, Y_PLUS)
        assert (Yb == augment_via_expand_contract(Y, 1, 2, Y_PLUS)).all()
        assert record.n_after == 4

    def test_cofactor1(self, wheatstone):
        """c(Y-bar) = c(Y) + y+ C_{jk,jk}(Y)"""
        Y = build(wheatstone, ScalarMode.EXACT).Y
        Yb, _ = augment(Y, 1, 2, Y_PLUS)
        assert common_cofactor(Yb) == augment_cofactor1(Y, 1, 2, Y_PLUS)

    def test_cofactor2(self, wheatstone):
        Y = build(wheatstone, ScalarMode.EXACT).Y
        Yb, _ = augment(Y, 1, 2, Y_PLUS)
        for p, q, r, s in itertools.product(range(1, 5), repeat=4):
            assert cofactor2(Yb, p, q, r, s) == augment_cofactor2(Y, 1, 2, Y_PLUS, p, q, r, s)

    def test_matches_added_branch(self, wheatstone):
        """Augmenting Y equals building the netlist with a new sigma branch"""
        Y = build(wheatstone, ScalarMode.EXACT).Y
        Yb, _ = augment(Y, 1, 2, Y_PLUS)
        rebuilt = build(add_branch(wheatstone, "sigma", "1", "2", Y_PLUS), ScalarMode.EXACT).Y
        assert (Yb == rebuilt).all()

    def test_deletion_is_negative_augment(self, wheatstone):
        """Removing tau is augmenting by -y_tau"""
        Y = build(wheatstone, ScalarMode.EXACT).Y
        y_tau = wheatstone.branch("tau").y
        Yb, _ = augment(Y, 3, 4, -y_tau)
        assert Yb[2, 3] == 0

    def test_equal_nodes(self, wheatstone):
        with pytest.raises(EqualIndicesError):
            augment(build(wheatstone, ScalarMode.EXACT).Y, 2, 2, Y_PLUS)


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
