"""
Tests for polynomials, rational functions, positive-real tests and network
functions of s.
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest
from sympy.polys.domains import QQ, RR

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import NotPositiveRealError, PreconditionViolatedError, RationalDivisionError
from src.laplace import (
    Poly,
    RationalFunction,
    branch_function,
    characteristic_polynomial,
    compose,
    impedance_s_cofactor,
    is_positive_real,
    is_reactance_function,
    is_strictly_positive_real,
    is_strictly_positive_real_function,
    network_impedance_s,
    poly_gcd,
    poles_zeros,
    reactance_at,
    rf_close,
    root_multiplicities,
    squarefree,
)
from src.netlist import load_netlist, parse

S = RationalFunction.s()

RC_DIVIDER = """
node 1
node 2
node 3
branch r1 1 2 g=1 r=1
branch c1 2 3 c=1 r=1
branch r2 1 3 g=2 r=1
"""


def _f(a, b):
    """(a - b) s / ((s + a)(s + b))"""
    return RationalFunction(Poly((0, a - b)), Poly((a * b, a + b, 1)))


@pytest.fixture
def ladder(netlists_dir):
    return load_netlist(netlists_dir / "lc_ladder.net")


class TestPoly:
    """Exact polynomial arithmetic"""

    def test_trailing_zeros_dropped(self):
        assert Poly((1, 2, 0, 0)).degree == 1
        assert Poly(()).degree == -1

    def test_divmod(self):
        q, r = divmod(Poly((-1, 0, 1)), Poly((-1, 1)))
        assert q == Poly((1, 1))
        assert r.is_zero()

    def test_division_by_zero(self):
        with pytest.raises(RationalDivisionError):
            divmod(Poly((1, 1)), Poly(()))

    def test_gcd(self):
        assert poly_gcd(Poly((-1, 0, 1)), Poly((1, 2, 1))) == Poly((1, 1))

    def test_squarefree(self):
        """(s + 1)^2 (s - 2) = s^3 - 3s - 2"""
        factors = dict((m, f) for f, m in squarefree(Poly((-2, -3, 0, 1))))
        assert factors == {1: Poly((-2, 1)), 2: Poly((1, 1))}

    def test_root_multiplicities(self):
        exact = root_multiplicities(Poly((-2, -3, 0, 1)))
        assert [(round(r.value.real, 9), r.multiplicity) for r in exact] == [(-1.0, 2), (2.0, 1)]
        floats = root_multiplicities(Poly((-2.0, -3.0, 0.0, 1.0)))
        assert [r.multiplicity for r in floats] == [2, 1]

    def test_str(self):
        assert str(Poly((0, 2, 0, 1))) == "s^3 + 2 s"

    def test_domains(self):
        """Rational coefficients live in QQ, floats in RR"""
        assert Poly((1, Fraction(1, 2))).rep.get_domain() == QQ
        assert Poly((1.5, 2)).rep.get_domain() == RR
        assert Poly((1, Fraction(1, 2))).is_exact
        assert not Poly((1.5, 2)).is_exact

    def test_compose(self):
        """(s^2 + 1) at s + 1"""
        assert Poly((1, 0, 1)).compose(Poly((1, 1))) == Poly((2, 2, 1))
        assert Poly((1, 2, 3)).reflected() == Poly((1, -2, 3))

    def test_squarefree_higher(self):
        """(s + 1)^3 (s^2 + 1)^2"""
        p = Poly((1, 1)) ** 3 * Poly((1, 0, 1)) ** 2
        factors = dict((m, f) for f, m in squarefree(p))
        assert factors == {2: Poly((1, 0, 1)), 3: Poly((1, 1))}

    def test_repeated_imaginary_roots(self):
        """(s^2 + 1)^2 has j and -j twice, as an exact conjugate pair"""
        found = root_multiplicities(Poly((1, 0, 2, 0, 1)))
        assert [r.multiplicity for r in found] == [2, 2]
        assert found[0].value == found[1].value.conjugate()
        assert abs(found[1].value - 1j) < 1e-12
        assert all(r.on_imaginary_axis for r in found)


class TestRationalFunction:
    """Reduced, monic-denominator rational functions"""

    def test_reduction(self):
        f = RationalFunction(Poly((-1, 0, 1)), Poly((-2, 2)))
        assert f.num == Poly((Fraction(1, 2), Fraction(1, 2)))
        assert f.den == Poly((1,))

    def test_arithmetic(self):
        assert S + 1 / S == RationalFunction(Poly((1, 0, 1)), Poly((0, 1)))
        assert (S * S) / S == S

    def test_compose(self):
        assert compose(1 / S, S + 1) == RationalFunction(1, Poly((1, 1)))

    def test_zero_denominator(self):
        with pytest.raises(RationalDivisionError):
            RationalFunction(1, 0)

    def test_evaluate_at_pole(self):
        with pytest.raises(RationalDivisionError):
            (1 / S)(0)

    def test_branch_function(self):
        """Capacitor (0, C, 1, 0) gives Cs, inductor (1, 0, 0, L) gives 1/(Ls)"""
        assert branch_function(0, 3, 1, 0) == 3 * S
        assert branch_function(1, 0, 0, 2) == 1 / (2 * S)

    def test_rf_close_float(self):
        assert rf_close((S + 1).to_float(), S + 1)


class TestPolesZeros:
    """Poles, zeros and simple-pole residues"""

    def test_negative_residue(self):
        """f_{a,b} has residue -b at -b"""
        report = poles_zeros(_f(Fraction(2), Fraction(1)))
        assert report.residue_at(-1) == pytest.approx(-1.0)
        assert report.degree_gap == -1

    def test_double_pole(self):
        g = RationalFunction(Poly((0, 1)), Poly((1, 1)) ** 2)
        report = poles_zeros(g)
        assert [r.multiplicity for r in report.poles] == [2]
        assert report.residue_at(-1) is None

    def test_zero_function(self):
        with pytest.raises(PreconditionViolatedError):
            poles_zeros(RationalFunction(0))

    def test_repeated_roots_exact(self):
        """(s + 2)^3 / ((s + 1)^2 (s^2 + 4))"""
        f = RationalFunction(Poly((2, 1)) ** 3, Poly((1, 1)) ** 2 * Poly((4, 0, 1)))
        report = poles_zeros(f)
        assert [(r.multiplicity, round(r.value.real, 9), round(r.value.imag, 9)) for r in report.poles] == [
            (2, -1.0, 0.0),
            (1, 0.0, -2.0),
            (1, 0.0, 2.0),
        ]
        assert [(r.multiplicity, round(r.value.real, 9)) for r in report.zeros] == [(3, -2.0)]
        assert report.residue_at(-1) is None
        # residue at 2j: (2 + 2j)^3 / ((1 + 2j)^2 * 4j)
        expected = (2 + 2j) ** 3 / ((1 + 2j) ** 2 * 4j)
        assert report.residue_at(2j) == pytest.approx(expected)
        assert report.degree_gap == -1

    def test_repeated_roots_float(self):
        """Double roots survive float coefficients through clustering"""
        f = RationalFunction(Poly((1, 1)) ** 2 * Poly((3, 1)), Poly((2, 1)) ** 2 * Poly((5, 1))).to_float()
        report = poles_zeros(f)
        assert [(r.multiplicity, pytest.approx(r.value.real)) for r in report.poles] == [(1, -5.0), (2, -2.0)]
        assert [(r.multiplicity, pytest.approx(r.value.real)) for r in report.zeros] == [(1, -3.0), (2, -1.0)]
        assert report.residue_at(-5) == pytest.approx(16 / 9)


class TestPositiveReal:
    """Brune and Foster tests"""

    def test_inductor(self):
        """sL is positive-real and a reactance function"""
        assert is_positive_real(2 * S)
        report = is_reactance_function(2 * S)
        assert report.reactance
        assert report.zeros == (0.0,)

    def test_f_ab(self):
        """PR for a > b despite a negative residue"""
        assert is_positive_real(_f(Fraction(2), Fraction(1)))
        assert not is_positive_real(_f(Fraction(1), Fraction(2)))

    def test_double_pole_left_half_plane(self):
        g = RationalFunction(Poly((0, 1)), Poly((1, 1)) ** 2)
        assert is_positive_real(g)

    def test_right_half_plane_zero(self):
        verdict = is_positive_real(S - 1)
        assert not verdict
        assert verdict.witness == pytest.approx(1.0)

    def test_zero_not_pr(self):
        assert not is_positive_real(RationalFunction(0))

    def test_degree_gap(self):
        assert not is_positive_real(S * S)

    def test_reactance_needs_pr(self):
        with pytest.raises(NotPositiveRealError):
            is_reactance_function(S - 1)

    def test_reactance_at(self):
        assert reactance_at(S, 2.0) == pytest.approx(2.0)

    def test_strict_function(self):
        assert is_strictly_positive_real_function((S + 1) / (S + 2))
        assert not is_strictly_positive_real_function(S)


class TestNetworkFunctions:
    """Z_jk(s) by tree pairs and by cofactors of Y(s)"""

    def test_ladder_impedance(self, ladder):
        """Z_1g = (s^3 + 2s) / (s^2 + 1)"""
        Z = network_impedance_s(ladder, "1", "g")
        assert Z == RationalFunction(Poly((0, 2, 0, 1)), Poly((1, 0, 1)))
        assert rf_close(Z, impedance_s_cofactor(ladder, "1", "g"))

    def test_ladder_is_reactance(self, ladder):
        """Poles at +-j interleave with zeros at 0 and +-j sqrt 2"""
        report = is_reactance_function(network_impedance_s(ladder, "1", "g"))
        assert report.reactance
        assert report.poles == pytest.approx((-1.0, 1.0))
        assert report.zeros == pytest.approx((-2 ** 0.5, 0.0, 2 ** 0.5))

    def test_single_capacitor(self):
        nl = parse("node a\nnode b\nbranch c1 a b c=2 r=1\n")
        assert network_impedance_s(nl, "a", "b") == 1 / (2 * S)
        assert characteristic_polynomial(nl) == Poly((0, 2))

    def test_fixed_admittance_rejected(self, wheatstone):
        with pytest.raises(PreconditionViolatedError):
            network_impedance_s(wheatstone, 1, 2)

    def test_lc_not_strict(self, ladder):
        report = is_strictly_positive_real(ladder, "1", "g")
        assert not report.strict
        assert not report.direct
        assert report.pole_branches

    def test_rc_strict(self):
        """A lossy branch with g, r > 0 makes Z strictly positive-real"""
        report = is_strictly_positive_real(parse(RC_DIVIDER), "1", "3")
        assert report.strict and report.direct and report.agrees
        assert report.witness_branch in ("r1", "r2")
        assert report.impedance == (S + 1) / (3 * S + 2)


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
