"""
Tests for the analysis pipeline: evaluation, source elimination, solve and
impedance views.
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analyzer import NetworkAnalyzer
from src.errors import PreconditionViolatedError
from src.netlist import load_netlist, parse
from src.scalar import ExactComplex, ScalarMode, close

V2 = Fraction(150, 31)
V3 = Fraction(30, 31)


@pytest.fixture
def divider(netlists_dir):
    return load_netlist(netlists_dir / "source_divider.net")


class TestSolve:
    """Node voltages of the original netlist"""

    def test_divider_exact(self, divider):
        result = NetworkAnalyzer(divider, ScalarMode.EXACT).solve("g")
        assert result.ground == "g"
        assert result.voltage("1") == 10
        assert result.voltage("2") == V2
        assert result.voltage("3") == V3
        assert result.residual == 0.0

    def test_source_current(self, divider):
        """Current delivered by v1 equals the current in r1"""
        result = NetworkAnalyzer(divider, ScalarMode.EXACT).solve("g")
        assert result.source_currents["v1"] == Fraction(80, 31)
        currents = {name: i for name, _, i in result.branches}
        assert currents["r1"] == Fraction(80, 31)

    def test_ground_choice(self, divider):
        """Voltages move with the reference, differences do not"""
        result = NetworkAnalyzer(divider, ScalarMode.EXACT).solve("2")
        assert result.voltage("2") == 0
        assert result.voltage("1") - result.voltage("g") == 10

    def test_float_mode(self, divider):
        result = NetworkAnalyzer(divider, ScalarMode.FLOAT64).solve("g")
        assert close(result.voltage("2"), float(V2))

    def test_eliminations_reported(self, divider):
        result = NetworkAnalyzer(divider, ScalarMode.EXACT).solve()
        assert [e.source for e in result.eliminations] == ["v1"]
        assert result.as_dict()["eliminated_sources"] == ["v1"]

    def test_load_flow(self, netlists_dir):
        nl = load_netlist(netlists_dir / "dc_load_flow.net")
        result = NetworkAnalyzer(nl, ScalarMode.EXACT).solve("g")
        assert result.voltage("1") == 1
        assert result.voltage("2") == ExactComplex(Fraction(100, 101), Fraction(-10, 101))


class TestFloatSolve:
    """complex128 solves through voltage-source elimination"""

    def test_divider_voltages(self, divider):
        result = NetworkAnalyzer(divider, ScalarMode.FLOAT64).solve("g")
        assert isinstance(result.voltage("1"), complex)
        assert result.voltage("1") == pytest.approx(10)
        assert result.voltage("2") == pytest.approx(float(V2))
        assert result.voltage("3") == pytest.approx(float(V3))
        assert result.residual < 1e-9

    def test_divider_source_current(self, divider):
        result = NetworkAnalyzer(divider, ScalarMode.FLOAT64).solve("g")
        assert result.source_currents["v1"] == pytest.approx(80 / 31)

    def test_chained_sources(self):
        """Two vsrcs sharing a node: the second value is shifted by the first"""
        nl = parse(
            "node g\nnode a\nnode b\nnode c\n"
            "vsrc va a g v=2\n"
            "vsrc vb b a v=3\n"
            "branch r1 b c y=1\n"
            "branch r2 c g y=1\n"
        )
        exact = NetworkAnalyzer(nl, ScalarMode.EXACT).solve("g")
        approx = NetworkAnalyzer(nl, ScalarMode.FLOAT64).solve("g")
        assert exact.voltage("b") == 5
        assert exact.voltage("c") == Fraction(5, 2)
        for node in ("a", "b", "c"):
            assert approx.voltage(node) == pytest.approx(complex(exact.voltage(node)))

    def test_complex_source_value(self):
        nl = parse("node g\nnode a\nnode b\nvsrc v1 a g v=1+2j\nbranch r1 a b y=1\nbranch r2 b g y=1\n")
        result = NetworkAnalyzer(nl, ScalarMode.FLOAT64).solve("g")
        assert result.voltage("a") == pytest.approx(1 + 2j)
        assert result.voltage("b") == pytest.approx(0.5 + 1j)
        assert result.source_currents["v1"] == pytest.approx(0.5 + 1j)


class TestEvaluation:
    """GCRL branches at the netlist frequency"""

    def test_ladder_impedance(self, netlists_dir):
        """Z(s) = (s^3 + 2s)/(s^2 + 1) at s = j/2"""
        nl = load_netlist(netlists_dir / "lc_ladder.net")
        Z = NetworkAnalyzer(nl, ScalarMode.EXACT).impedance("1", "g")
        assert Z == ExactComplex(0, Fraction(7, 6))

    def test_missing_frequency(self):
        nl = parse("node a\nnode b\nbranch c1 a b c=1 r=1\n")
        with pytest.raises(PreconditionViolatedError):
            NetworkAnalyzer(nl).evaluated


class TestImpedanceViews:
    """Driving-point and transfer impedances through the pipeline"""

    def test_wheatstone(self, wheatstone):
        analyzer = NetworkAnalyzer(wheatstone, ScalarMode.EXACT)
        assert analyzer.impedance(1, 3) == ExactComplex(Fraction(25, 2701), Fraction(5251, 54020))
        assert analyzer.transfer(1, 2, 3, 4) == analyzer.transfer(3, 4, 1, 2)

    def test_vsrc_ignored(self, divider):
        """Impedances use the passive network"""
        Z = NetworkAnalyzer(divider, ScalarMode.EXACT).impedance("3", "g")
        # r3 in parallel with r2 + r4; node 1 hangs off r1 alone
        assert Z == Fraction(7, 8)


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
