"""
Automated Test Suite for NetKit
Configuration, models, the netlist format and the command-line interface
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from click.testing import CliRunner
from pydantic import ValidationError

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import EXIT_ERROR, EXIT_OK, EXIT_VIOLATION, cli, main
from src.config import CONFIG, NETLISTS_DIR, _load_overrides
from src.errors import (
    DuplicateNameError,
    InvalidGCRLError,
    NetlistSyntaxError,
    UnknownBranchError,
    UnknownNodeError,
)
from src.models import GCRL, Branch, Netlist, RunConfig, Source, SourceKind
from src.netlist import element_admittance, load_netlist, parse, serialize
from src.scalar import ExactComplex, ScalarMode

TWO_SIDES = """
node p
node q
node a
node b
branch pa p a y=1
branch aq a q y=1
branch pb p b y=2
branch bq b q y=2
branch pq p q y=5
isrc ib q b i=3
"""


def _net(name):
    return str(NETLISTS_DIR / name)


def _json(result):
    return json.loads(result.output)


@pytest.fixture
def runner():
    return CliRunner()


class TestConfigLoading:
    """Test configuration loading and defaults"""

    def test_config_exists(self):
        """Test that config object exists"""
        assert CONFIG is not None
        assert CONFIG["DEFAULT_MODE"] in ("float64", "exact")

    def test_paths_configured(self):
        """Test that the bundled netlists are found"""
        assert NETLISTS_DIR.is_dir()
        assert (NETLISTS_DIR / "wheatstone_inductive.net").exists()

    def test_tolerances_positive(self):
        assert CONFIG["REL_TOLERANCE"] > 0
        assert CONFIG["ROOT_CLUSTER_TOL"] > 0

    def test_yaml_overrides(self, tmp_path):
        """Test keys are lower-cased"""
        path = tmp_path / "netkit.yaml"
        path.write_text("TOLERANCE: 1.0e-6\nmode: exact\n", encoding="utf-8")
        assert _load_overrides(str(path)) == {"tolerance": 1e-6, "mode": "exact"}

    def test_broken_overrides_ignored(self, tmp_path):
        """Test a bad file only logs a warning"""
        bad = tmp_path / "bad.yaml"
        bad.write_text("a: [1, 2\n", encoding="utf-8")
        listing = tmp_path / "list.yaml"
        listing.write_text("- 1\n- 2\n", encoding="utf-8")
        assert _load_overrides(str(bad)) == {}
        assert _load_overrides(str(listing)) == {}
        assert _load_overrides(str(tmp_path / "missing.yaml")) == {}
        assert _load_overrides(None) == {}


class TestModels:
    """Test Pydantic data models"""

    def test_gcrl_constraints(self):
        """Test invalid (g, c, r, l) quadruples are rejected"""
        assert GCRL(g=1, l=2).l == 2
        with pytest.raises(ValidationError):
            GCRL(l=1)
        with pytest.raises(ValidationError):
            GCRL(g=-1, r=1)
        with pytest.raises(ValidationError):
            GCRL(g=1, c=1, r=1, l=1)

    def test_branch_needs_one_element(self):
        with pytest.raises(ValidationError):
            Branch(name="a", head="1", tail="2")
        with pytest.raises(ValidationError):
            Branch(name="a", head="1", tail="1", y=1)
        assert Branch(name="a", head="1", tail="2", y="1-2j").y == ExactComplex(1, -2)

    def test_source_control(self):
        with pytest.raises(ValidationError):
            Source(name="s", kind=SourceKind.VCCS, pos="1", neg="2", value=1)
        src = Source(name="s", kind=SourceKind.VCCS, pos="1", neg="2", value=1, ctrl_pos="3", ctrl_neg="4")
        assert src.is_dependent
        assert src.referenced_nodes() == ("1", "2", "3", "4")

    def test_netlist_names(self):
        with pytest.raises(ValidationError):
            Netlist(nodes=("a", "a"))
        with pytest.raises(ValidationError):
            Netlist(nodes=("a", "b"), branches=(Branch(name="x", head="a", tail="c", y=1),))

    def test_resolve_node(self):
        """Test names win over indices"""
        nl = parse("node 2\nnode 1\nbranch a 2 1 y=1\n")
        assert nl.resolve_node("1") == 2
        assert nl.resolve_node(1) == 1
        with pytest.raises(UnknownNodeError):
            nl.resolve_node("x")

    def test_s_point(self, netlists_dir):
        assert load_netlist(netlists_dir / "lc_ladder.net").s_point == ExactComplex(0, Fraction(1, 2))
        assert parse("node a\n").s_point is None

    def test_run_config(self, tmp_path):
        config = RunConfig(input_path=tmp_path / "x.net", omega="1/2", mode="exact")
        assert config.omega == Fraction(1, 2)
        assert config.mode == ScalarMode.EXACT


class TestNetlistFormat:
    """Parsing, canonical output and element evaluation"""

    def test_bundled_netlists_parse(self, netlists_dir):
        for path in sorted(netlists_dir.glob("*.net")):
            nl = load_netlist(path)
            assert parse(serialize(nl)) == nl

    def test_isrc_orientation(self):
        nl = parse("node g\nnode 1\nisrc gen g 1 i=2\n")
        assert nl.source("gen").pos == "1"
        assert serialize(nl).splitlines()[-1] == "isrc gen g 1 i=2"

    def test_literals(self):
        nl = parse("node a\nnode b\nbranch x a b y=1/3-2.5j\nbranch z a b y=-10j\n")
        assert nl.branch("x").y == ExactComplex(Fraction(1, 3), Fraction(-5, 2))
        assert nl.branch("z").y == ExactComplex(0, -10)

    def test_unknown_statement(self):
        with pytest.raises(NetlistSyntaxError) as e:
            parse("node a\n  wire x a b\n")
        assert (e.value.line, e.value.col) == (2, 3)

    def test_self_loop(self):
        with pytest.raises(NetlistSyntaxError):
            parse("branch x a a y=1\n")

    def test_mixed_element(self):
        with pytest.raises(NetlistSyntaxError):
            parse("branch x a b y=1 g=2\n")

    def test_invalid_gcrl(self):
        with pytest.raises(InvalidGCRLError):
            parse("branch l1 a b l=1\n")

    def test_duplicate_node(self):
        with pytest.raises(DuplicateNameError):
            parse("node a\nnode a\n")

    def test_unknown_control_branch(self):
        with pytest.raises(UnknownBranchError):
            parse("node a\nnode b\nbranch x a b y=1\ncccs f a b ctrl=nope gain=2\n")

    def test_element_admittance(self):
        """Capacitor C at s = j gives jC; inductor L gives -j/L"""
        assert element_admittance(GCRL(c=2, r=1), ExactComplex(0, 1)) == ExactComplex(0, 2)
        assert element_admittance(GCRL(g=1, l=4), ExactComplex(0, 1)) == ExactComplex(0, Fraction(-1, 4))


@pytest.mark.integration
class TestCLI:
    """Commands end to end through click"""

    def test_impedance_exact(self, runner):
        result = runner.invoke(cli, ["--mode", "exact", "impedance", _net("wheatstone_inductive.net"), "1", "3"])
        assert result.exit_code == EXIT_OK
        assert "Z: 25/2701 + 5251/54020 j" in result.output

    def test_impedance_json(self, runner):
        result = runner.invoke(
            cli, ["--mode", "exact", "--format", "json", "impedance", _net("wheatstone_inductive.net"), "1", "3"]
        )
        payload = _json(result)
        assert payload["command"] == "impedance"
        assert payload["results"]["Z"] == {"re": "25/2701", "im": "5251/54020"}

    def test_kirchhoff_trees(self, runner):
        result = runner.invoke(
            cli, ["--mode", "exact", "--format", "json", "kirchhoff", "--trees", _net("tetrahedron.net")]
        )
        payload = _json(result)
        assert payload["results"]["trees"] == 16
        assert payload["results"]["kappa"] == {"re": "16", "im": "0"}
        assert payload["residuals"]["trees_minus_cofactor"] == {"re": "0", "im": "0"}

    def test_check_default(self, runner):
        result = runner.invoke(cli, ["check", _net("wheatstone_resistive.net")])
        assert result.exit_code == EXIT_OK

    def test_check_foster_exact(self, runner):
        result = runner.invoke(
            cli, ["--mode", "exact", "--format", "json", "check", "--foster", "--jacobi", _net("wheatstone_inductive.net")]
        )
        assert result.exit_code == EXIT_OK
        assert _json(result)["residuals"]["foster"] == {"re": "0", "im": "0"}

    def test_metric_violation(self, runner):
        """The inductive bridge is no metric at theta = 0"""
        result = runner.invoke(cli, ["--format", "json", "check", "--metric", "0", _net("wheatstone_inductive.net")])
        assert result.exit_code == EXIT_VIOLATION
        assert {v["code"] for v in _json(result)["violations"]} == {"metric"}

    def test_solve_divider(self, runner):
        result = runner.invoke(
            cli, ["--mode", "exact", "--format", "json", "solve", "--ground", "g", _net("source_divider.net")]
        )
        assert result.exit_code == EXIT_OK
        payload = _json(result)["results"]
        assert payload["voltages"]["2"] == {"re": "150/31", "im": "0"}
        assert payload["source_currents"]["v1"] == {"re": "80/31", "im": "0"}
        assert payload["eliminated_sources"] == ["v1"]

    def test_prcheck_ladder(self, runner):
        result = runner.invoke(cli, ["--format", "json", "prcheck", _net("lc_ladder.net"), "1", "g"])
        assert result.exit_code == EXIT_OK
        payload = _json(result)["results"]
        assert payload["positive_real"] is True
        assert payload["reactance"] is True
        assert payload["strictly_positive_real"] is False

    def test_modify_contract(self, runner):
        """Unit K4 with two nodes merged has 8 spanning trees"""
        result = runner.invoke(
            cli, ["--mode", "exact", "--format", "json", "modify", "--contract", "1", "2", _net("tetrahedron.net")]
        )
        assert result.exit_code == EXIT_OK
        assert _json(result)["results"]["c_after"] == {"re": "8", "im": "0"}

    def test_reduce(self, runner, tmp_path):
        path = tmp_path / "two_sides.net"
        path.write_text(TWO_SIDES, encoding="utf-8")
        result = runner.invoke(cli, ["--mode", "exact", "--format", "json", "reduce", "--port", "p", "q", str(path)])
        assert result.exit_code == EXIT_OK
        payload = _json(result)["results"]
        assert payload["B"] == ["b"]
        assert payload["norton"]["I"] == {"re": "3/2", "im": "0"}

    def test_phase(self, runner):
        result = runner.invoke(cli, ["--format", "json", "phase", "--ground", "g", _net("dc_load_flow.net")])
        assert result.exit_code == EXIT_OK
        payload = _json(result)["results"]
        assert payload["generators"] == ["1"]
        assert payload["load_flow"][0]["relative_error"] < 0.01

    def test_schema(self, runner):
        result = runner.invoke(cli, ["schema"])
        assert "diagnostics" in json.loads(result.output)["properties"]

    def test_sensitivity_keys(self, runner):
        result = runner.invoke(
            cli,
            ["--format", "json", "sensitivity", "--branch", "alpha", _net("wheatstone_resistive.net"), "1", "3"],
        )
        assert result.exit_code == EXIT_OK
        payload = _json(result)
        assert set(payload["results"]) == {"sensitivity", "finite_difference"}
        assert set(payload["residuals"]) == {"sensitivity_minus_finite_difference"}

    def test_phase_keys(self, runner):
        result = runner.invoke(cli, ["--format", "json", "phase", "--ground", "g", _net("dc_load_flow.net")])
        payload = _json(result)
        assert payload["inputs"]["mode"] == "float64"
        assert set(payload["results"]["load_flow"][0]) == {"branch", "p", "p_estimate", "relative_error"}

    def test_result_keys_snake_case(self, runner):
        """Every key is lower snake_case unless it is a bare circuit symbol"""
        symbols = {"Y", "Z", "I", "A", "B", "y", "tz"}
        runs = [
            ["parse", _net("dc_load_flow.net")],
            ["--mode", "exact", "solve", "--ground", "g", _net("source_divider.net")],
            ["phase", "--ground", "g", _net("dc_load_flow.net")],
            ["sensitivity", "--branch", "alpha", _net("wheatstone_resistive.net"), "1", "3"],
            ["kirchhoff", "--trees", _net("tetrahedron.net")],
        ]
        for args in runs:
            payload = _json(runner.invoke(cli, ["--format", "json"] + args))
            for key in list(payload["results"]) + list(payload["residuals"]):
                assert key in symbols or key == key.lower(), f"{args[-1]}: {key}"

    def test_parse_canonical(self, runner):
        result = runner.invoke(cli, ["--format", "json", "parse", _net("dc_load_flow.net")])
        text = _json(result)["results"]["text"]
        assert parse(text) == load_netlist(NETLISTS_DIR / "dc_load_flow.net")


class TestErrorHandling:
    """Exit codes and diagnostics for bad input"""

    def test_missing_file(self, runner):
        result = runner.invoke(cli, ["--format", "json", "parse", "does_not_exist.net"])
        assert result.exit_code == EXIT_ERROR
        assert _json(result)["diagnostics"][0]["code"] == "io_error"

    def test_syntax_error_line(self, runner, tmp_path):
        path = tmp_path / "bad.net"
        path.write_text("node a\nbogus x\n", encoding="utf-8")
        result = runner.invoke(cli, ["--format", "json", "parse", str(path)])
        assert result.exit_code == EXIT_ERROR
        diagnostic = _json(result)["diagnostics"][0]
        assert diagnostic["code"] == "syntax_error"
        assert diagnostic["line"] == 2

    def test_human_error(self, runner):
        result = runner.invoke(cli, ["impedance", _net("wheatstone_inductive.net"), "1", "9"])
        assert result.exit_code == EXIT_ERROR

    def test_usage_error_maps_to_one(self):
        assert main(["modify", _net("tetrahedron.net")]) == EXIT_ERROR

    def test_unexpected_error_human(self, runner, monkeypatch):
        def broken(*args, **kwargs):
            raise RuntimeError("boom")

        monkeypatch.setattr("src.cli.NetworkAnalyzer", broken)
        result = runner.invoke(cli, ["impedance", _net("wheatstone_inductive.net"), "1", "3"])
        assert result.exit_code == EXIT_ERROR
        assert "internal error: RuntimeError: boom" in result.output
        assert "Traceback" not in result.output
        assert not isinstance(result.exception, RuntimeError)

    def test_unexpected_error_json(self, runner, monkeypatch):
        def broken(*args, **kwargs):
            raise ZeroDivisionError("division by zero")

        monkeypatch.setattr("src.cli.NetworkAnalyzer", broken)
        result = runner.invoke(
            cli, ["--format", "json", "impedance", _net("wheatstone_inductive.net"), "1", "3"]
        )
        assert result.exit_code == EXIT_ERROR
        diagnostic = _json(result)["diagnostics"][0]
        assert diagnostic["code"] == "internal"
        assert "ZeroDivisionError" in diagnostic["message"]

    def test_unexpected_error_through_main(self, monkeypatch):
        def broken(*args, **kwargs):
            raise KeyError("missing")

        monkeypatch.setattr("src.cli.NetworkAnalyzer", broken)
        assert main(["impedance", _net("wheatstone_inductive.net"), "1", "3"]) == EXIT_ERROR


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
