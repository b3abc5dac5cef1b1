"""
Command-line interface for NetKit
"""

import itertools
import json
import logging
import sys
from typing import Any, Callable, List, Optional, Sequence

import click
from pydantic import ValidationError

from .analyzer import NetworkAnalyzer
from .config import DEFAULT_MODE, LOG_LEVEL, REL_TOLERANCE, THETA_GRID
from .errors import NetKitError, NotPositiveRealError, error_code, error_line
from .graph import BranchGraph
from .kirchhoff import check_deletion_contraction, count_trees, kappa, kappa_cofactor, kappa_trees
from .laplace import (
    is_positive_real,
    is_reactance_function,
    is_strictly_positive_real,
    network_impedance_s,
    poles_zeros,
)
from .models import CommandResult, Issue, Netlist, OutputFormat, RunConfig, SourceKind
from .modify import augment, augment_cofactor1, contract, contract_cofactor1
from .netlist import add_branch, contract_netlist, delete_branch, load_netlist, serialize
from .netprops import (
    PhaseInterval,
    assign_phase_angles,
    check_kclpq,
    cone_offenders,
    dc_load_flow,
    metric_scan,
    rayleigh_finite_difference,
    rayleigh_sensitivity,
)
from .admittance import build, check_structure
from .report import format_value, output_schema, render, to_json
from .scalar import ScalarMode, Tolerance, is_exact_value, to_scalar
from .solve import (
    check_foster,
    check_jacobi,
    check_superposition,
    check_tellegen,
    common_cofactor,
    impedance_table,
    injection_vector,
)
from .sources import find_one_port, one_port_equivalent, replace_subnetwork

# Setup logging
logging.basicConfig(
    level=LOG_LEVEL,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

NETLIST_ARG = click.argument('netlist', type=click.Path(dir_okay=False))


# ----------------------------
# Shared plumbing
# ----------------------------

def _config(ctx: click.Context, path: str) -> RunConfig:
    opts = ctx.obj or {}
    return RunConfig(
        input_path=path,
        mode=opts.get('mode', DEFAULT_MODE),
        omega=opts.get('omega'),
        sigma=opts.get('sigma'),
        tolerance=Tolerance(rel_tol=opts.get('tol', REL_TOLERANCE)),
        output_format=opts.get('output_format', OutputFormat.HUMAN),
    )


def _load(config: RunConfig) -> Netlist:
    nl = load_netlist(config.input_path)
    changes = {}
    if config.omega is not None:
        changes['omega'] = config.omega
    if config.sigma is not None:
        changes['sigma'] = config.sigma
    return nl.model_copy(update=changes) if changes else nl


def _negligible(value: Any, tol: Tolerance, scale: float = 1.0) -> bool:
    if is_exact_value(value):
        return value == 0
    return abs(complex(value)) <= max(tol.rel_tol * max(scale, 1.0), tol.abs_tol)


def _emit(config: RunConfig, result: CommandResult) -> int:
    if config.output_format == OutputFormat.JSON:
        click.echo(to_json(result))
    else:
        for line in render(result.results):
            click.echo(line)
        if result.residuals:
            click.echo("residuals:")
            for line in render(result.residuals, 1):
                click.echo(line)
        for d in result.diagnostics:
            click.echo(click.style(f"warning: {d['message']}", fg='yellow'), err=True)
        for v in result.violations:
            click.echo(click.style(f"violation [{v['code']}]: {v['message']}", fg='red'))
        if not result.violations:
            click.echo(click.style("ok", fg='green'))
    return EXIT_VIOLATION if result.violations else EXIT_OK


def _run(ctx: click.Context, command: str, path: Optional[str], body: Callable[..., CommandResult]) -> None:
    """Load, run ``body(config, netlist)``, print, and exit with 0/1/2"""
    config = _config(ctx, path or "-")
    try:
        nl = _load(config) if path is not None else None
        result = body(config, nl)
    except (click.ClickException, click.exceptions.Exit, click.exceptions.Abort):
        raise
    except (NetKitError, ValidationError, OSError) as e:
        logger.debug(f"{command} failed", exc_info=True)
        diagnostic = {"code": error_code(e), "message": str(e), "file": path}
        if error_line(e) is not None:
            diagnostic["line"] = error_line(e)
        if isinstance(e, ValidationError):
            diagnostic["code"] = "validation_error"
        elif isinstance(e, OSError):
            diagnostic["code"] = "io_error"
        _fail(ctx, config, command, path, diagnostic, f"{path}: {e}" if path else str(e))
    except Exception as e:
        logger.error(f"{command} failed unexpectedly: {type(e).__name__}: {e}")
        logger.debug("traceback", exc_info=True)
        message = f"internal error: {type(e).__name__}: {e}"
        diagnostic = {"code": error_code(e), "message": message, "file": path}
        _fail(ctx, config, command, path, diagnostic, message)
    ctx.exit(_emit(config, result))


def _fail(ctx: click.Context, config: RunConfig, command: str, path: Optional[str], diagnostic: dict, message: str):
    """Exit 1 with a one-line message, or the JSON envelope carrying the diagnostic"""
    if config.output_format == OutputFormat.JSON:
        click.echo(to_json(CommandResult(command=command, inputs={"netlist": path}, diagnostics=[diagnostic])))
        ctx.exit(EXIT_ERROR)
    raise click.ClickException(message)


def _violations(issues: Sequence[Issue]) -> List[dict]:
    return sorted((i.as_dict() for i in issues), key=lambda d: (d["code"], d["message"]))


# ----------------------------
# Group
# ----------------------------

@click.group()
@click.option(
    '--mode',
    type=click.Choice([m.value for m in ScalarMode]),
    default=DEFAULT_MODE,
    help=f'Scalar arithmetic (default: {DEFAULT_MODE})'
)
@click.option('--omega', default=None, help='Angular frequency, overrides the netlist')
@click.option('--sigma', default=None, help='Real part of s, overrides the netlist')
@click.option(
    '--tol',
    type=float,
    default=REL_TOLERANCE,
    help=f'Relative tolerance for float comparisons (default: {REL_TOLERANCE})'
)
@click.option(
    '--format', 'output_format',
    type=click.Choice([f.value for f in OutputFormat]),
    default=OutputFormat.HUMAN.value,
    help='Output format'
)
@click.option('--verbose', is_flag=True, help='Debug logging')
@click.pass_context
def cli(ctx, mode, omega, sigma, tol, output_format, verbose):
    """NetKit: linear network analysis from the admittance matrix"""
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    ctx.obj = {
        'mode': ScalarMode(mode),
        'omega': omega,
        'sigma': sigma,
        'tol': tol,
        'output_format': OutputFormat(output_format),
    }


# ----------------------------
# Netlist and matrix
# ----------------------------

@cli.command()
@NETLIST_ARG
@click.pass_context
def parse(ctx, netlist):
    """Validate a netlist and echo it in canonical form"""

    def body(config, nl):
        return CommandResult(
            command="parse",
            inputs={"netlist": netlist},
            results={
                "nodes": list(nl.nodes),
                "branches": [b.name for b in nl.branches],
                "sources": [s.name for s in nl.sources],
                "text": serialize(nl),
            },
        )

    _run(ctx, "parse", netlist, body)


@cli.command()
@NETLIST_ARG
@click.pass_context
def ymatrix(ctx, netlist):
    """Print the admittance matrix and its structure report"""

    def body(config, nl):
        analyzer = NetworkAnalyzer(nl, config.mode, config.tolerance)
        Y = analyzer.admittance()
        report = check_structure(Y, config.tolerance)
        return CommandResult(
            command="ymatrix",
            inputs={"netlist": netlist, "mode": config.mode},
            results={"nodes": list(Y.nodes), "Y": [list(row) for row in Y.Y], "structure": report},
        )

    _run(ctx, "ymatrix", netlist, body)


@cli.command()
@NETLIST_ARG
@click.option('--ground', default=None, help='Ground node (name or index, default: first node)')
@click.pass_context
def solve(ctx, netlist, ground):
    """Solve for node voltages with the netlist sources"""

    def body(config, nl):
        result = NetworkAnalyzer(nl, config.mode, config.tolerance).solve(ground)
        return CommandResult(
            command="solve",
            inputs={"netlist": netlist, "ground": ground, "mode": config.mode},
            results=result.as_dict(),
            residuals={"max_abs_yv_minus_i": result.residual},
        )

    _run(ctx, "solve", netlist, body)


@cli.command()
@NETLIST_ARG
@click.argument('j')
@click.argument('k')
@click.pass_context
def impedance(ctx, netlist, j, k):
    """Driving-point impedance Z_jk"""

    def body(config, nl):
        Z = NetworkAnalyzer(nl, config.mode, config.tolerance).impedance(j, k)
        return CommandResult(command="impedance", inputs={"netlist": netlist, "j": j, "k": k}, results={"Z": Z})

    _run(ctx, "impedance", netlist, body)


@cli.command()
@NETLIST_ARG
@click.argument('p')
@click.argument('q')
@click.argument('j')
@click.argument('k')
@click.pass_context
def transfer(ctx, netlist, p, q, j, k):
    """Transfer impedance tz(pq;jk): volts across j,k per amp from q to p"""

    def body(config, nl):
        tz = NetworkAnalyzer(nl, config.mode, config.tolerance).transfer(p, q, j, k)
        return CommandResult(
            command="transfer",
            inputs={"netlist": netlist, "p": p, "q": q, "j": j, "k": k},
            results={"tz": tz},
        )

    _run(ctx, "transfer", netlist, body)


@cli.command()
@NETLIST_ARG
@click.option('--trees', is_flag=True, help='Also count spanning trees and sum over them')
@click.pass_context
def kirchhoff(ctx, netlist, trees):
    """Kirchhoff characteristic kappa"""

    def body(config, nl):
        analyzer = NetworkAnalyzer(nl, config.mode, config.tolerance)
        passive = analyzer.evaluated.model_copy(update={"sources": ()})
        results = {"kappa": kappa(passive, config.mode)}
        residuals = {}
        if trees:
            results["trees"] = count_trees(BranchGraph.from_netlist(passive))
            by_trees = kappa_trees(passive, config.mode).value
            residuals["trees_minus_cofactor"] = by_trees - kappa_cofactor(build(passive, config.mode).Y).value
        return CommandResult(
            command="kirchhoff", inputs={"netlist": netlist, "trees": trees}, results=results, residuals=residuals
        )

    _run(ctx, "kirchhoff", netlist, body)


# ----------------------------
# Identity checks
# ----------------------------

@cli.command()
@NETLIST_ARG
@click.option('--structure', is_flag=True, help='Symmetry, zero sums, rank, equal first cofactors')
@click.option('--foster', is_flag=True, help='Sum of y_jk Z_jk equals n-1')
@click.option('--jacobi', is_flag=True, help='Jacobi identity over node quadruples')
@click.option('--tellegen', is_flag=True, help='Branch power balances source power')
@click.option('--metric', 'thetas', type=float, multiple=True, help='Metric test at angle THETA (repeatable)')
@click.option('--metric-grid', is_flag=True, help='Metric test over the configured angle grid')
@click.option('--kcl', is_flag=True, help='Complex power balance at every node')
@click.option('--superposition', is_flag=True, help='Solution of summed sources equals summed solutions')
@click.option('--deletion-contraction', 'deletion_contraction', is_flag=True, help='kappa recursion per branch')
@click.option('--cone', type=(float, float), default=None, help='Impedance cone for admittance phases in [LO, HI]')
@click.pass_context
def check(ctx, netlist, structure, foster, jacobi, tellegen, thetas, metric_grid, kcl, superposition,
          deletion_contraction, cone):
    """Run identity and property checks; exit 2 when any fails"""
    if not any((structure, foster, jacobi, tellegen, thetas, metric_grid, kcl, superposition,
                deletion_contraction, cone)):
        structure = foster = True

    def body(config, nl):
        tol = config.tolerance
        analyzer = NetworkAnalyzer(nl, config.mode, tol)
        Y = analyzer.admittance()
        n = Y.n
        results, residuals = {}, {}
        issues: List[Issue] = []
        diagnostics: List[dict] = []
        dependent = any(s.is_dependent for s in nl.sources)

        if structure:
            report = check_structure(Y, tol)
            results["structure"] = report
            if not (report.zero_row_sums and report.zero_col_sums and report.first_cofactors_equal):
                issues.append(Issue("violation", "structure", "row/column sums or first cofactors disagree"))
            if report.rank != n - 1:
                issues.append(Issue("violation", "rank", f"rank {report.rank}, expected {n - 1}"))

        if foster:
            report = check_foster(Y, tol)
            residuals["foster"] = report.residual
            residuals["foster_node_identity"] = report.max_node_residual
            results["foster_expected"] = n - 1
            if not _negligible(report.residual, tol, n):
                issues.append(Issue("violation", "foster", f"residual {format_value(report.residual)}"))

        if jacobi:
            worst: Any = 0
            for quad in itertools.combinations(range(1, n + 1), 4):
                r = check_jacobi(Y, *quad, tol)
                if not _negligible(r, tol):
                    issues.append(Issue("violation", "jacobi", f"nodes {quad}: residual {format_value(r)}"))
                if abs(complex(r)) >= abs(complex(worst)):
                    worst = r
            residuals["jacobi"] = worst

        if tellegen or kcl or superposition:
            reduced, solution = analyzer.grounded()
            if dependent and (tellegen or kcl):
                diagnostics.append({"code": "skipped", "message": "power checks skip netlists with dependent sources"})
            else:
                if tellegen:
                    report = check_tellegen(reduced, solution, tol)
                    residuals["tellegen"] = list(report.residuals)
                    residuals["tellegen_quadratic"] = report.quadratic_residual
                    residuals["tellegen_transfer"] = report.transfer_residual
                    for label, r in zip(("v i", "conj(v) i", "v conj(i)"), report.residuals):
                        if not _negligible(r, tol, abs(complex(report.total_power))):
                            issues.append(Issue("violation", "tellegen", f"{label}: residual {format_value(r)}"))
                if kcl:
                    balance = check_kclpq(reduced, solution, tol)
                    residuals["kclpq"] = balance.max_residual
                    if not balance.holds(tol):
                        issues.append(Issue("violation", "kclpq", f"residual {balance.max_residual:.3e}"))
            if superposition:
                parts = [
                    injection_vector(reduced.model_copy(update={"sources": (s,)}), config.mode)
                    for s in reduced.sources
                    if s.kind == SourceKind.ISRC
                ]
                r = check_superposition(analyzer.admittance(reduced), parts, 1, tol)
                residuals["superposition"] = r
                if not _negligible(r, tol):
                    issues.append(Issue("violation", "superposition", f"residual {r:.3e}"))

        if thetas or metric_grid:
            Z = impedance_table(Y, tol)
            for report in metric_scan(Z, list(thetas) + (list(THETA_GRID) if metric_grid else []), tol):
                results.setdefault("metric", []).append(
                    {"theta": report.theta, "holds": report.holds, "violated_triples": len(report.violations)}
                )
                for triple in report.violations:
                    issues.append(Issue("violation", "metric", f"theta={report.theta:.6g}: triple {triple}"))
                for pair in report.nonpositive:
                    issues.append(Issue("violation", "metric", f"theta={report.theta:.6g}: d{pair} <= 0"))

        if deletion_contraction:
            passive = analyzer.evaluated.model_copy(update={"sources": ()})
            worst = 0
            for b in passive.branches:
                r = check_deletion_contraction(passive, b.name, config.mode)
                if not _negligible(r, tol):
                    issues.append(Issue("violation", "deletion_contraction", f"branch '{b.name}': residual {format_value(r)}"))
                if abs(complex(r)) >= abs(complex(worst)):
                    worst = r
            residuals["deletion_contraction"] = worst

        if cone is not None:
            interval = PhaseInterval(cone[0], cone[1], True, True)
            offenders = cone_offenders(Y, interval, tol)
            results["cone_offenders"] = offenders
            for pair in offenders:
                issues.append(Issue("violation", "cone", f"Z{pair} outside [{-cone[1]:.6g}, {-cone[0]:.6g}]"))

        return CommandResult(
            command="check",
            inputs={"netlist": netlist, "mode": config.mode},
            results=results,
            residuals=residuals,
            violations=_violations(issues),
            diagnostics=diagnostics,
        )

    _run(ctx, "check", netlist, body)


# ----------------------------
# Sensitivity and modifications
# ----------------------------

@cli.command()
@NETLIST_ARG
@click.argument('j')
@click.argument('k')
@click.option('--branch', required=True, help='Branch whose admittance is varied')
@click.pass_context
def sensitivity(ctx, netlist, j, k, branch):
    """dZ_jk / dy for one branch, against a finite difference"""

    def body(config, nl):
        analyzer = NetworkAnalyzer(nl, config.mode, config.tolerance)
        passive = analyzer.evaluated.model_copy(update={"sources": ()})
        jj, kk = passive.resolve_node(j), passive.resolve_node(k)
        p, q = passive.branch_endpoints(branch)
        derivative = rayleigh_sensitivity(build(passive, config.mode), jj, kk, p, q, config.tolerance)
        estimate = rayleigh_finite_difference(passive, jj, kk, branch, tol=config.tolerance)
        return CommandResult(
            command="sensitivity",
            inputs={"netlist": netlist, "j": j, "k": k, "branch": branch},
            results={"sensitivity": derivative, "finite_difference": estimate},
            residuals={"sensitivity_minus_finite_difference": complex(derivative) - estimate},
        )

    _run(ctx, "sensitivity", netlist, body)


@cli.command()
@NETLIST_ARG
@click.option('--contract', 'contract_pair', nargs=2, default=None, help='Identify nodes J and K')
@click.option('--delete', 'delete_name', default=None, help='Remove a branch')
@click.option('--augment', 'augment_args', nargs=3, default=None, help='Add admittance Y between J and K')
@click.pass_context
def modify(ctx, netlist, contract_pair, delete_name, augment_args):
    """Apply one modification; compare c(Y) from the update formula with a rebuild"""
    chosen = [x for x in (contract_pair, delete_name, augment_args) if x]
    if len(chosen) != 1:
        raise click.UsageError("choose exactly one of --contract, --delete, --augment")

    def body(config, nl):
        analyzer = NetworkAnalyzer(nl, config.mode, config.tolerance)
        base = analyzer.evaluated.model_copy(update={"sources": ()})
        Y = build(base, config.mode).Y
        if contract_pair:
            j, k = sorted(base.resolve_node(x) for x in contract_pair)
            modified = contract_netlist(base, j, k)
            formula = contract_cofactor1(Y, j, k)
            matrix = contract(Y, j, k)[0]
        elif delete_name:
            # deletion is augmentation by -y
            h, t = base.branch_endpoints(delete_name)
            y = to_scalar(base.branch(delete_name).y, config.mode)
            modified = delete_branch(base, delete_name)
            formula = augment_cofactor1(Y, h, t, -y)
            matrix = augment(Y, h, t, -y)[0]
        else:
            a, b, value = augment_args
            j, k = base.resolve_node(a), base.resolve_node(b)
            modified = add_branch(base, "aug", base.name_of(j), base.name_of(k), value)
            y_plus = to_scalar(modified.branch("aug").y, config.mode)
            formula = augment_cofactor1(Y, j, k, y_plus)
            matrix = augment(Y, j, k, y_plus)[0]
        direct = common_cofactor(build(modified, config.mode).Y) if modified.n > 1 else None
        residuals = {"formula_minus_matrix": formula - common_cofactor(matrix)} if matrix.shape[0] > 1 else {}
        if direct is not None:
            residuals["formula_minus_rebuild"] = formula - direct
        issues = [
            Issue("violation", "modification", f"{label}: {format_value(r)}")
            for label, r in residuals.items()
            if not _negligible(r, config.tolerance)
        ]
        return CommandResult(
            command="modify",
            inputs={"netlist": netlist},
            results={"c_before": common_cofactor(Y), "c_after": formula, "text": serialize(modified)},
            residuals=residuals,
            violations=_violations(issues),
        )

    _run(ctx, "modify", netlist, body)


@cli.command()
@NETLIST_ARG
@click.option('--port', nargs=2, required=True, help='Port nodes P Q')
@click.option('--side', 'side_nodes', multiple=True, help='Node on the side to keep (repeatable)')
@click.pass_context
def reduce(ctx, netlist, port, side_nodes):
    """Replace one side of a two-node cutset by its Norton equivalent"""

    def body(config, nl):
        analyzer = NetworkAnalyzer(nl, config.mode, config.tolerance)
        base = analyzer.evaluated
        decomposition = find_one_port(base, port[0], port[1], side=side_nodes or None)
        if decomposition is None:
            return CommandResult(
                command="reduce",
                inputs={"netlist": netlist, "port": list(port)},
                results={"decomposition": None},
                diagnostics=[{"code": "trivial", "message": "no nontrivial one-port decomposition"}],
            )
        equivalent = one_port_equivalent(base, decomposition, "B", config.mode)
        results = {
            "A": [base.name_of(k) for k in decomposition.A],
            "B": [base.name_of(k) for k in decomposition.B],
            "norton": {"I": equivalent.norton.I, "y": equivalent.norton.y},
            "merged": {"I": equivalent.merged.I, "y": equivalent.merged.y},
            "open_circuit_voltage": equivalent.open_circuit_voltage,
            "degenerate": equivalent.degenerate,
            "text": serialize(replace_subnetwork(base, decomposition, equivalent)),
        }
        return CommandResult(command="reduce", inputs={"netlist": netlist, "port": list(port)}, results=results)

    _run(ctx, "reduce", netlist, body)


# ----------------------------
# Laplace domain and phase angles
# ----------------------------

@cli.command()
@NETLIST_ARG
@click.argument('j')
@click.argument('k')
@click.pass_context
def prcheck(ctx, netlist, j, k):
    """Positive-real test of Z_jk(s) for a (g,c,r,l) network"""

    def body(config, nl):
        passive = nl.model_copy(update={"sources": ()})
        Z = network_impedance_s(passive, j, k)
        verdict = is_positive_real(Z)
        results = {"Z": Z, "positive_real": verdict.positive_real, "poles_zeros": poles_zeros(Z)}
        issues, diagnostics = [], []
        if verdict:
            try:
                results["reactance"] = is_reactance_function(Z).reactance
            except NotPositiveRealError:
                results["reactance"] = False
            strict = is_strictly_positive_real(passive, j, k)
            results["strictly_positive_real"] = strict.strict
            if not strict.agrees:
                diagnostics.append({"code": "strict_disagreement", "message": "branch criterion and direct test disagree"})
        else:
            witness = f" at s={format_value(verdict.witness)}" if verdict.witness is not None else ""
            issues.append(Issue("violation", "not_positive_real", f"{verdict.reason}{witness}"))
        return CommandResult(
            command="prcheck",
            inputs={"netlist": netlist, "j": j, "k": k},
            results=results,
            violations=_violations(issues),
            diagnostics=diagnostics,
        )

    _run(ctx, "prcheck", netlist, body)


@cli.command()
@NETLIST_ARG
@click.option('--ground', default=None, help='Ground node (default: first node)')
@click.option('--strict', is_flag=True, help='Fail on the first branch with an undefined phase lag')
@click.pass_context
def phase(ctx, netlist, ground, strict):
    """Phase angles of an inductive flow and the DC load-flow estimate"""

    def body(config, nl):
        analyzer = NetworkAnalyzer(nl, ScalarMode.FLOAT64, config.tolerance)
        reduced, solution = analyzer.grounded(ground)
        assignment = assign_phase_angles(reduced, solution, config.tolerance, strict=strict)
        flow = dc_load_flow(reduced, solution, assignment.angles, config.tolerance)
        results = {
            "angles": {reduced.name_of(k): a for k, a in sorted(assignment.angles.items())},
            "generators": [reduced.name_of(k) for k in assignment.generators],
            "max_nodes": [reduced.name_of(k) for k in assignment.max_nodes],
            "load_flow": [
                {"branch": e.branch, "p": e.p, "p_estimate": e.approx, "relative_error": e.relative_error}
                for e in flow
            ],
        }
        return CommandResult(
            command="phase",
            inputs={"netlist": netlist, "ground": ground, "mode": ScalarMode.FLOAT64, "strict": strict},
            results=results,
            violations=_violations(assignment.violations),
        )

    _run(ctx, "phase", netlist, body)


@cli.command()
def schema():
    """Print the JSON schema of the output envelope"""
    click.echo(json.dumps(output_schema(), indent=2))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point mapping click usage errors to exit code 1"""
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except click.exceptions.Abort:
        return EXIT_ERROR
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
