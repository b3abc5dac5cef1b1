"""
Exception hierarchy for NetKit.

Every error carries a stable ``code`` so the CLI can report it in the
``diagnostics`` block of its JSON output.
"""

from __future__ import annotations

from typing import Iterable, Optional, Tuple


class NetKitError(Exception):
    """Base class for all library errors"""

    code = "netkit_error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__


# -------------------------
# 1) Netlist errors
# -------------------------

class NetlistSyntaxError(NetKitError):
    """Malformed netlist text, reported with 1-based line/column"""

    code = "syntax_error"

    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
        self.detail = message


class DuplicateNameError(NetKitError):
    code = "duplicate_name"


class UnknownNodeError(NetKitError):
    code = "unknown_node"


class InvalidGCRLError(NetKitError):
    code = "invalid_gcrl"


class PoleAtSError(NetKitError):
    """A (g,c,r,l) element has r + s*l = 0 at the evaluation point"""

    code = "pole_at_s"

    def __init__(self, branch: str):
        super().__init__(f"branch '{branch}' has a pole at the evaluation point")
        self.branch = branch


# -------------------------
# 2) Linear algebra errors
# -------------------------

class NotSquareError(NetKitError):
    code = "not_square"


class TooLargeError(NetKitError):
    code = "too_large"


class EqualIndicesError(NetKitError):
    code = "equal_indices"


class IndexOutOfRangeError(NetKitError):
    code = "index_out_of_range"


class LengthMismatchError(NetKitError):
    code = "length_mismatch"


class IndexConflictError(NetKitError):
    code = "index_conflict"


# -------------------------
# 3) Network solution errors
# -------------------------

class SingularNetworkError(NetKitError):
    """Common first cofactor is zero, so no unique grounded solution exists"""

    code = "singular_network"


class UnbalancedInjectionError(NetKitError):
    code = "unbalanced_injection"


class InconsistentSolutionError(NetKitError):
    code = "inconsistent_solution"


class NonDirectBranchError(NetKitError):
    code = "non_direct_branch"


class UnknownEdgeError(NetKitError):
    code = "unknown_edge"


class UnknownBranchError(NetKitError):
    code = "unknown_branch"


class DisconnectedError(NetKitError):
    code = "disconnected"


class UnknownCaseError(NetKitError):
    code = "unknown_case"


# -------------------------
# 4) Property checker errors
# -------------------------

class ZeroImmittanceError(NetKitError):
    code = "zero_immittance"


class PreconditionViolatedError(NetKitError):
    code = "precondition_violated"


class NoRealRootError(NetKitError):
    code = "no_real_root"


class NotInductivelyLoadedError(NetKitError):
    code = "not_inductively_loaded"

    def __init__(self, branches: Iterable[str]):
        self.branches: Tuple[str, ...] = tuple(branches)
        super().__init__(
            "branches not inductively loaded: " + ", ".join(self.branches)
        )


class ConditionAcdeltauFailedError(NetKitError):
    """Phase step on a branch cannot be recovered within (-pi/2, pi/2]"""

    code = "phase_condition_failed"

    def __init__(self, branch: str):
        super().__init__(f"phase condition fails on branch '{branch}'")
        self.branch = branch


class PhaseOutsideIntervalError(NetKitError):
    code = "phase_outside_interval"


class RootFindingFailedError(NetKitError):
    code = "root_finding_failed"


class NotPositiveRealError(NetKitError):
    code = "not_positive_real"


class RationalDivisionError(NetKitError, ZeroDivisionError):
    """Division of a rational function by the zero function"""

    code = "divide_by_zero"


# -------------------------
# 5) Source algebra errors
# -------------------------

class ZeroAdmittanceError(NetKitError):
    code = "zero_admittance"


class SingularSubnetworkError(NetKitError):
    code = "singular_subnetwork"


class UnknownSourceError(NetKitError):
    code = "unknown_source"


class MissingSeriesAdmittanceError(NetKitError):
    code = "missing_series_admittance"


class VoltageSourceLoopError(NetKitError):
    code = "voltage_source_loop"


def error_code(exc: BaseException) -> str:
    """Stable code for any exception; non-library errors map to 'internal'"""
    return getattr(exc, "code", None) or "internal"


def error_line(exc: BaseException) -> Optional[int]:
    return getattr(exc, "line", None)
