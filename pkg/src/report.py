"""
Output encoding for CLI results.

JSON scalars: exact values become {"re": "p/q", "im": "p/q"}, float values
{"re": float, "im": float}. Reports are walked recursively; dataclasses with
an ``as_dict`` method use it.
"""

import dataclasses
import json
import numbers
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List

import numpy as np

from .laplace import Poly, RationalFunction
from .models import CommandResult, Issue
from .scalar import ExactComplex, format_exact, format_fraction


def encode_scalar(x: Any) -> Dict[str, Any]:
    if isinstance(x, ExactComplex):
        return {"re": format_fraction(x.re), "im": format_fraction(x.im)}
    if isinstance(x, Fraction):
        return {"re": format_fraction(x), "im": "0"}
    z = complex(x)
    return {"re": z.real, "im": z.imag}


def encode(obj: Any) -> Any:
    """JSON-safe structure for results, residuals and reports"""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (ExactComplex, Fraction, complex, np.complexfloating)):
        return encode_scalar(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Real):
        return float(obj)
    if isinstance(obj, (Poly, RationalFunction)):
        return str(obj)
    if isinstance(obj, Issue):
        return obj.as_dict()
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [encode(x) for x in obj]
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [encode(x) for x in obj]
    if dataclasses.is_dataclass(obj):
        if hasattr(obj, "as_dict"):
            return encode(obj.as_dict())
        return {f.name: encode(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    return str(obj)


def to_json(result: CommandResult) -> str:
    payload = {
        "command": result.command,
        "inputs": encode(result.inputs),
        "results": encode(result.results),
        "residuals": encode(result.residuals),
        "violations": encode(result.violations),
        "diagnostics": encode(result.diagnostics),
    }
    return json.dumps(payload, indent=2, sort_keys=False)


def output_schema() -> Dict[str, Any]:
    return CommandResult.model_json_schema()


# ----------------------------
# Human output
# ----------------------------

def format_value(x: Any, digits: int = 10) -> str:
    """Readable scalar: exact values as ``p/q + r/s j``, floats with ``digits`` significant digits"""
    if isinstance(x, ExactComplex):
        return format_exact(x)
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, (bool, str)):
        return str(x)
    if isinstance(x, (numbers.Complex, np.number)):
        z = complex(x)
        if z.imag == 0:
            return f"{z.real:.{digits}g}"
        sign = "-" if z.imag < 0 else "+"
        return f"{z.real:.{digits}g} {sign} {abs(z.imag):.{digits}g} j"
    return str(x)


def render(obj: Any, indent: int = 0) -> List[str]:
    """Indented ``key: value`` lines for nested results"""
    pad = "  " * indent
    lines: List[str] = []
    if dataclasses.is_dataclass(obj) and hasattr(obj, "as_dict"):
        obj = obj.as_dict()
    if isinstance(obj, dict):
        for key, value in obj.items():
            if dataclasses.is_dataclass(value) and hasattr(value, "as_dict"):
                value = value.as_dict()
            if isinstance(value, (dict, list, tuple)) and value:
                lines.append(f"{pad}{key}:")
                lines.extend(render(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {format_value(value) if not isinstance(value, (list, tuple, dict)) else '-'}")
    elif isinstance(obj, (list, tuple)):
        for item in obj:
            if isinstance(item, dict):
                lines.append(f"{pad}-")
                lines.extend(render(item, indent + 1))
            elif isinstance(item, (list, tuple)):
                lines.append(f"{pad}- " + ", ".join(format_value(x) for x in item))
            else:
                lines.append(f"{pad}- {format_value(item)}")
    else:
        lines.append(f"{pad}{format_value(obj)}")
    return lines
