import logging
import math
import os
from pathlib import Path
from typing import Optional, Dict, Any

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Load environment variables
load_dotenv()

# Project paths
PROJECT_ROOT = Path(__file__).parent.parent
NETLISTS_DIR = PROJECT_ROOT / "netlists"
DOCS_DIR = PROJECT_ROOT / "docs"
SCHEMA_PATH = DOCS_DIR / "output_schema.json"

# Optional YAML overrides
# NOTE: Do NOT raise on import. A broken config file only logs a warning.
CONFIG_FILE: Optional[str] = os.getenv("NETKIT_CONFIG")


def _load_overrides(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as e:
        logger.warning(f"Ignoring config file {path}: {e}")
        return {}
    if not isinstance(data, dict):
        logger.warning(f"Ignoring config file {path}: top level is not a mapping")
        return {}
    return {str(k).lower(): v for k, v in data.items()}


_OVERRIDES = _load_overrides(CONFIG_FILE)


def _setting(name: str, default: str) -> str:
    key = name.lower().replace("netkit_", "", 1)
    if key in _OVERRIDES:
        return str(_OVERRIDES[key])
    return os.getenv(name, default)


# Numerical tolerances
REL_TOLERANCE = float(_setting("NETKIT_TOLERANCE", "1e-9"))
ABS_TOLERANCE = float(_setting("NETKIT_ABS_TOLERANCE", "1e-12"))
DEFAULT_MODE = _setting("NETKIT_MODE", "float64")

# Enumeration guards
TREE_EDGE_LIMIT = int(_setting("NETKIT_TREE_LIMIT", "24"))
LEIBNIZ_LIMIT = int(_setting("NETKIT_LEIBNIZ_LIMIT", "9"))
DENDRO_NODE_LIMIT = int(_setting("NETKIT_DENDRO_LIMIT", "12"))
RESISTANCE_TREE_NODES = int(_setting("NETKIT_RESISTANCE_TREE_NODES", "10"))

# Polynomial root handling
ROOT_CLUSTER_TOL = float(_setting("NETKIT_ROOT_CLUSTER_TOL", "1e-7"))
GCD_TOL = float(_setting("NETKIT_GCD_TOL", "1e-10"))
NROOTS_DIGITS = int(_setting("NETKIT_NROOTS_DIGITS", "15"))
NROOTS_MAXSTEPS = int(_setting("NETKIT_NROOTS_MAXSTEPS", "200"))
PHASE_TOL = float(_setting("NETKIT_PHASE_TOL", "1e-9"))

# Default metric candidates d = Re(exp(-j*theta) * Z)
THETA_GRID = (0.0, math.pi / 4, math.pi / 2, -math.pi / 4, -math.pi / 2)

# Logging
LOG_LEVEL = _setting("LOG_LEVEL", "INFO")

# A single dict export expected by tests
CONFIG: Dict[str, Any] = {
    "PROJECT_ROOT": PROJECT_ROOT,
    "NETLISTS_DIR": NETLISTS_DIR,
    "SCHEMA_PATH": SCHEMA_PATH,
    "CONFIG_FILE": CONFIG_FILE,
    "REL_TOLERANCE": REL_TOLERANCE,
    "ABS_TOLERANCE": ABS_TOLERANCE,
    "DEFAULT_MODE": DEFAULT_MODE,
    "TREE_EDGE_LIMIT": TREE_EDGE_LIMIT,
    "LEIBNIZ_LIMIT": LEIBNIZ_LIMIT,
    "DENDRO_NODE_LIMIT": DENDRO_NODE_LIMIT,
    "RESISTANCE_TREE_NODES": RESISTANCE_TREE_NODES,
    "ROOT_CLUSTER_TOL": ROOT_CLUSTER_TOL,
    "GCD_TOL": GCD_TOL,
    "NROOTS_DIGITS": NROOTS_DIGITS,
    "NROOTS_MAXSTEPS": NROOTS_MAXSTEPS,
    "PHASE_TOL": PHASE_TOL,
    "THETA_GRID": THETA_GRID,
    "LOG_LEVEL": LOG_LEVEL,
}
