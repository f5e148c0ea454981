"""
Desk-scale defaults for suites, rewriting and the command line.
Keep config/suites.json in sync when changing bounds here.
"""

import os
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

DEFAULT_SEED = 20240917
DEFAULT_BUDGET = 200_000
DEFAULT_THREADS = 1
DEFAULT_LOG_DIR = "logs"

# central charges exercised by the relation suites
K_RANGE: Tuple[int, ...] = (-2, -1, 0, 1, 2)

# rational points used when z, t or q must be specialised
Q_POINTS: Tuple[Fraction, ...] = (Fraction(2), Fraction(3), Fraction(5, 2))
GENERIC_Z = Fraction(3, 7)
GENERIC_T = Fraction(5, 3)

# (l, m) pairs for the center-level comultiplication check
COMULT_PAIRS: Tuple[Tuple[int, int], ...] = ((0, 0), (-1, 1), (1, -1), (-1, 0))

SUITE_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "core-relations": {"k_values": list(K_RANGE), "dot_bound": 3, "samples": 200},
    "curls": {"k_values": list(K_RANGE), "dot_bound": 3},
    "bubbles": {"k_values": list(K_RANGE), "dot_bound": 3, "order": 8},
    "braid": {"k_values": list(K_RANGE)},
    "hecke": {"max_l": 3, "max_n": 3, "samples": 100},
    "action-oracle": {"levels": [1, 2], "max_n": 2, "samples": 500},
    "qgln": {"max_n": 3, "max_m": 3, "max_len": 3},
    "gcq": {"order": 6, "vacuum_order": 4},
    "comult-center": {"order": 6},
}

QUICK_OVERRIDES: Dict[str, Dict[str, Any]] = {
    "core-relations": {"k_values": [-1, 0, 1], "dot_bound": 1, "samples": 10},
    "curls": {"k_values": [-1, 0, 1], "dot_bound": 1},
    "bubbles": {"k_values": [-1, 0, 1], "dot_bound": 1, "order": 4},
    "braid": {"k_values": [-1, 0, 1]},
    "hecke": {"max_l": 2, "max_n": 2, "samples": 10},
    "action-oracle": {"levels": [1], "max_n": 1, "samples": 20},
    "qgln": {"max_n": 2, "max_m": 2, "max_len": 2},
    "gcq": {"order": 4, "vacuum_order": 3},
    "comult-center": {"order": 3},
}


def _int_or_default(raw: Optional[str], default: int, minimum: int = 1) -> int:
    try:
        value = int(str(raw).strip())
    except (TypeError, ValueError):
        return default
    return value if value >= minimum else default


def normalize_threads(raw: Optional[str] = None) -> int:
    """Thread cap from HEISCAT_THREADS; malformed values fall back to 1."""
    if raw is None:
        raw = os.getenv("HEISCAT_THREADS")
    return _int_or_default(raw, DEFAULT_THREADS)


def normalize_budget(raw: Optional[str] = None) -> int:
    """Rewrite step limit from HEISCAT_BUDGET."""
    if raw is None:
        raw = os.getenv("HEISCAT_BUDGET")
    return _int_or_default(raw, DEFAULT_BUDGET)


def normalize_seed(raw: Optional[str] = None) -> int:
    if raw is None:
        raw = os.getenv("HEISCAT_SEED")
    return _int_or_default(raw, DEFAULT_SEED, minimum=0)


def normalize_log_dir(raw: Optional[str] = None) -> str:
    if raw is None:
        raw = os.getenv("HEISCAT_LOG_DIR")
    value = (raw or "").strip()
    return value or DEFAULT_LOG_DIR


def suite_defaults(name: str, quick: bool = False) -> Dict[str, Any]:
    """Return a fresh copy of the defaults for a suite, scaled down if quick."""
    params = dict(SUITE_DEFAULTS.get(name, {}))
    if quick:
        params.update(QUICK_OVERRIDES.get(name, {}))
    return params
