"""Uplink success probability in multi-gateway LoRa networks.

Closed-form stochastic-geometry model (collision overlap times, intra- and
inter-cluster interference Laplace transforms) next to an independent Monte
Carlo simulator that validates it.
"""

__version__ = "0.1.0"

from .analytic import AnalyticResult, EvalPoint, curve, make_point, success_probability
from .config import (
    FULL,
    PERFECT_ORTHOGONALITY,
    SAME_POWER_OVERRIDE,
    SINGLE_GATEWAY,
    NetworkParams,
    SfTable,
    Variant,
    build_sf_table,
    dbm_to_mw,
    load_scenario,
    single_interfering_sf,
)
from .simulator import SimConfig, SimResult, empirical_curves, frame_sinr, simulate

__all__ = [
    "AnalyticResult",
    "EvalPoint",
    "FULL",
    "NetworkParams",
    "PERFECT_ORTHOGONALITY",
    "SAME_POWER_OVERRIDE",
    "SINGLE_GATEWAY",
    "SfTable",
    "SimConfig",
    "SimResult",
    "Variant",
    "__version__",
    "build_sf_table",
    "curve",
    "dbm_to_mw",
    "empirical_curves",
    "frame_sinr",
    "load_scenario",
    "make_point",
    "simulate",
    "single_interfering_sf",
    "success_probability",
]
