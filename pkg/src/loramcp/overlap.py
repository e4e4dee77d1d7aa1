"""Collision overlap time between the probed packet and an interferer.

The probed packet occupies [0, l_q0]; an interferer with SF q starts at T and
occupies [T, T + l_q].  The overlap fraction h is the overlapped duration
normalised by l_q0, a piecewise-linear tent with a plateau of height
min(l_q, l_q0)/l_q0 and support [-l_q, l_q0].

Under uniform start times T ~ U(-T_c, T_c) the expectation E[1/(1 + u*h)]
has a closed form (one expression covering both the l_q <= l_q0 and
l_q > l_q0 branches); an adaptive-quadrature twin is kept alongside it as an
independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .config import SfTable


@dataclass(frozen=True)
class OverlapInput:
    """One overlap evaluation: probed SF q0, interferer SF q starting at t_start (s)."""

    q0: int
    q: int
    t_start: float
    table: SfTable

    def __post_init__(self):
        self.table._check_q(self.q0)
        self.table._check_q(self.q)
        if not math.isfinite(self.t_start):
            raise ValueError(f"t_start must be finite, got {self.t_start}")


def _h_piecewise(l_q0: float, l_q: float, t: float) -> float:
    # Tent function: rising edge on [-l_q, -(l_q-l_q0)^+], plateau, falling
    # edge on [(l_q0-l_q)^+, l_q0], zero outside [-l_q, l_q0].
    if t < -l_q or t > l_q0:
        return 0.0
    lo = -max(l_q - l_q0, 0.0)
    hi = max(l_q0 - l_q, 0.0)
    if t > hi:
        return (l_q0 - t) / l_q0
    if t >= lo:
        return min(l_q0, l_q) / l_q0
    return (l_q + t) / l_q0


def overlap_fraction(inp: OverlapInput) -> float:
    """Overlap fraction h_{q0,q}(t_start) of the probed packet's duration."""
    return _h_piecewise(inp.table.toa_of(inp.q0), inp.table.toa_of(inp.q), inp.t_start)


def overlap_fraction_array(l_q0: float, l_q, t) -> np.ndarray:
    """Vectorised h via interval intersection; algebraically equal to the
    piecewise form (agreement checked in tests to float rounding)."""
    t = np.asarray(t, dtype=np.float64)
    ov = np.minimum(l_q0, t + l_q) - np.maximum(0.0, t)
    return np.maximum(ov, 0.0) / l_q0


def overlap_fraction_grid(q0: int, q: int, t, table: SfTable, dt: float = 1e-6) -> np.ndarray:
    """Independent grid oracle for h: midpoint Riemann sum of the on-air
    indicator over the probed packet, cells of width dt.

    The sum is evaluated in closed form by counting the grid cells whose
    midpoint falls inside [t, t + l_q]; this is the same integer the literal
    cell loop produces (cross-checked in tests) without the O(l_q0/dt) cost.
    """
    l_q0 = table.toa_of(q0)
    l_q = table.toa_of(q)
    t = np.asarray(t, dtype=np.float64)
    n = int(round(l_q0 / dt))
    k_lo = np.maximum(0, np.ceil(t / dt - 0.5)).astype(np.int64)
    k_hi = np.minimum(n - 1, np.floor((t + l_q) / dt - 0.5)).astype(np.int64)
    count = np.maximum(0, k_hi - k_lo + 1)
    return count * dt / l_q0


def overlap_fraction_grid_literal(q0: int, q: int, t_start: float, table: SfTable, dt: float = 1e-6) -> float:
    """Literal cell-by-cell version of the grid oracle (slow; used to validate
    the counting shortcut)."""
    l_q0 = table.toa_of(q0)
    l_q = table.toa_of(q)
    n = int(round(l_q0 / dt))
    centers = (np.arange(n) + 0.5) * dt
    inside = (centers >= t_start) & (centers <= t_start + l_q)
    return float(inside.sum()) * dt / l_q0


def _breakpoints(l_q0: float, l_q: float) -> tuple[float, float, float, float]:
    return (-l_q, -max(l_q - l_q0, 0.0), max(l_q0 - l_q, 0.0), l_q0)


def expected_reciprocal_overlap(u: float, q0: int, q: int, t_c: float, table: SfTable) -> float:
    """E_T[1 / (1 + u * h_{q0,q}(T))] for T ~ U(-t_c, t_c), closed form.

    Exact at u = 0 (the limit is 1); for u*min(l)/l_q0 below 1e-8 the log term
    switches to its series to avoid cancellation in the removable singularity.
    """
    if u < 0:
        raise ValueError(f"u must be >= 0, got {u}")
    l_q0 = table.toa_of(q0)
    l_q = table.toa_of(q)
    if t_c < max(l_q0, l_q):
        raise ValueError(f"t_c={t_c} does not cover the packet durations ({l_q0}, {l_q})")
    if u == 0.0:
        return 1.0
    m = min(l_q, l_q0) / l_q0
    x = u * m
    if x < 1e-8:
        log_term = (l_q0 * m / t_c) * (1.0 - 0.5 * x + x * x / 3.0)
    else:
        log_term = l_q0 / (t_c * u) * math.log1p(x)
    return (
        1.0
        - (l_q0 + l_q) / (2.0 * t_c)
        + log_term
        + abs(l_q0 - l_q) / (2.0 * t_c * (1.0 + x))
    )


def expected_reciprocal_overlap_quadrature(u: float, q0: int, q: int, t_c: float, table: SfTable) -> float:
    """Adaptive-quadrature oracle for expected_reciprocal_overlap.

    Integrates 1/(1 + u*h) against the uniform density over [-t_c, t_c],
    split at the four breakpoints of h so every piece is smooth.
    """
    if u < 0:
        raise ValueError(f"u must be >= 0, got {u}")
    l_q0 = table.toa_of(q0)
    l_q = table.toa_of(q)
    if t_c < max(l_q0, l_q):
        raise ValueError(f"t_c={t_c} does not cover the packet durations ({l_q0}, {l_q})")

    def f(t):
        return 1.0 / (1.0 + u * _h_piecewise(l_q0, l_q, t))

    edges = [-t_c, *_breakpoints(l_q0, l_q), t_c]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        piece, _ = quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
        total += piece
    return total / (2.0 * t_c)
