"""Independent Monte Carlo estimator of the uplink success probability.

Each replication samples a fresh MCP deployment (Redraw mode; Fixed mode
keeps one), then plays frames: per frame every node transmits with
probability a, active nodes draw a uniform start time and a unit-mean
exponential fading gain, and the probed link's time-averaged SINR is compared
against the whole threshold grid at once.

Determinism contract: replication r of a run with seed s consumes only the
stream Philox(SeedSequence(s, spawn_key=(r,))), and aggregation sums integer
success counts in replication order, so results are byte-identical across
repeated runs and across any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .config import FULL, NetworkParams, SfTable, Variant, validate_window
from .geometry import Deployment, replication_rng, sample_deployment

DEPLOYMENT_MODES = ("Redraw", "Fixed")


@dataclass(frozen=True)
class SimConfig:
    params: NetworkParams
    table: SfTable
    q0: int
    gamma_grid_db: tuple[float, ...]
    n_deployments: int
    n_frames_per_deployment: int
    window_radius: float
    seed: int
    deployment_mode: str = "Redraw"
    variant: Variant = FULL
    n_workers: int = 1

    def __post_init__(self):
        self.table._check_q(self.q0)
        validate_window(self.params, self.table)
        if self.n_deployments < 1 or self.n_frames_per_deployment < 1:
            raise ValueError("n_deployments and n_frames_per_deployment must be >= 1")
        if self.deployment_mode not in DEPLOYMENT_MODES:
            raise ValueError(f"unknown deployment_mode {self.deployment_mode!r}")
        if self.deployment_mode == "Fixed" and self.n_deployments != 1:
            raise ValueError("Fixed deployment mode requires n_deployments = 1")
        if self.window_radius <= 0:
            raise ValueError("window_radius must be positive")
        if len(self.gamma_grid_db) == 0:
            raise ValueError("gamma_grid_db must not be empty")
        if any(b < a for a, b in zip(self.gamma_grid_db, self.gamma_grid_db[1:])):
            raise ValueError("gamma_grid_db must be ascending")
        if self.n_workers < 1:
            raise ValueError("n_workers must be >= 1")


@dataclass(frozen=True)
class SimResult:
    q0: int
    gamma_grid_db: tuple[float, ...]
    p_hat: np.ndarray
    ci_half_width: np.ndarray  # 95% normal approximation
    n_trials: int
    mean_sinr_db: float
    seed: int


def effective_params(config: SimConfig) -> NetworkParams:
    if config.variant.kind == "SingleGateway":
        return replace(config.params, lambda_g=0.0)
    return config.params


def _prepare_interferers(
    dep: Deployment, params: NetworkParams, table: SfTable, variant: Variant
) -> tuple[np.ndarray, np.ndarray]:
    """Flatten all interferer candidates into (coef, toa) arrays, where
    coef = P_q * alpha * dist^-eta with the exact distance to the origin."""
    allowed = np.zeros(table.n_sf + 1, dtype=bool)
    for q in variant.interfering_sfs(dep.q0, table.n_sf):
        allowed[q] = True
    power = np.array([0.0] + [variant.interferer_power(q, dep.q0, table) for q in range(1, table.n_sf + 1)])
    toa = np.array([0.0] + list(table.toa))

    coef_parts = []
    lq_parts = []
    for gw, off, sf in zip(dep.gateways, dep.offsets, dep.sf):
        if len(off) == 0:
            continue
        keep = allowed[sf]
        if not keep.any():
            continue
        pos = off[keep] + gw
        dist = np.hypot(pos[:, 0], pos[:, 1])
        q = sf[keep]
        with np.errstate(divide="ignore"):
            coef_parts.append(power[q] * params.alpha * dist**-params.eta)
        lq_parts.append(toa[q])
    if not coef_parts:
        return np.empty(0), np.empty(0)
    return np.concatenate(coef_parts), np.concatenate(lq_parts)


def _draw_frame(rng: np.random.Generator, n_nodes: int, a: float, t_c: float):
    """Per-frame randomness, in a fixed order: probe fading, active set
    (Binomial count + uniform subset, the same law as per-node Bernoulli(a)),
    start times, interferer fading."""
    g00 = rng.standard_exponential()
    if n_nodes > 0:
        k = int(rng.binomial(n_nodes, a))
    else:
        k = 0
    if k > 0:
        idx = rng.choice(n_nodes, k, replace=False, shuffle=False).astype(np.int64)
        t = rng.uniform(-t_c, t_c, k)
        g = rng.standard_exponential(k)
    else:
        idx = np.empty(0, dtype=np.int64)
        t = np.empty(0)
        g = np.empty(0)
    return g00, idx, t, g


def frame_sinr(
    dep: Deployment,
    q0: int,
    params: NetworkParams,
    table: SfTable,
    rng: np.random.Generator,
    variant: Variant = FULL,
    use_numba: bool | None = None,
) -> float:
    """Time-averaged SINR of one frame (linear units)."""
    if q0 != dep.q0:
        raise ValueError(f"deployment was sampled for q0={dep.q0}, not {q0}")
    coef, lq = _prepare_interferers(dep, params, table, variant)
    l_q0 = table.toa_of(q0)
    g00, idx, t, g = _draw_frame(rng, len(coef), params.a, params.t_c)
    interference = _kernels.frame_interference(coef, lq, idx, t, g, l_q0, use_numba)
    signal = table.power_of(q0) * params.alpha * dep.r0**-params.eta * g00
    denom = interference + params.noise_mw
    if denom == 0.0:
        return math.inf
    return signal / denom


def _run_replication(config: SimConfig, rep: int, use_numba: bool | None):
    params = effective_params(config)
    table = config.table
    rng = replication_rng(config.seed, rep)
    dep = sample_deployment(params, table, config.q0, config.window_radius, rng)
    coef, lq = _prepare_interferers(dep, params, table, config.variant)
    l_q0 = table.toa_of(config.q0)
    s_coef = table.power_of(config.q0) * params.alpha * dep.r0**-params.eta
    gamma_lin = np.array([10.0 ** (g / 10.0) for g in config.gamma_grid_db])
    n_grid = len(gamma_lin)
    counts = np.zeros(n_grid, dtype=np.int64)
    sum_log10 = 0.0
    n_nodes = len(coef)
    for _ in range(config.n_frames_per_deployment):
        g00, idx, t, g = _draw_frame(rng, n_nodes, params.a, params.t_c)
        interference = _kernels.frame_interference(coef, lq, idx, t, g, l_q0, use_numba)
        denom = interference + params.noise_mw
        sinr = s_coef * g00 / denom if denom > 0.0 else math.inf
        k = int(np.searchsorted(gamma_lin, sinr, side="right"))
        counts[:k] += 1
        sum_log10 += math.log10(sinr) if sinr > 0.0 else -math.inf
    return counts, sum_log10


def _worker(args):
    config, rep, use_numba = args
    return _run_replication(config, rep, use_numba)


def simulate(config: SimConfig, use_numba: bool | None = None) -> SimResult:
    """Estimate per-threshold success probabilities with 95% half-widths."""
    if use_numba is None:
        use_numba = _kernels.numba_enabled()
    reps = range(config.n_deployments)
    if config.n_workers > 1 and config.n_deployments > 1:
        _kernels.warm_up(use_numba)  # compile before forking
        with ProcessPoolExecutor(max_workers=config.n_workers) as pool:
            partials = list(pool.map(_worker, [(config, r, use_numba) for r in reps], chunksize=1))
    else:
        partials = [_run_replication(config, r, use_numba) for r in reps]

    counts = np.zeros(len(config.gamma_grid_db), dtype=np.int64)
    sum_log10 = 0.0
    for c, s in partials:  # replication order: byte-stable across worker counts
        counts += c
        sum_log10 += s
    n_trials = config.n_deployments * config.n_frames_per_deployment
    p_hat = counts / n_trials
    ci = 1.96 * np.sqrt(p_hat * (1.0 - p_hat) / n_trials)
    return SimResult(
        q0=config.q0,
        gamma_grid_db=config.gamma_grid_db,
        p_hat=p_hat,
        ci_half_width=ci,
        n_trials=n_trials,
        mean_sinr_db=10.0 * sum_log10 / n_trials,
        seed=config.seed,
    )


def empirical_curves(configs, use_numba: bool | None = None) -> list[SimResult]:
    """One SimResult per requested (q0, scheme, variant) configuration."""
    return [simulate(c, use_numba) for c in configs]
