"""Matern-cluster deployment sampling and EIB SF assignment.

Gateways form a Poisson point process on a finite disc window; each gateway
carries its own Poisson cluster of nodes scattered uniformly in a disc of
radius R around it.  The typical gateway sits at the origin and is always
present (Palm conditioning); the probed node is pinned at distance r0(q0) on
the positive x-axis and is not part of the sampled interferer population.

Sampling is pure given (params, rng state): per-replication generators are
keyed by (seed, replication index) with a counter-based bit generator, so
parallel runs are schedule-independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .config import N_SF, NetworkParams, SfTable, desired_distance


@dataclass(frozen=True)
class Deployment:
    """A sampled realisation: gateway positions, per-cluster node offsets and SFs.

    gateways[0] is the typical gateway at the origin; the rest are the PPP
    draw.  Arrays are frozen after sampling and safe to share across workers.
    """

    window_radius: float
    q0: int
    r0: float
    gateways: np.ndarray        # (n_gw, 2) positions, km
    offsets: tuple[np.ndarray, ...]  # per-gateway (n_i, 2) node offsets, km
    sf: tuple[np.ndarray, ...]       # per-gateway SF index of each node

    def n_nodes(self) -> int:
        return sum(len(o) for o in self.offsets)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _uniform_disc(n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def sample_gateways(params: NetworkParams, window_radius: float, rng: np.random.Generator) -> np.ndarray:
    """PPP draw of gateway positions on the disc of radius window_radius."""
    if window_radius <= 0:
        raise ValueError(f"window_radius must be positive, got {window_radius}")
    n = rng.poisson(params.lambda_g * math.pi * window_radius**2)
    return _uniform_disc(n, window_radius, rng)


def sample_cluster(center, params: NetworkParams, rng: np.random.Generator) -> np.ndarray:
    """PPP cluster around `center`: Poisson(lambda_ed * pi * R^2) node offsets,
    uniform on the disc of radius R.  Offsets are relative to the center."""
    n = rng.poisson(params.lambda_ed * math.pi * params.r_cluster**2)
    return _uniform_disc(n, params.r_cluster, rng)


def assign_sf_by_distance(d: float, params: NetworkParams, n_sf: int = N_SF) -> int:
    """EIB rule: smallest q with d <= q * omega; membership is (d_{q-1}, d_q]."""
    if d < 0 or d > params.r_cluster:
        raise ValueError(f"distance {d} outside cluster radius {params.r_cluster}")
    w = params.annulus_width(n_sf)
    return min(n_sf, max(1, int(math.ceil(d / w))))


def assign_sf_array(d: np.ndarray, params: NetworkParams, n_sf: int = N_SF) -> np.ndarray:
    w = params.annulus_width(n_sf)
    q = np.ceil(d / w).astype(np.int64)
    return np.clip(q, 1, n_sf)


def distance_to_typical_gw(gateway, offset) -> float:
    """Exact distance from a node (gateway + offset) to the origin."""
    p = np.asarray(gateway, dtype=np.float64) + np.asarray(offset, dtype=np.float64)
    return float(np.hypot(p[0], p[1]))


def sample_deployment(
    params: NetworkParams,
    table: SfTable,
    q0: int,
    window_radius: float,
    rng: np.random.Generator,
) -> Deployment:
    """One full MCP realisation for the probed SF q0."""
    table._check_q(q0)
    sampled = sample_gateways(params, window_radius, rng)
    gateways = _freeze(np.vstack((np.zeros((1, 2)), sampled)))
    offsets = []
    sfs = []
    for _ in range(len(gateways)):
        off = sample_cluster(None, params, rng)
        d = np.hypot(off[:, 0], off[:, 1])
        offsets.append(_freeze(off))
        sfs.append(_freeze(assign_sf_array(d, params, table.n_sf)))
    return Deployment(
        window_radius=window_radius,
        q0=q0,
        r0=desired_distance(q0, params, table),
        gateways=gateways,
        offsets=tuple(offsets),
        sf=tuple(sfs),
    )


def deployment_to_json(dep: Deployment, seed: int | None = None) -> str:
    """Serialise a deployment for regression fixtures (exact float round-trip)."""
    doc = {
        "seed": seed,
        "window_radius": dep.window_radius,
        "q0": dep.q0,
        "r0": dep.r0,
        "gateways": dep.gateways.tolist(),
        "clusters": [
            {"offsets": off.tolist(), "sf": sf.tolist()}
            for off, sf in zip(dep.offsets, dep.sf)
        ],
    }
    return json.dumps(doc)


def deployment_from_json(text: str) -> Deployment:
    doc = json.loads(text)
    clusters = doc["clusters"]
    return Deployment(
        window_radius=doc["window_radius"],
        q0=doc["q0"],
        r0=doc["r0"],
        gateways=_freeze(np.asarray(doc["gateways"], dtype=np.float64).reshape(-1, 2)),
        offsets=tuple(_freeze(np.asarray(c["offsets"], dtype=np.float64).reshape(-1, 2)) for c in clusters),
        sf=tuple(_freeze(np.asarray(c["sf"], dtype=np.int64)) for c in clusters),
    )


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    """Counter-based stream for replication `rep` of a run keyed by `seed`."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(rep,))))
