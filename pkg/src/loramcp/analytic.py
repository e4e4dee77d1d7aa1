"""Closed-form uplink success probability.

Success at the typical gateway factorises (for Rayleigh fading) into a noise
factor exp(-rho*sigma^2) and the Laplace transforms of the time-averaged
intra- and inter-cluster interference, each a product over interfering SFs:

  intra: per-SF exponent 2*pi*a*lambda_ed * (I1 - I2 - I3), where I2/I3 carry
         Gauss 2F1 terms in b = (P_q/P_q0) * (min(l_q,l_q0)/l_q0) * gamma * r0^eta;
  inter: per-SF exponent in closed form after the far-field step (cluster
         offsets small against gateway distance).

A quadrature twin of each transform is kept as an independent oracle: the
intra integral uses the closed-form start-time expectation over the annulus,
the inter one is a nested (gateway distance x start time) quadrature of the
pre-closed-form integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .config import FULL, NetworkParams, SfTable, Variant, desired_distance
from .hypergeom import hyp2f1
from .overlap import _breakpoints, _h_piecewise, expected_reciprocal_overlap

# exp underflows below this; arguments are clamped here and flagged so that a
# saturated zero is distinguishable from a genuine one in sweep outputs.
EXP_FLOOR = -745.0


@dataclass(frozen=True)
class EvalPoint:
    """One (desired SF, threshold) evaluation point with its derived rho."""

    q0: int
    gamma_db: float
    gamma_lin: float
    r0: float      # desired link distance, km
    rho: float     # gamma * r0^eta / (P_q0 * alpha)


def make_point(q0: int, gamma_db: float, params: NetworkParams, table: SfTable, r0: float | None = None) -> EvalPoint:
    table._check_q(q0)
    if r0 is None:
        r0 = desired_distance(q0, params, table)
    if r0 <= 0:
        raise ValueError(f"r0 must be positive, got {r0}")
    gamma_lin = 10.0 ** (gamma_db / 10.0)
    rho = gamma_lin * r0**params.eta / (table.power_of(q0) * params.alpha)
    return EvalPoint(q0=q0, gamma_db=gamma_db, gamma_lin=gamma_lin, r0=r0, rho=rho)


@dataclass(frozen=True)
class AnalyticResult:
    q0: int
    gamma_db: float
    rho: float
    p_succ: float
    noise_factor: float
    laplace_intra: float
    laplace_inter: float
    per_sf_intra_terms: dict[int, tuple[float, float, float]]
    saturated: bool


def _clamped_exp(arg: float) -> tuple[float, bool]:
    if arg < EXP_FLOOR:
        return math.exp(EXP_FLOOR), True
    return math.exp(arg), False


def _b_coefficient(q: int, point: EvalPoint, params: NetworkParams, table: SfTable, variant: Variant) -> float:
    l_q0 = table.toa_of(point.q0)
    l_q = table.toa_of(q)
    ratio = variant.interferer_power(q, point.q0, table) / table.power_of(point.q0)
    return ratio * (min(l_q, l_q0) / l_q0) * point.gamma_lin * point.r0**params.eta


def intra_terms(
    q: int,
    point: EvalPoint,
    params: NetworkParams,
    table: SfTable,
    variant: Variant = FULL,
    _cache: dict | None = None,
) -> tuple[float, float, float]:
    """(I1, I2, I3) of the intra-cluster exponent for interfering SF q.

    I1 is the area term; I2/I3 evaluate the annulus integral of the start-time
    expectation through 2F1.  The inner annulus edge d_0 = 0 uses the analytic
    z -> -inf limit of the I2 bracket, 2*pi*b^(1+2/eta)/sin(2*pi/eta).
    """
    eta = params.eta
    t_c = params.t_c
    l_q0 = table.toa_of(point.q0)
    l_q = table.toa_of(q)
    w = params.annulus_width(table.n_sf)
    d_lo = (q - 1) * w
    d_hi = q * w
    mn = min(l_q, l_q0)
    area2 = d_hi**2 - d_lo**2

    i1 = (l_q0 + l_q) / (4.0 * t_c) * area2
    b = _b_coefficient(q, point, params, table, variant)
    if b == 0.0:
        # gamma -> 0 limit; makes I1 - I2 - I3 vanish identically.
        i2 = mn * area2 / (2.0 * t_c)
        i3 = abs(l_q0 - l_q) * area2 / (4.0 * t_c)
        return i1, i2, i3

    cache = _cache if _cache is not None else {}

    def f2(d: float) -> float:
        key = ("f2", b, d)
        if key not in cache:
            if d == 0.0:
                val = 2.0 * math.pi * b ** (1.0 + 2.0 / eta) / math.sin(2.0 * math.pi / eta)
            else:
                z = -b * d**-eta
                val = d**2 * (
                    eta * b * hyp2f1(1.0, -2.0 / eta, (eta - 2.0) / eta, z)
                    + 2.0 * d**eta * math.log1p(b * d**-eta)
                )
            cache[key] = val
        return cache[key]

    def f3(d: float) -> float:
        key = ("f3", b, d)
        if key not in cache:
            if d == 0.0:
                val = 0.0
            else:
                z = -(d**eta) / b
                val = d ** (eta + 2.0) * hyp2f1(1.0, (eta + 2.0) / eta, (eta + 2.0) / eta + 1.0, z)
            cache[key] = val
        return cache[key]

    pref = 1.0 / (2.0 * t_c * b * (eta + 2.0))
    i2 = mn * pref * (f2(d_hi) - f2(d_lo))
    i3 = abs(l_q0 - l_q) * pref * (f3(d_hi) - f3(d_lo))
    return i1, i2, i3


def _intra_term_map(
    point: EvalPoint, params: NetworkParams, table: SfTable, variant: Variant
) -> dict[int, tuple[float, float, float]]:
    cache: dict = {}
    return {
        q: intra_terms(q, point, params, table, variant, _cache=cache)
        for q in variant.interfering_sfs(point.q0, table.n_sf)
    }


def laplace_intra(point: EvalPoint, params: NetworkParams, table: SfTable, variant: Variant = FULL) -> float:
    """Laplace transform of the intra-cluster interference at rho."""
    terms = _intra_term_map(point, params, table, variant)
    return _laplace_intra_from_terms(terms, params)[0]


def _laplace_intra_from_terms(terms: dict, params: NetworkParams) -> tuple[float, bool]:
    arg = -2.0 * math.pi * params.a * params.lambda_ed * sum(i1 - i2 - i3 for (i1, i2, i3) in terms.values())
    return _clamped_exp(arg)


def _inter_exponent(q: int, point: EvalPoint, params: NetworkParams, table: SfTable, variant: Variant) -> float:
    eta = params.eta
    lam_g = variant.effective_lambda_g(params)
    if lam_g == 0.0:
        return 0.0
    l_q0 = table.toa_of(point.q0)
    l_q = table.toa_of(q)
    w = params.annulus_width(table.n_sf)
    n_q = params.lambda_ed * math.pi * ((q * w) ** 2 - ((q - 1) * w) ** 2)
    p_q = variant.interferer_power(q, point.q0, table)
    m = min(1.0, l_q / l_q0)
    bracket = (2.0 * eta / (eta + 2.0)) * l_q0 * m ** ((eta + 2.0) / eta) + m ** (2.0 / eta) * abs(l_q0 - l_q)
    return (
        2.0 * math.pi * lam_g * params.a * n_q
        * math.pi / (eta * math.sin(2.0 * math.pi / eta))
        * (params.alpha * p_q * point.rho) ** (2.0 / eta)
        * bracket / (2.0 * params.t_c)
    )


def laplace_inter(point: EvalPoint, params: NetworkParams, table: SfTable, variant: Variant = FULL) -> float:
    """Laplace transform of the inter-cluster interference at rho (far-field form)."""
    if params.eta <= 2:
        raise ValueError("eta must exceed 2")
    arg = -sum(_inter_exponent(q, point, params, table, variant) for q in variant.interfering_sfs(point.q0, table.n_sf))
    return _clamped_exp(arg)[0]


def success_probability(
    point: EvalPoint, params: NetworkParams, table: SfTable, variant: Variant = FULL
) -> AnalyticResult:
    """Uplink success probability as the product noise * L_intra * L_inter."""
    terms = _intra_term_map(point, params, table, variant)
    l_intra, sat_intra = _laplace_intra_from_terms(terms, params)
    inter_arg = -sum(
        _inter_exponent(q, point, params, table, variant) for q in variant.interfering_sfs(point.q0, table.n_sf)
    )
    l_inter, sat_inter = _clamped_exp(inter_arg)
    noise_arg = -point.rho * params.noise_mw
    noise, sat_noise = _clamped_exp(noise_arg)
    return AnalyticResult(
        q0=point.q0,
        gamma_db=point.gamma_db,
        rho=point.rho,
        p_succ=noise * l_intra * l_inter,
        noise_factor=noise,
        laplace_intra=l_intra,
        laplace_inter=l_inter,
        per_sf_intra_terms=terms,
        saturated=sat_intra or sat_inter or sat_noise,
    )


def curve(
    q0: int,
    gamma_grid_db,
    params: NetworkParams,
    table: SfTable,
    variant: Variant = FULL,
    r0: float | None = None,
) -> list[AnalyticResult]:
    """Evaluate the success probability along an ascending threshold grid (dB)."""
    return [
        success_probability(make_point(q0, float(g), params, table, r0), params, table, variant)
        for g in gamma_grid_db
    ]


# --- quadrature oracles ------------------------------------------------------


def laplace_intra_quadrature(
    point: EvalPoint, params: NetworkParams, table: SfTable, variant: Variant = FULL
) -> float:
    """Oracle for laplace_intra: per-SF annulus integral of
    (1 - E_T[1/(1 + rho*P_q*alpha*h*r^-eta)]) r dr by adaptive quadrature."""
    eta = params.eta
    total = 0.0
    w = params.annulus_width(table.n_sf)
    for q in variant.interfering_sfs(point.q0, table.n_sf):
        p_q = variant.interferer_power(q, point.q0, table)

        def f(r, _p=p_q, _q=q):
            u = point.rho * _p * params.alpha * r**-eta
            return (1.0 - expected_reciprocal_overlap(u, point.q0, _q, params.t_c, table)) * r

        val, _ = quad(f, (q - 1) * w, q * w, epsabs=1e-14, epsrel=1e-13, limit=200)
        total += val
    return math.exp(max(-2.0 * math.pi * params.a * params.lambda_ed * total, EXP_FLOOR))


def laplace_inter_quadrature(
    point: EvalPoint, params: NetworkParams, table: SfTable, variant: Variant = FULL
) -> float:
    """Oracle for laplace_inter: nested quadrature over gateway distance y and
    start time t of the far-field integrand, before any closed-form step."""
    eta = params.eta
    lam_g = variant.effective_lambda_g(params)
    if lam_g == 0.0:
        return 1.0
    w = params.annulus_width(table.n_sf)
    l_q0 = table.toa_of(point.q0)
    total = 0.0
    for q in variant.interfering_sfs(point.q0, table.n_sf):
        l_q = table.toa_of(q)
        n_q = params.lambda_ed * math.pi * ((q * w) ** 2 - ((q - 1) * w) ** 2)
        s_coef = point.rho * variant.interferer_power(q, point.q0, table) * params.alpha
        pts = sorted(set(_breakpoints(l_q0, l_q)))

        def inner(y, _lq=l_q, _s=s_coef, _pts=pts):
            def g(t):
                x = _s * _h_piecewise(l_q0, _lq, t) * y**-eta
                return x / (1.0 + x) / (2.0 * params.t_c)

            val, _ = quad(g, -params.t_c, params.t_c, points=_pts, epsabs=1e-13, epsrel=1e-12, limit=200)
            return val

        outer, _ = quad(lambda y: inner(y) * y, 0.0, np.inf, epsabs=1e-13, epsrel=1e-10, limit=400)
        total += 2.0 * math.pi * lam_g * params.a * n_q * outer
    return math.exp(max(-total, EXP_FLOOR))
