import math

import numpy as np
import pytest

from loramcp.config import build_sf_table
from loramcp.overlap import (
    OverlapInput,
    _h_piecewise,
    expected_reciprocal_overlap,
    expected_reciprocal_overlap_quadrature,
    overlap_fraction,
    overlap_fraction_array,
    overlap_fraction_grid,
    overlap_fraction_grid_literal,
)

TABLE = build_sf_table()
T_C = 1.5


def h(q0, q, t):
    return overlap_fraction(OverlapInput(q0=q0, q=q, t_start=t, table=TABLE))


def test_self_aligned_full_overlap():
    assert h(3, 3, 0.0) == 1.0


def test_short_interferer_plateau():
    # q0=6 (0.682 s), q=1 (0.036 s), T=0.1: interferer fully inside the packet
    got = h(6, 1, 0.1)
    assert got == pytest.approx(0.036 / 0.682, rel=1e-12)
    oracle = overlap_fraction_grid(6, 1, 0.1, TABLE)
    assert abs(got - float(oracle)) <= 1e-3


def test_long_interferer_covers_packet():
    # q0=1 (0.036 s), q=6 (0.682 s), T=-0.3: probe packet fully covered
    assert h(1, 6, -0.3) == 1.0
    assert abs(h(1, 6, -0.3) - float(overlap_fraction_grid(1, 6, -0.3, TABLE))) <= 1e-3


def test_outside_support_is_zero():
    assert h(2, 3, 0.0641) == 0.0  # just past l_q0 = 0.064
    assert h(2, 3, -0.1131) == 0.0  # just before -l_q = -0.113
    assert h(2, 3, TABLE.toa_of(2)) == 0.0  # t exactly l_q0: overlap length zero


def test_range_bound():
    rng = np.random.default_rng(3)
    for _ in range(500):
        q0, q = rng.integers(1, 7, 2)
        t = rng.uniform(-T_C, T_C)
        v = h(int(q0), int(q), float(t))
        cap = min(TABLE.toa_of(int(q)), TABLE.toa_of(int(q0))) / TABLE.toa_of(int(q0))
        assert 0.0 <= v <= cap + 1e-15


def test_lipschitz_continuity():
    rng = np.random.default_rng(4)
    eps = 1e-9
    for _ in range(2000):
        q0, q = (int(x) for x in rng.integers(1, 7, 2))
        t = float(rng.uniform(-1.0, 1.0))
        lip = 1.0 / TABLE.toa_of(q0)
        assert abs(h(q0, q, t + eps) - h(q0, q, t)) <= eps * lip + 1e-15


def test_piecewise_matches_interval_form():
    rng = np.random.default_rng(5)
    for _ in range(200):
        q0, q = (int(x) for x in rng.integers(1, 7, 2))
        t = rng.uniform(-T_C, T_C, 256)
        vec = overlap_fraction_array(TABLE.toa_of(q0), TABLE.toa_of(q), t)
        pw = np.array([h(q0, q, float(x)) for x in t])
        np.testing.assert_allclose(vec, pw, atol=1e-14)


def test_grid_counting_equals_literal_loop():
    rng = np.random.default_rng(6)
    for _ in range(60):
        q0, q = (int(x) for x in rng.integers(1, 7, 2))
        t = float(rng.uniform(-T_C, T_C))
        fast = float(overlap_fraction_grid(q0, q, t, TABLE))
        slow = overlap_fraction_grid_literal(q0, q, t, TABLE)
        assert fast == slow


def test_mass_identity_grid():
    # integral of h over the window equals l_q / l_q0 * l_q0 = l_q
    dt = 1e-6
    for q0 in range(1, 7):
        for q in range(1, 7):
            l_q0, l_q = TABLE.toa_of(q0), TABLE.toa_of(q)
            lo, hi = -l_q, l_q0
            n = int(round((hi - lo) / dt))
            centers = lo + (np.arange(n) + 0.5) * dt
            mass = overlap_fraction_array(l_q0, l_q, centers).sum() * dt
            assert mass == pytest.approx(l_q, rel=1e-6)


def test_reciprocity():
    rng = np.random.default_rng(7)
    for q0 in range(1, 7):
        for q in range(1, 7):
            t = rng.uniform(-T_C, T_C, 300)
            l_q0, l_q = TABLE.toa_of(q0), TABLE.toa_of(q)
            lhs = l_q0 * overlap_fraction_array(l_q0, l_q, t)
            rhs = l_q * overlap_fraction_array(l_q, l_q0, -t)
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_overlap_input_validation():
    with pytest.raises(ValueError):
        OverlapInput(q0=1, q=2, t_start=math.nan, table=TABLE)
    with pytest.raises(IndexError):
        OverlapInput(q0=0, q=2, t_start=0.0, table=TABLE)


# --- expected reciprocal overlap ---------------------------------------------


def test_expectation_at_zero_u():
    for q0 in range(1, 7):
        for q in range(1, 7):
            assert expected_reciprocal_overlap(0.0, q0, q, T_C, TABLE) == 1.0
            assert expected_reciprocal_overlap_quadrature(0.0, q0, q, T_C, TABLE) == pytest.approx(1.0, abs=1e-12)


def test_expectation_same_sf_reduction():
    # q0 = q: E = 1 - l/T_c + (l/(T_c u)) log(u+1)
    for q0 in range(1, 7):
        l = TABLE.toa_of(q0)
        for u in (0.5, 3.0, 42.0):
            expected = 1.0 - l / T_C + l / (T_C * u) * math.log1p(u)
            assert expected_reciprocal_overlap(u, q0, q0, T_C, TABLE) == pytest.approx(expected, rel=1e-14)


def test_expectation_matches_quadrature():
    rng = np.random.default_rng(8)
    for _ in range(120):
        q0, q = (int(x) for x in rng.integers(1, 7, 2))
        u = float(rng.uniform(0.0, 1e3))
        closed = expected_reciprocal_overlap(u, q0, q, T_C, TABLE)
        quad_val = expected_reciprocal_overlap_quadrature(u, q0, q, T_C, TABLE)
        assert abs(closed - quad_val) <= 1e-9


def test_expectation_decreasing_in_u():
    rng = np.random.default_rng(9)
    for _ in range(200):
        q0, q = (int(x) for x in rng.integers(1, 7, 2))
        us = np.sort(rng.uniform(1e-6, 1e4, 8))
        vals = [expected_reciprocal_overlap(float(u), q0, q, T_C, TABLE) for u in us]
        assert all(0.0 < v <= 1.0 for v in vals)
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_expectation_u_to_infinity_limit():
    # at u = 1e8 the value is within 1e-6 of 1 - (l_q0 + l_q) / (2 T_c)
    for q0 in range(1, 7):
        for q in range(1, 7):
            l_q0, l_q = TABLE.toa_of(q0), TABLE.toa_of(q)
            limit = 1.0 - (l_q0 + l_q) / (2.0 * T_C)
            assert expected_reciprocal_overlap(1e8, q0, q, T_C, TABLE) == pytest.approx(limit, abs=1e-6)


def test_expectation_tiny_u_series_branch():
    # the series guard region must join smoothly onto the log branch
    for u in (1e-12, 1e-9, 2e-8, 1e-7):
        v = expected_reciprocal_overlap(u, 2, 5, T_C, TABLE)
        q = expected_reciprocal_overlap_quadrature(u, 2, 5, T_C, TABLE)
        assert v == pytest.approx(q, abs=1e-12)


def test_expectation_domain_errors():
    with pytest.raises(ValueError):
        expected_reciprocal_overlap(-1.0, 1, 1, T_C, TABLE)
    with pytest.raises(ValueError):
        expected_reciprocal_overlap(1.0, 6, 6, 0.5, TABLE)  # t_c shorter than packets
