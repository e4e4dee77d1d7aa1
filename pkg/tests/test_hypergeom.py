import math

import mpmath
import numpy as np
import pytest

from loramcp.hypergeom import _connection, _pfaff, _series, hyp2f1

mpmath.mp.dps = 40


def test_empty_series_at_zero():
    assert hyp2f1(1.0, -2 / 3, 1 / 3, 0.0) == 1.0
    assert hyp2f1(0.3, 0.7, 1.9, 0.0) == 1.0


def test_log_identity():
    # 2F1(1,1;2;z) = -ln(1-z)/z
    for z in np.linspace(-50.0, -1e-8, 517):
        ref = -math.log1p(-z) / z
        assert hyp2f1(1.0, 1.0, 2.0, float(z)) == pytest.approx(ref, rel=1e-12)
    assert hyp2f1(1.0, 1.0, 2.0, -1.0) == pytest.approx(math.log(2.0), rel=1e-13)


def test_pfaff_vs_series_overlap_domain():
    rng = np.random.default_rng(11)
    for _ in range(300):
        eta = rng.uniform(2.1, 6.0)
        z = float(rng.uniform(-0.999, -1e-6))
        for (a, b, c) in [
            (1.0, -2.0 / eta, (eta - 2.0) / eta),
            (1.0, (eta + 2.0) / eta, (eta + 2.0) / eta + 1.0),
            (1.0, 1.0, 2.0),
        ]:
            direct = _series(a, b, c, z)
            pfaff = _pfaff(a, b, c, z)
            assert pfaff == pytest.approx(direct, rel=1e-12)


def test_theorem_shape_deep_argument_vs_high_precision_series():
    # 2F1(1, -2/3; 1/3; -5) and friends: Pfaff/connection vs a long mp-series
    # of the Pfaff-transformed argument, per the stated oracle.
    a, b, c, z = 1.0, -2.0 / 3.0, 1.0 / 3.0, -5.0
    w = z / (z - 1.0)
    with mpmath.workdps(50):
        s = mpmath.mpf(1)
        term = mpmath.mpf(1)
        for n in range(5000):
            term *= (mpmath.mpf(a) + n) * (mpmath.mpf(c - b) + n) / ((mpmath.mpf(c) + n) * (1 + n)) * w
            s += term
        ref = float((1 - mpmath.mpf(z)) ** (-a) * s)
    assert hyp2f1(a, b, c, z) == pytest.approx(ref, rel=1e-12)


def test_against_mpmath_sweep():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(200):
        eta = float(rng.uniform(2.05, 6.0))
        z = -float(10 ** rng.uniform(-8, 7))
        for (a, b, c) in [
            (1.0, -2.0 / eta, (eta - 2.0) / eta),
            (1.0, (eta + 2.0) / eta, (eta + 2.0) / eta + 1.0),
        ]:
            got = hyp2f1(a, b, c, z)
            ref = float(mpmath.hyp2f1(a, b, c, z))
            worst = max(worst, abs(got - ref) / abs(ref))
    assert worst < 1e-12


def test_connection_agrees_with_pfaff_at_switch():
    # continuity across the deep-argument switch
    rng = np.random.default_rng(13)
    for _ in range(50):
        eta = float(rng.uniform(2.1, 6.0))
        for (a, b, c) in [
            (1.0, -2.0 / eta, (eta - 2.0) / eta),
            (1.0, (eta + 2.0) / eta, (eta + 2.0) / eta + 1.0),
        ]:
            for z in (-7.9, -8.0, -8.1, -20.0):
                assert _connection(a, b, c, z) == pytest.approx(_pfaff(a, b, c, z), rel=1e-12)


def test_parameter_pole_rejected():
    for c in (0.0, -1.0, -2.0):
        with pytest.raises(ValueError, match="pole"):
            hyp2f1(1.0, 0.5, c, -0.5)


def test_positive_argument_rejected():
    with pytest.raises(ValueError):
        hyp2f1(1.0, 0.5, 1.5, 0.25)
