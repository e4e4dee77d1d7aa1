"""Gauss hypergeometric function 2F1 for real nonpositive argument.

The closed-form interference transforms only ever need 2F1 on the ray
z <= 0 with small real parameters, so this evaluator stays deliberately
small:

  * z in (-1, 0]: defining power series, term-ratio stop at 1e-16
    (Kahan-compensated accumulation);
  * z in [-8, -1]: Pfaff transformation
        2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)),
    which maps the argument into (0, 1) where the series converges;
  * z < -8: the 1/z connection formula (DLMF 15.8.2), two series in
    1/|z| < 1/8, valid whenever a-b is not an integer.  For integer a-b
    (where 15.8.2 degenerates) the Pfaff route is used at any depth; that
    path is slow for very deep z but the integer-difference parameter sets
    this package meets never go there.

Sources: DLMF chapter 15; Pearson, Olver & Porter, "Numerical methods for
the computation of the confluent and Gauss hypergeometric functions".
"""

from __future__ import annotations

import math

_TOL = 1e-16
_MAX_TERMS = 1_000_000
_DEEP_Z = -8.0


def _is_nonpositive_int(x: float, eps: float = 1e-12) -> bool:
    return x <= eps and abs(x - round(x)) < eps


def _series(a: float, b: float, c: float, z: float) -> float:
    """Power series sum_{n} (a)_n (b)_n / ((c)_n n!) z^n for |z| < 1."""
    term = 1.0
    s = 1.0
    comp = 0.0  # Kahan compensation
    for n in range(_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (1.0 + n)) * z
        y = term - comp
        t = s + y
        comp = (t - s) - y
        s = t
        if abs(term) <= _TOL * abs(s):
            return s
    raise ArithmeticError(f"2F1 series did not converge for a={a}, b={b}, c={c}, z={z}")


def _pfaff(a: float, b: float, c: float, z: float) -> float:
    w = z / (z - 1.0)
    return (1.0 - z) ** (-a) * _series(a, c - b, c, w)


def _connection(a: float, b: float, c: float, z: float) -> float:
    # DLMF 15.8.2 specialised to real z < -1, a-b not an integer.
    g = math.gamma
    t1 = (
        g(c) * g(b - a) / (g(b) * g(c - a))
        * (-z) ** (-a)
        * _series(a, a - c + 1.0, a - b + 1.0, 1.0 / z)
    )
    t2 = (
        g(c) * g(a - b) / (g(a) * g(c - b))
        * (-z) ** (-b)
        * _series(b, b - c + 1.0, b - a + 1.0, 1.0 / z)
    )
    return t1 + t2


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """2F1(a, b; c; z) for real z <= 0.

    Raises ValueError at the parameter poles c in {0, -1, -2, ...} and for
    z > 0 (outside this evaluator's domain).
    """
    if _is_nonpositive_int(c):
        raise ValueError(f"2F1 parameter pole: c={c} is a nonpositive integer")
    if z > 0.0:
        raise ValueError(f"this evaluator only covers z <= 0, got z={z}")
    if z == 0.0:
        return 1.0
    if z > -1.0:
        return _series(a, b, c, z)
    ab = a - b
    if z >= _DEEP_Z or abs(ab - round(ab)) < 1e-8:
        return _pfaff(a, b, c, z)
    return _connection(a, b, c, z)
