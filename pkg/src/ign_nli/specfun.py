"""Imaginary-axis dilogarithm kernel used by the closed-form NLI integrals.

``li2_imag_diff(x)`` is ``j*[Li2(-jx) - Li2(jx)]``, which is real for real ``x``
and equals ``2*Ti2(x)``, twice the inverse tangent integral.
"""
from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "inverse_tangent_integral",
    "li2_imag_diff",
    "li2_diff_asinh_approx",
    "li2_diff_log_approx",
]

_SERIES_RADIUS = 0.5
_SERIES_RTOL = 1e-17
_SERIES_MAX_TERMS = 200

# Nonzero Bernoulli numbers B_0, B_1, B_2, B_4, ..., B_30.
_BERNOULLI = {
    0: Fraction(1),
    1: Fraction(-1, 2),
    2: Fraction(1, 6),
    4: Fraction(-1, 30),
    6: Fraction(1, 42),
    8: Fraction(-1, 30),
    10: Fraction(5, 66),
    12: Fraction(-691, 2730),
    14: Fraction(7, 6),
    16: Fraction(-3617, 510),
    18: Fraction(43867, 798),
    20: Fraction(-174611, 330),
    22: Fraction(854513, 138),
    24: Fraction(-236364091, 2730),
    26: Fraction(8553103, 6),
    28: Fraction(-23749461029, 870),
    30: Fraction(8615841276005, 14322),
}
# Li2(z) = sum_n B_n u^(n+1) / (n+1)!  with u = -log(1 - z), valid for |u| < 2*pi.
_LI2_BERNOULLI_COEFFS = tuple(
    (n + 1, float(b / math.factorial(n + 1))) for n, b in sorted(_BERNOULLI.items())
)


def _ti2_series(x: float) -> float:
    total = 0.0
    x2 = x * x
    power = x
    for k in range(_SERIES_MAX_TERMS):
        denom = 2 * k + 1
        term = power / (denom * denom)
        total += -term if k % 2 else term
        if abs(term) < _SERIES_RTOL * abs(total):
            break
        power *= x2
    return total


def _ti2_bernoulli(x: float) -> float:
    # Im Li2(jx) for 0 < x <= 1; |u| <= |log(1 - j)| ~ 0.86 keeps the series short.
    u = complex(-0.5 * math.log1p(x * x), math.atan(x))
    total = 0j
    for power, coeff in _LI2_BERNOULLI_COEFFS:
        term = coeff * u**power
        total += term
        if abs(term) < _SERIES_RTOL * abs(total):
            break
    return total.imag


def inverse_tangent_integral(x: float) -> float:
    """Ti2(x) = integral of arctan(t)/t from 0 to x."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"argument must be finite, got {x!r}")
    ax = abs(x)
    if ax <= _SERIES_RADIUS:
        value = _ti2_series(ax)
    elif ax <= 1.0:
        value = _ti2_bernoulli(ax)
    else:
        # Ti2(x) = pi/2 log x + Ti2(1/x) for x > 0
        inv = 1.0 / ax
        tail = _ti2_series(inv) if inv <= _SERIES_RADIUS else _ti2_bernoulli(inv)
        value = 0.5 * math.pi * math.log(ax) + tail
    return math.copysign(value, x) if value else 0.0


def li2_imag_diff(x: float) -> float:
    """Return ``j*[Li2(-jx) - Li2(jx)] = 2*Ti2(x)``; odd and strictly increasing."""
    return 2.0 * inverse_tangent_integral(x)


def li2_diff_asinh_approx(x: float) -> float:
    """Approximant ``pi*asinh(x/2)`` of :func:`li2_imag_diff`."""
    return math.pi * math.asinh(0.5 * x)


def li2_diff_log_approx(x: float) -> float:
    """Approximant ``pi*log(1 + x)``, defined for ``x >= 0`` only."""
    if x < 0:
        raise ValueError(f"log approximant is defined for x >= 0, got {x!r}")
    return math.pi * math.log1p(x)
