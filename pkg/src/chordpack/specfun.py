"""Scalar special functions used by the volume formulas and bounds.

All functions take and return Python floats. Inputs that sit within
``BOUNDARY_TOL`` of a domain edge are clamped onto it, since the geometry
layer routinely produces tiny negative squared radii from round-off.
"""

from __future__ import annotations

import math

__all__ = [
    "BOUNDARY_TOL",
    "reg_inc_beta",
    "erf",
    "erf_inv",
    "log_multivariate_gamma",
]

BOUNDARY_TOL = 1e-12

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 20000


def _beta_cf(x: float, a: float, b: float) -> float:
    """Modified Lentz evaluation of the incomplete beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge (x={x}, a={a}, b={b})"
    )


_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _stirling_corr(z: float) -> float:
    """``lgamma(z)`` minus its leading Stirling terms."""
    if z >= 10.0:
        iz = 1.0 / z
        iz2 = iz * iz
        series = 691.0 / 360360.0 - iz2 / 156.0
        for c in (1.0 / 1188.0, 1.0 / 1680.0, 1.0 / 1260.0, 1.0 / 360.0, 1.0 / 12.0):
            series = c - iz2 * series
        return iz * series
    return math.lgamma(z) - ((z - 0.5) * math.log(z) - z + _HALF_LOG_2PI)


def _log_ratio(num: float, den: float, y: float, s: float) -> float:
    """``log(y * s / den)`` given ``num = y * s - den``."""
    u = num / den
    # log1p is well conditioned only near 0; its argument loses digits near -1
    if abs(u) < 0.5:
        return math.log1p(u)
    return math.log(y) + math.log(s / den)


def _log_beta_front(x: float, a: float, b: float) -> float:
    """``log(x**a (1-x)**b / B(a, b))`` without lgamma cancellation."""
    s = a + b
    t1 = a * _log_ratio(x * b - (1.0 - x) * a, a, x, s)
    t2 = b * _log_ratio((1.0 - x) * a - x * b, b, 1.0 - x, s)
    corr = _stirling_corr(s) - _stirling_corr(a) - _stirling_corr(b)
    return t1 + t2 + 0.5 * math.log(a * b / s) - _HALF_LOG_2PI + corr


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function :math:`I_x(a, b)`.

    Parameters
    ----------
    x : float
        Evaluation point in ``[0, 1]``; values within ``1e-12`` outside the
        interval are clamped.
    a, b : float
        Positive shape parameters.

    Returns
    -------
    float
        :math:`I_x(a,b) = B_x(a,b)/B(a,b)` in ``[0, 1]``.

    Raises
    ------
    ValueError
        If ``x`` lies outside ``[-1e-12, 1 + 1e-12]`` or ``a, b <= 0``.
    """
    x = float(x)
    if not (a > 0 and b > 0):
        raise ValueError(f"reg_inc_beta requires a, b > 0 (got a={a}, b={b})")
    if not (-BOUNDARY_TOL <= x <= 1.0 + BOUNDARY_TOL):
        raise ValueError(f"reg_inc_beta requires x in [0, 1] (got x={x})")
    x = min(max(x, 0.0), 1.0)
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = _log_beta_front(x, a, b)
    # The continued fraction converges fast only below the mean; use the
    # reflection I_x(a,b) = 1 - I_{1-x}(b,a) above it.
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cf(x, a, b) / a
    return 1.0 - math.exp(log_front) * _beta_cf(1.0 - x, b, a) / b


def erf(x: float) -> float:
    """Gauss error function."""
    return math.erf(x)


# Rational seed for the inverse error function (Giles, single precision
# branch); Newton polishes it to full double precision.
_GILES_CENTRAL = (
    2.81022636e-08,
    3.43273939e-07,
    -3.5233877e-06,
    -4.39150654e-06,
    0.00021858087,
    -0.00125372503,
    -0.00417768164,
    0.246640727,
    1.50140941,
)
_GILES_TAIL = (
    -0.000200214257,
    0.000100950558,
    0.00134934322,
    -0.00367342844,
    0.00573950773,
    -0.0076224613,
    0.00943887047,
    1.00167406,
    2.83297682,
)


def _erf_inv_seed(y: float) -> float:
    w = -math.log((1.0 - y) * (1.0 + y))
    if w < 5.0:
        w -= 2.5
        coeffs = _GILES_CENTRAL
    else:
        w = math.sqrt(w) - 3.0
        coeffs = _GILES_TAIL
    p = 0.0
    for c in coeffs:
        p = p * w + c
    return p * y


def erf_inv(y: float, max_iter: int = 60) -> float:
    """Inverse of :func:`erf` on the open interval ``(-1, 1)``.

    Newton iteration seeded by a rational approximation. Raises
    ``ValueError`` at or beyond ``+-1``.
    """
    y = float(y)
    if not (-1.0 < y < 1.0):
        raise ValueError(f"erf_inv requires -1 < y < 1 (got y={y})")
    if y == 0.0:
        return 0.0
    sign = 1.0 if y > 0 else -1.0
    y = abs(y)
    # in the tail the residual is formed from erfc, where 1 - y is exact
    tail = y > 0.5
    q = 1.0 - y
    x = _erf_inv_seed(y)
    two_over_sqrt_pi = 2.0 / math.sqrt(math.pi)
    for _ in range(max_iter):
        fx = q - math.erfc(x) if tail else math.erf(x) - y
        dfx = two_over_sqrt_pi * math.exp(-x * x)
        if dfx == 0.0:
            break
        step = fx / dfx
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return sign * x


def log_multivariate_gamma(p: int, n: float) -> float:
    """Log of the complex multivariate gamma function.

    .. math::
        \\log \\tilde\\Gamma_p(n) = \\tfrac{p(p-1)}{2}\\log\\pi
            + \\sum_{i=1}^{p} \\log\\Gamma(n - i + 1)
    """
    if p < 1 or int(p) != p:
        raise ValueError(f"p must be a positive integer (got {p})")
    if not n > p - 1:
        raise ValueError(f"log_multivariate_gamma requires n > p - 1 (got n={n}, p={p})")
    total = 0.5 * p * (p - 1) * math.log(math.pi)
    for i in range(1, p + 1):
        total += math.lgamma(n - i + 1)
    return total
