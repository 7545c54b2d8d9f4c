"""Bose functions g_s(z) = sum_{i>=1} z^i / i^s.

For z < 1/2 the series is summed directly until the terms drop below the
double-precision floor.  Closer to z = 1 the first M - 1 terms are summed
and the remainder sum_{i>=M} f(i), f(x) = exp(-y x) x^-s with y = -ln z,
is replaced by its Euler-Maclaurin expansion

    int_M^inf f dx + f(M)/2 - sum_k B_2k / (2k)! f^(2k-1)(M).

The tail integral is M^(1-s) E_s(yM) with E_s the generalized exponential
integral.  With M = 32 and eight Bernoulli terms the truncation error is
below 1e-14 relative for the orders used here (s <= ~10).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import bernoulli, exp1, gammaincc
from scipy.special import gamma as gamma_fn
from scipy.special import zeta as _zeta

from . import kernels

_M = 32
_K = 8
_B = bernoulli(2 * _K)
_EM_COEF = [_B[2 * k] / math.factorial(2 * k) for k in range(1, _K + 1)]
_DIRECT_Z = 0.5
_RTOL = 1e-17


class BoseDomainError(ValueError):
    pass


def expint_e(s, t):
    """E_s(t) = int_1^inf exp(-t u) u^-s du for real s and t >= 0."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        if s <= 1:
            raise BoseDomainError("E_s(0) diverges for s <= 1")
        return 1.0 / (s - 1)
    if t >= 1.0:
        # modified Lentz evaluation of the continued fraction
        b = t + s
        c = 1e300
        d = 1.0 / b
        h = d
        for i in range(1, 1000):
            an = -i * (s - 1 + i)
            b += 2.0
            d = 1.0 / (an * d + b)
            c = b + an / c
            delta = c * d
            h *= delta
            if abs(delta - 1.0) < 1e-16:
                break
        return h * math.exp(-t)
    # small t: start from an order a in (0, 1] and recur upwards,
    # E_{a+1} = (exp(-t) - t E_a) / a, which is stable for t < 1
    a = s - math.ceil(s) + 1.0
    if a == 1.0:
        e = float(exp1(t))
    else:
        e = t ** (a - 1) * float(gamma_fn(1 - a)) * float(gammaincc(1 - a, t))
    while a < s - 1e-12:
        e = (math.exp(-t) - t * e) / a
        a += 1.0
    return e


def _em_tail(s, y):
    """sum_{i >= M} exp(-y i) i^-s via Euler-Maclaurin."""
    m = float(_M)
    em = math.exp(-y * m)
    tail = m ** (1 - s) * expint_e(s, y * m) + 0.5 * em * m ** (-s)
    for k, coef in enumerate(_EM_COEF, start=1):
        n = 2 * k - 1
        # n-th derivative of exp(-y x) x^-s at x = M
        d = 0.0
        rising = 1.0
        for j in range(n + 1):
            d += math.comb(n, j) * (-y) ** (n - j) * (-1) ** j * rising * m ** (-s - j)
            rising *= s + j
        tail -= coef * em * d
    return tail


def _check(s, z):
    if z < 0 or z > 1 or not math.isfinite(z):
        raise BoseDomainError(f"z = {z!r} outside [0, 1]")
    if z == 1 and s <= 1:
        raise BoseDomainError(f"g_{s}(1) diverges (s <= 1)")


def _bose_scalar(s, z):
    if z == 0:
        return 0.0
    if z < _DIRECT_Z:
        return kernels.bose_direct(s, z, _RTOL, 10_000)[0]
    y = -math.log(z) if z < 1 else 0.0
    return kernels.bose_head(s, z, _M - 1) + _em_tail(s, y)


def _bose_from_y(s, y):
    z = math.exp(-y)
    if z < _DIRECT_Z:
        return kernels.bose_direct(s, z, _RTOL, 10_000)[0]
    return kernels.bose_head(s, z, _M - 1) + _em_tail(s, y)


def bose_g(s, z):
    """Bose function g_s(z) for 0 <= z <= 1 (s > 1 required at z = 1).

    Accepts scalar or array z.  Orders s < 1 are allowed for z < 1.
    """
    s = float(s)
    if np.ndim(z) == 0:
        z = float(z)
        _check(s, z)
        return _bose_scalar(s, z)
    z = np.asarray(z, dtype=float)
    if z.size and (z.min() < 0 or z.max() > 1 or not np.all(np.isfinite(z))):
        raise BoseDomainError("z outside [0, 1]")
    if s <= 1 and np.any(z == 1):
        raise BoseDomainError(f"g_{s}(1) diverges (s <= 1)")
    flat = z.ravel()
    out = np.empty_like(flat)
    small = flat < _DIRECT_Z
    if small.any():
        out[small] = kernels.bose_direct_array(s, np.ascontiguousarray(flat[small]), _RTOL, 10_000)
    for i in np.flatnonzero(~small):
        out[i] = _bose_scalar(s, float(flat[i]))
    return out.reshape(z.shape)


def bose_g_exp(s, x):
    """g_s(exp(-x)) for x >= 0.

    Takes the exponent itself so that arguments with exp(-x) within
    rounding of 1 keep their distance from the singular point.
    """
    s = float(s)
    if np.ndim(x) == 0:
        x = float(x)
        if x < 0:
            raise BoseDomainError("x must be non-negative")
        if x == 0:
            _check(s, 1.0)
        return _bose_from_y(s, x)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise BoseDomainError("x must be non-negative")
    if s <= 1 and np.any(x == 0):
        raise BoseDomainError(f"g_{s}(1) diverges (s <= 1)")
    flat = x.ravel()
    out = np.empty_like(flat)
    z = np.exp(-flat)
    small = z < _DIRECT_Z
    if small.any():
        out[small] = kernels.bose_direct_array(s, np.ascontiguousarray(z[small]), _RTOL, 10_000)
    for i in np.flatnonzero(~small):
        out[i] = _bose_from_y(s, float(flat[i]))
    return out.reshape(x.shape)


def zeta(s):
    """Riemann zeta for s > 1 (g_s(1))."""
    if s <= 1:
        raise BoseDomainError("zeta(s) diverges for s <= 1")
    return float(_zeta(s))
