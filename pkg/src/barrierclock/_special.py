"""Entire functions of q**2 used by the segment propagators and integrals.

Inside a segment the local equation is psi'' = q2 * psi with q2 real, so
every quantity here is written in terms of

    C(s) = cosh(q s)        S(s) = sinh(q s) / q

which are entire in q2 and continue to cos / sin when q2 < 0.
"""

from __future__ import annotations

import math

import numpy as np

# |q2| * s**2 below this uses the power series
_SERIES_CUTOFF = 1.0
_SERIES_TERMS = 24


def ch(q2, s):
    """cosh(q s) for real q2 (cos for q2 < 0)."""
    q2 = np.asarray(q2, dtype=float)
    s = np.asarray(s, dtype=float)
    rt = np.sqrt(np.abs(q2))
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(q2 > 0, np.cosh(rt * s), np.cos(rt * s))
    return out


def shc(q2, s):
    """sinh(q s) / q for real q2; reduces to s at q2 = 0."""
    q2 = np.asarray(q2, dtype=float)
    s = np.asarray(s, dtype=float)
    rt = np.sqrt(np.abs(q2))
    safe = np.where(rt == 0, 1.0, rt)
    with np.errstate(over="ignore", invalid="ignore"):
        val = np.where(q2 > 0, np.sinh(rt * s), np.sin(rt * s)) / safe
    return np.where(rt == 0, s, val)


def _series(u: float, coeff) -> float:
    total = 0.0
    power = 1.0
    for n in range(1, _SERIES_TERMS + 1):
        total += coeff(n) * power
        power *= u
    return total


def sh_minus_s_over_q2(q2: float, s: float) -> float:
    """(S(s) - s) / q2, i.e. s**3/6 + q2 s**5/120 + ... without cancellation."""
    u = q2 * s * s
    if abs(u) < _SERIES_CUTOFF:
        return s**3 * _series(u, lambda n: 1.0 / math.factorial(2 * n + 1))
    return (float(shc(q2, s)) - s) / q2


def cs_primitives(q2: float, s: float) -> tuple[float, float, float]:
    """Antiderivatives from 0 to s of C*C, C*S and S*S."""
    u = q2 * s * s
    f_cc = 0.5 * s + 0.25 * float(shc(q2, 2.0 * s))
    if abs(u) < _SERIES_CUTOFF:
        f_cs = s * s * _series(u, lambda n: 4.0 ** (n - 1) / math.factorial(2 * n))
        f_ss = s**3 * _series(u, lambda n: 4.0**n / (2.0 * math.factorial(2 * n + 1)))
    else:
        f_cs = (float(ch(q2, 2.0 * s)) - 1.0) / (4.0 * q2)
        f_ss = (0.5 * float(shc(q2, 2.0 * s)) - s) / (2.0 * q2)
    return f_cc, f_cs, f_ss


def _expm1_over(z: complex) -> complex:
    if z == 0:
        return 1.0
    return complex(np.expm1(z)) / z


def exp_integral(rate: complex, lo: float, hi: float, anchor: complex) -> complex:
    """Integral of exp(rate * (x - anchor)) for x in [lo, hi].

    The exponential is always evaluated at the endpoint where it is larger,
    so the result never overflows before its true magnitude does.
    """
    length = hi - lo
    if length == 0:
        return 0.0
    if rate == 0:
        return complex(length)
    if rate.real > 0:
        base = np.exp(rate * (hi - anchor))
        return complex(base * length * _expm1_over(-rate * length))
    base = np.exp(rate * (lo - anchor))
    return complex(base * length * _expm1_over(rate * length))
