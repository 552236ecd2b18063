"""Brute-force validators, deliberately independent of the primary solvers.

* integrate_schrodinger: fixed-step RK4 on (psi, psi') from the outgoing
  side, plane-wave decomposition on the incident side.
* quadrature_weak_value: adaptive Gauss-Kronrod of psi_f* psi_i / a_f.
* richardson_derivative: central differences, one Richardson level.

None of these touch the transfer-matrix propagation or the closed-form
segment integrals.  They are slow, which is fine.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import quad

from .scattering import PotentialProfile, ScatteringSolution, UnitSystem
from .weaktimes import ComplexTime, Region, UndefinedChannelTime, _channel, amplitude_vanishes

__all__ = [
    "OracleReport",
    "OracleError",
    "integrate_schrodinger",
    "quadrature_weak_value",
    "richardson_derivative",
    "POINTS_PER_LENGTH",
    "MAX_KAPPA_D",
]

POINTS_PER_LENGTH = 50
# beyond this total kappa*d the RK4 budget is not trusted
MAX_KAPPA_D = 30.0


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleReport:
    """One primary-vs-oracle comparison.  ``passed`` is discrepancy <= tolerance,
    with the discrepancy taken as relative or absolute per ``metric``."""

    quantity: str
    primary: complex
    oracle: complex
    abs_error: float
    rel_error: float
    tolerance: float
    metric: str
    passed: bool

    @classmethod
    def compare(cls, quantity, primary, oracle, tolerance, metric="rel") -> "OracleReport":
        primary, oracle = complex(primary), complex(oracle)
        abs_err = abs(primary - oracle)
        scale = abs(oracle)
        rel_err = abs_err / scale if scale > 0 else (0.0 if abs_err == 0 else math.inf)
        disc = rel_err if metric == "rel" else abs_err
        return cls(quantity, primary, oracle, abs_err, rel_err, float(tolerance), metric, bool(disc <= tolerance))

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("primary", "oracle"):
            z = d[key]
            d[key] = z.real if z.imag == 0 else [z.real, z.imag]
        # an infinite relative error (zero oracle value) is written as null
        if not math.isfinite(d["rel_error"]):
            d["rel_error"] = None
        return d

    def to_json(self) -> str:
        from .serialize import dumps

        return dumps(self.to_dict())


def _rk4_matrix(q2: float, h: float) -> np.ndarray:
    """One classical RK4 step for y' = A y, A = [[0, 1], [q2, 0]]."""
    A = np.array([[0.0, 1.0], [q2, 0.0]])
    hA = h * A
    hA2 = hA @ hA
    hA3 = hA2 @ hA
    return np.eye(2) + hA + hA2 / 2.0 + hA3 / 6.0 + hA3 @ hA / 24.0


def integrate_schrodinger(
    profile: PotentialProfile,
    E: float,
    grid_step: float | None = None,
    units: UnitSystem = UnitSystem(),
) -> tuple[complex, complex]:
    """(t, r) for left incidence by dense-grid RK4 integration."""
    if E <= 0:
        raise ValueError("energy must be positive")
    m, hb = units.mass, units.hbar
    k = math.sqrt(2 * m * E) / hb
    if not profile.segments:
        return 1.0 + 0j, 0j
    q2s = [2 * m * (s.V - E) / hb**2 for s in profile.segments]
    kmax = max([k] + [math.sqrt(abs(q)) for q in q2s])
    limit = 1.0 / (POINTS_PER_LENGTH * kmax)
    if grid_step is None:
        grid_step = limit
    if grid_step > limit * (1 + 1e-12):
        raise OracleError(f"grid_step {grid_step} does not resolve 1/k_max with {POINTS_PER_LENGTH} points")
    opacity = sum(math.sqrt(q) * s.width for q, s in zip(q2s, profile.segments) if q > 0)
    if opacity > MAX_KAPPA_D:
        raise OracleError(f"total kappa*d = {opacity:.1f} exceeds the oracle budget {MAX_KAPPA_D}")

    x_right = profile.segments[-1].x_right
    y = np.array([np.exp(1j * k * x_right), 1j * k * np.exp(1j * k * x_right)])
    for seg, q2 in zip(reversed(profile.segments), reversed(q2s)):
        n = max(1, math.ceil(seg.width / grid_step))
        step = np.linalg.matrix_power(_rk4_matrix(q2, -seg.width / n), n)
        y = step @ y
    x_left = profile.segments[0].x_left
    psi, dpsi = y
    a_in = 0.5 * (psi + dpsi / (1j * k)) * np.exp(-1j * k * x_left)
    a_back = 0.5 * (psi - dpsi / (1j * k)) * np.exp(1j * k * x_left)
    return complex(1.0 / a_in), complex(a_back / a_in)


def quadrature_weak_value(
    solution: ScatteringSolution,
    region: Region,
    channel: str,
    tolerance: float = 1e-13,
    limit: int = 400,
) -> ComplexTime:
    """Channel time over ``region`` by adaptive quadrature of the pointwise integrand."""
    ch = _channel(channel)
    if ch == "dwell":
        amp = 1.0

        def integrand(x):
            return abs(solution.psi("incident", x)) ** 2
    else:
        amp = solution.t if ch == "T" else solution.r
        if amplitude_vanishes(amp, ch):
            raise UndefinedChannelTime(ch, "zero_amplitude")
        final = "transmitted" if ch == "T" else "reflected"

        def integrand(x):
            return np.conj(solution.psi(final, x)) * solution.psi("incident", x) / amp

    x1, x2 = region.x1, region.x2
    if x2 == x1:
        return ComplexTime(0j, solution.units)
    cuts = [e for e in solution.profile.edges if x1 < e < x2]
    bounds = [x1, *cuts, x2]
    total = 0j
    for a, b in zip(bounds[:-1], bounds[1:]):
        for part, fn in ((1.0, lambda x: np.real(integrand(x))), (1j, lambda x: np.imag(integrand(x)))):
            val, err, info = quad(fn, a, b, epsabs=tolerance, epsrel=1e-13, limit=limit, full_output=True)[:3]
            if err > max(tolerance, 1e-10 * abs(val)) * 10:
                raise OracleError(f"quadrature did not converge on [{a}, {b}] (error estimate {err:.3g})")
            total += part * val
    pref = solution.units.mass / (solution.units.hbar * solution.k)
    return ComplexTime(complex(pref * total), solution.units)


def richardson_derivative(f, x0: float, base_step: float, bound: float | None = None) -> tuple[float, float]:
    """Derivative of f at x0 and an error estimate from the two levels.

    Raises OracleError when ``bound`` is given and the estimate exceeds it.
    """
    def central(h):
        return (f(x0 + h) - f(x0 - h)) / (2.0 * h)

    coarse, fine = central(base_step), central(base_step / 2.0)
    est = fine + (fine - coarse) / 3.0
    err = abs(est - fine)
    if bound is not None and err > bound:
        raise OracleError(f"Richardson error estimate {err:.3g} exceeds bound {bound:.3g}")
    return est, err
