"""Conditional (weak-value) traversal times, dwell densities and related delays.

For a region Omega and final channel f,

    tau_f(Omega) = (m / hbar k) * integral_Omega psi_f*(x) psi_i(x) dx / <f|i>

with (psi_f, <f|i>) = (psi_t, t), (psi_r, r), or (psi_i, 1) for the plain
dwell time.  The integrals are evaluated piecewise in closed form.

Sign conventions, fixed once against the rectangular-barrier closed form:

    tau_T = i hbar d(ln t)/dV_Omega
    Re tau_T = -hbar d(arg t)/dV_Omega,   Im tau_T = +hbar d(ln|t|)/dV_Omega

so in the opaque limit Im tau_T is negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .scattering import (
    PotentialProfile,
    ScatteringSolution,
    UnitSystem,
    amplitudes,
    rectangular_overlaps,
)

__all__ = [
    "Region",
    "ComplexTime",
    "ChannelTimes",
    "DwellDensitySample",
    "OpaqueLimits",
    "UndefinedChannelTime",
    "amplitude_vanishes",
    "GROUP_DELAY_REFERENCE",
    "conditional_times_rectangular",
    "channel_times",
    "weak_value_time",
    "dwell_density",
    "oscillation_budget",
    "complex_time_via_derivative",
    "group_delay",
    "opaque_asymptotics",
]

GROUP_DELAY_REFERENCE = (
    "hbar d/dE [arg t + k D], D = support width, t the coefficient of exp(ikx) in absolute x: "
    "time to cross the support, so a free region gives m D / hbar k"
)

# |r| below this makes tau_R undefined (transmission resonance).  t has no
# such zeros on the real energy axis; it is only refused once it underflows.
ZERO_AMPLITUDE = 1e-10
_TINY = np.finfo(float).tiny

_CHANNEL_ALIASES = {
    "T": "T",
    "t": "T",
    "transmitted": "T",
    "R": "R",
    "r": "R",
    "reflected": "R",
    "dwell": "dwell",
    "d": "dwell",
    "incident": "dwell",
}


class UndefinedChannelTime(ValueError):
    """The post-selection amplitude of the requested channel vanishes."""

    def __init__(self, channel: str, reason: str):
        super().__init__(f"tau_{channel} undefined: {reason}")
        self.channel = channel
        self.reason = reason


def amplitude_vanishes(amp, channel: str):
    """True where the post-selection amplitude of ``channel`` counts as zero."""
    cut = ZERO_AMPLITUDE if channel == "R" else _TINY
    return np.abs(amp) < cut


def _channel(name: str) -> str:
    try:
        return _CHANNEL_ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown channel {name!r}; use T, R or dwell") from None


@dataclass(frozen=True)
class Region:
    x1: float
    x2: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError("region bounds must be finite")
        if self.x2 < self.x1:
            raise ValueError("region needs x1 <= x2")

    @property
    def length(self) -> float:
        return self.x2 - self.x1

    @classmethod
    def of(cls, profile: PotentialProfile) -> "Region":
        lo, hi = profile.support
        return cls(lo, hi)


@dataclass(frozen=True)
class ComplexTime:
    """A complex duration.  The real part is the pointer position shift, the
    imaginary part sets the scale of the measurement back-action."""

    value: complex
    units: UnitSystem = field(default=UnitSystem(), compare=False)

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    def __abs__(self):
        return abs(self.value)

    def __complex__(self):
        return complex(self.value)


@dataclass(frozen=True)
class ChannelTimes:
    tau_T: ComplexTime | None
    tau_R: ComplexTime | None
    tau_d: float
    w_T: float
    w_R: float
    undefined: dict = field(default_factory=dict)

    def weighted_residual(self) -> complex:
        """w_T tau_T + w_R tau_R - tau_d; terms with an undefined time are
        dropped (their weight vanishes)."""
        total = -self.tau_d + 0j
        if self.tau_T is not None:
            total += self.w_T * self.tau_T.value
        if self.tau_R is not None:
            total += self.w_R * self.tau_R.value
        return total


def weak_value_time(solution: ScatteringSolution, region: Region, channel: str) -> ComplexTime:
    ch = _channel(channel)
    pref = solution.units.flux_time(solution.k)
    if ch == "dwell":
        val = solution.overlap("incident", region.x1, region.x2).real
        return ComplexTime(complex(pref * val), solution.units)
    amp = solution.t if ch == "T" else solution.r
    if amplitude_vanishes(amp, ch):
        raise UndefinedChannelTime(ch, "zero_transmission_amplitude" if ch == "T" else "zero_reflection_amplitude")
    name = "transmitted" if ch == "T" else "reflected"
    return ComplexTime(pref * solution.overlap(name, region.x1, region.x2) / amp, solution.units)


def channel_times(solution: ScatteringSolution, region: Region | None = None) -> ChannelTimes:
    """tau_T, tau_R and tau_d over a region (default: the potential's support)."""
    region = region or Region.of(solution.profile)
    out, undefined = {}, {}
    for ch in ("T", "R"):
        try:
            out[ch] = weak_value_time(solution, region, ch)
        except UndefinedChannelTime as exc:
            out[ch] = None
            undefined[ch] = exc.reason
    tau_d = weak_value_time(solution, region, "dwell").real
    return ChannelTimes(out["T"], out["R"], tau_d, solution.transmission, solution.reflection, undefined)


def conditional_times_rectangular(V0: float, d: float, E: float, units: UnitSystem = UnitSystem()) -> ChannelTimes:
    """Closed-form tau_T, tau_R, tau_d for the barrier V0 on [-d/2, d/2]."""
    i_t, i_r, i_d, co = rectangular_overlaps(V0, d, E, units)
    pref = units.flux_time(units.wavenumber(E))
    undefined = {}
    tau_T = ComplexTime(pref * i_t / co.t, units)
    if abs(co.r) < ZERO_AMPLITUDE:
        tau_R = None
        undefined["R"] = "zero_reflection_amplitude"
    else:
        tau_R = ComplexTime(pref * i_r / co.r, units)
    return ChannelTimes(tau_T, tau_R, pref * i_d, abs(co.t) ** 2, abs(co.r) ** 2, undefined)


@dataclass(frozen=True)
class DwellDensitySample:
    x: np.ndarray
    density_T: np.ndarray | None
    density_R: np.ndarray | None
    density_d: np.ndarray


def dwell_density(solution: ScatteringSolution, x, channel: str | None = None) -> DwellDensitySample:
    """Pointwise integrands of the channel times (per unit length).

    With ``channel`` given only that density is required to exist; the others
    are still filled in when defined.
    """
    x = np.asarray(x, dtype=float)
    pref = solution.units.flux_time(solution.k)
    psi_i = solution.psi("incident", x)
    dens_d = pref * np.abs(psi_i) ** 2
    want = _channel(channel) if channel else None
    dens = {}
    for ch, amp, fin in (("T", solution.t, "transmitted"), ("R", solution.r, "reflected")):
        if amplitude_vanishes(amp, ch):
            if want == ch:
                raise UndefinedChannelTime(ch, f"zero_{'transmission' if ch == 'T' else 'reflection'}_amplitude")
            dens[ch] = None
            continue
        psi_f_conj = np.conj(solution.psi(fin, x))
        dens[ch] = pref * psi_f_conj * psi_i / amp
    return DwellDensitySample(x, dens["T"], dens["R"], dens_d)


def _asymptotic_baseline(solution: ScatteringSolution, channel: str, side: str) -> complex:
    """Non-oscillating part of the channel density outside the potential."""
    idx = 0 if side == "left" else -1
    inc = solution.pieces("incident")[idx]
    if channel == "T":
        fin, amp = solution.pieces("transmitted")[idx], solution.t
    elif channel == "R":
        fin, amp = inc, solution.r
    else:
        fin, amp = inc.conj(), 1.0
    total = 0j
    for r1, c1 in zip(fin.rates, fin.coefs):
        for r2, c2 in zip(inc.rates, inc.coefs):
            if r1 + r2 == 0:
                total += c1 * c2
    return solution.units.flux_time(solution.k) * total / amp


def oscillation_budget(solution: ScatteringSolution, channel: str, side: str, n_periods: int = 1) -> complex:
    """Integral of (density - baseline) over n half-wavelengths pi/k next to the potential.

    The interference terms outside the potential go as exp(+-2ikx), so this
    vanishes for every channel and side.
    """
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    ch = _channel(channel)
    length = n_periods * math.pi / solution.k
    lo, hi = solution.profile.support
    region = Region(lo - length, lo) if side == "left" else Region(hi, hi + length)
    total = weak_value_time(solution, region, ch).value
    return complex(total - _asymptotic_baseline(solution, ch, side) * length)


def _richardson_central(fn, h: float):
    """Two-level Richardson on central differences; fn(h) returns f(x+h) - f(x-h)."""
    d1 = fn(h) / (2 * h)
    d2 = fn(h / 2) / h
    return (4 * d2 - d1) / 3


def _derivative_step(E: float, profile: PotentialProfile) -> float:
    vmax = float(np.max(np.abs(profile.potentials))) if profile.segments else 0.0
    return 1e-5 * max(E, vmax)


def complex_time_via_derivative(
    profile: PotentialProfile,
    region: Region,
    E: float,
    units: UnitSystem = UnitSystem(),
    channel: str = "T",
) -> ComplexTime:
    """tau = i hbar d(ln a)/dV_Omega, a = t or r, by Richardson-extrapolated
    central differences of a uniform potential shift on the region."""
    ch = _channel(channel)
    if ch == "dwell":
        raise ValueError("derivative characterization is defined for T and R")
    prof, mask = profile.aligned(region.x1, region.x2)
    h = _derivative_step(E, prof)
    steps = np.array([h, -h, h / 2, -h / 2])
    dV = mask[:, None] * steps[None, :]
    t, r = amplitudes(prof, E, units, dV)
    a = t if ch == "T" else r
    if np.any(amplitude_vanishes(a, ch)):
        raise UndefinedChannelTime(ch, "zero_amplitude")
    diffs = {h: np.log(a[0] / a[1]), h / 2: np.log(a[2] / a[3])}
    dlog = _richardson_central(lambda s: diffs[s], h)
    return ComplexTime(complex(1j * units.hbar * dlog), units)


def group_delay(profile: PotentialProfile, E: float, units: UnitSystem = UnitSystem()) -> float:
    """Phase time hbar d/dE [arg t + k D] (see GROUP_DELAY_REFERENCE)."""
    if not E > 0:
        raise ValueError("energy must be positive")
    D = profile.width if profile.segments else 0.0
    h = min(_derivative_step(E, profile), 0.25 * E)

    def diff(s):
        tp, _ = amplitudes(profile, E + s, units)
        tm, _ = amplitudes(profile, E - s, units)
        dk = units.wavenumber(E + s) - units.wavenumber(E - s)
        return float(np.angle(tp / tm)) + dk * D

    return units.hbar * _richardson_central(diff, h)


@dataclass(frozen=True)
class OpaqueLimits:
    """Reference values for kappa d >> 1.

    ``re_limit`` is m k / (hbar kappa k0**2) with k0**2 = 2 m V0 / hbar**2;
    ``dwell_limit`` is the leading term of the exact dwell time in the same
    limit, 2 m k / (hbar kappa k0**2).
    """

    re_limit: float
    im_limit: float
    modulus: float
    dwell_limit: float


def opaque_asymptotics(V0: float, d: float, E: float, units: UnitSystem = UnitSystem()) -> OpaqueLimits:
    if not 0 < E < V0:
        raise ValueError("opaque asymptotics need 0 < E < V0")
    m, hb = units.mass, units.hbar
    k = units.wavenumber(E)
    kappa = math.sqrt(2 * m * (V0 - E)) / hb
    k0sq = 2 * m * V0 / hb**2
    re = m * k / (hb * kappa * k0sq)
    im = m * d / (hb * kappa)
    return OpaqueLimits(re, im, math.hypot(re, im), 2 * re)

