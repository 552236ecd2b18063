"""Physical clocks that realize the weak measurement of the region projector.

Larmor clock: a field along z confined to the region splits the S_z
components, H_int = -omega_L S_z on the region, so component m scatters off
V - hbar omega_L m there.  After post-selection on a channel the spin has

    in-plane angle  = -arg <S+>_f      (rotation about the field)
    out-of-plane    = <S_z>_f / (hbar S)

and tau_y = angle / omega_L -> Re tau, tau_z = out_of_plane / omega_L -> -Im tau
as omega_L -> 0.

Gaussian pointer: in the pointer-momentum representation the particle sees
V + g0 P on the region, so the post-selected pointer amplitude is
a_f(V + g0 P) Phi_0(P) with Phi_0 the Fourier transform of exp(-Q^2 / 4 sigma^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .scattering import PotentialProfile, UnitSystem, amplitudes
from .weaktimes import Region, _channel

__all__ = [
    "SpinState",
    "SpinClockResult",
    "PointerOutcome",
    "ClockError",
    "coherent_spin_state",
    "squeezed_spin_state",
    "larmor_spin_half",
    "larmor_spin_S",
    "pointer_measurement",
    "far_side_field_effect",
]

# post-selected norms below this are treated as zero
MIN_NORM = 1e-300
GRID_POINTS = 2048
GRID_STDDEVS = 8.0
GRID_TOL = 1e-8


class ClockError(ValueError):
    """Post-selection left nothing to measure, or the pointer grid is too coarse."""


@dataclass(frozen=True)
class SpinState:
    """Amplitudes over S_z eigenvalues m = -S, ..., S (ascending)."""

    S: float
    amplitudes: np.ndarray

    def __post_init__(self):
        if 2 * self.S != int(2 * self.S) or self.S < 0.5:
            raise ValueError("S must be a positive half-integer")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (int(round(2 * self.S)) + 1,):
            raise ValueError("need 2S + 1 amplitudes")
        object.__setattr__(self, "amplitudes", amps / np.linalg.norm(amps))

    @property
    def m(self) -> np.ndarray:
        return np.arange(int(round(2 * self.S)) + 1) - self.S

    @property
    def sz_mean(self) -> float:
        return float(np.sum(self.m * np.abs(self.amplitudes) ** 2))

    @property
    def sz_width(self) -> float:
        p = np.abs(self.amplitudes) ** 2
        return math.sqrt(max(float(np.sum(self.m**2 * p)) - self.sz_mean**2, 0.0))


def coherent_spin_state(S: float) -> SpinState:
    """Maximum-S_x eigenstate: binomial amplitudes, S_z width sqrt(S/2)."""
    n = int(round(2 * S))
    j = np.arange(n + 1)
    log_binom = np.array([math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1) for i in j])
    return SpinState(S, np.exp(0.5 * (log_binom - n * math.log(2.0))))


def _gaussian_profile(m, s):
    return np.exp(-(m**2) / (4.0 * s * s))


def squeezed_spin_state(S: float, width: float) -> SpinState:
    """Mean spin along x with reduced S_z spread.

    Real Gaussian amplitudes exp(-m^2 / 4 s^2); s is solved for so that the
    S_z spread of the discrete state equals ``width`` (for width >~ 1 this is
    s = width, for narrow states the lattice matters).
    """
    if not width > 0:
        raise ValueError("width must be positive")
    if width > math.sqrt(S / 2) * (1 + 1e-12):
        raise ValueError("width may not exceed the coherent-state value sqrt(S/2)")
    m = np.arange(int(round(2 * S)) + 1) - S
    p_floor = 0.25 if (2 * S) % 2 == 1 else 0.0
    if width**2 <= p_floor:
        raise ValueError(f"S_z spread below {math.sqrt(p_floor)} is impossible for half-integer S")

    def spread(s):
        p = _gaussian_profile(m, s) ** 2
        return math.sqrt(float(np.sum(m**2 * p) / np.sum(p))) - width

    hi = 10.0 * max(width, 1.0) * (S + 1)
    if spread(hi) <= 0:
        return SpinState(S, np.ones_like(m))
    s = brentq(spread, 1e-3, hi, xtol=1e-15, rtol=1e-15)
    return SpinState(S, _gaussian_profile(m, s))


@dataclass(frozen=True)
class SpinClockResult:
    omega_L: float
    in_plane_angle: float
    out_of_plane: float
    tau_y: float
    tau_z: float
    channel: str
    norm: float


def _post_selected(profile, region, E, shifts, channel, units):
    prof, mask = profile.aligned(region.x1, region.x2)
    dV = mask[:, None].astype(float) * np.asarray(shifts, dtype=float)[None, :]
    t, r = amplitudes(prof, E, units, dV)
    ch = _channel(channel)
    if ch == "dwell":
        raise ValueError("post-selection needs channel T or R")
    return t if ch == "T" else r, ch


def _result(omega_L, amps, m, S, channel) -> SpinClockResult:
    p = np.abs(amps) ** 2
    norm = float(np.sum(p))
    if norm < MIN_NORM:
        raise ClockError("post-selected norm vanishes")
    ladder = np.sqrt(S * (S + 1) - m[:-1] * (m[:-1] + 1))
    # conj(a[m+1]) * a[m] in real arithmetic: an FMA in the complex product
    # leaves a spurious imaginary part when the amplitudes are equal
    hi, lo = amps[1:], amps[:-1]
    re = np.sum((hi.real * lo.real + hi.imag * lo.imag) * ladder)
    im = np.sum((hi.real * lo.imag - hi.imag * lo.real) * ladder)
    if omega_L == 0:
        # no field, no precession; the sums above only reproduce this to rounding
        return SpinClockResult(0.0, 0.0, 0.0, 0.0, 0.0, channel, norm)
    angle = -math.atan2(im, re)
    out = float(np.sum(m * p)) / (S * norm)
    tau_y, tau_z = angle / omega_L, out / omega_L
    return SpinClockResult(omega_L, angle, out, tau_y, tau_z, channel, norm)


def larmor_spin_half(
    profile: PotentialProfile,
    region: Region,
    E: float,
    omega_L: float,
    channel: str = "T",
    units: UnitSystem = UnitSystem(),
) -> SpinClockResult:
    """Spin-1/2 Larmor clock, initially along +x, field on ``region`` only.

    At omega_L = 0 the angles vanish and tau_y, tau_z are reported as 0.
    """
    hw = 0.5 * units.hbar * omega_L
    # order m = -1/2, +1/2
    a, ch = _post_selected(profile, region, E, [hw, -hw], channel, units)
    return _result(omega_L, a / math.sqrt(2.0), np.array([-0.5, 0.5]), 0.5, ch)


def larmor_spin_S(
    profile: PotentialProfile,
    region: Region,
    E: float,
    omega_L: float,
    state: SpinState,
    channel: str = "T",
    units: UnitSystem = UnitSystem(),
) -> SpinClockResult:
    m = state.m
    a, ch = _post_selected(profile, region, E, -units.hbar * omega_L * m, channel, units)
    return _result(omega_L, a * state.amplitudes, m, state.S, ch)


def far_side_field_effect(
    profile: PotentialProfile,
    barrier_region: Region,
    probe_region: Region,
    E: float,
    omega_L: float,
    units: UnitSystem = UnitSystem(),
) -> SpinClockResult:
    """Spin-1/2 clock with the field only beyond the barrier, post-selected on reflection."""
    if probe_region.x1 < barrier_region.x2:
        raise ValueError("probe region must lie strictly to the right of the barrier")
    return larmor_spin_half(profile, probe_region, E, omega_L, "R", units)


@dataclass(frozen=True)
class PointerOutcome:
    sigma: float
    g0: float
    dQ: float
    dP: float
    norm: float
    channel: str
    n_points: int


def _odd_moment(P, w, dP):
    """sum P*w*dP on a symmetric grid, folded so symmetric w gives exactly 0."""
    n = len(P)
    half = n // 2
    pos = P[n - half :]
    wp = w[n - half :]
    wn = w[:half][::-1]
    return float(np.sum(pos * (wp - wn)) * dP)


def _pointer_once(prof, mask, E, g0, sigma, ch, units, n):
    hb = units.hbar
    half_width = GRID_STDDEVS * hb / (2.0 * sigma)
    step = 2.0 * half_width / (n - 1)
    # exactly antisymmetric grid
    P = step * (np.arange(n) - 0.5 * (n - 1))
    phi0 = np.exp(-((sigma * P / hb) ** 2))
    phi0 /= math.sqrt(np.sum(phi0**2) * step)
    dV = mask[:, None].astype(float) * (g0 * P)[None, :]
    t, r = amplitudes(prof, E, units, dV)
    a = t if ch == "T" else r
    w = np.abs(a * phi0) ** 2
    norm = float(np.sum(w) * step)
    if norm < MIN_NORM:
        raise ClockError("post-selected pointer norm vanishes")
    # d(arg a)/dP from neighbour ratios, no unwrapping needed
    slope = np.empty(n)
    slope[1:-1] = np.angle(a[2:] / a[:-2]) / (2 * step)
    slope[0] = np.angle(a[1] / a[0]) / step
    slope[-1] = np.angle(a[-1] / a[-2]) / step
    dQ = -hb * float(np.sum(w * slope) * step) / norm
    dP = _odd_moment(P, w, step) / norm
    return dQ, dP, norm


def pointer_measurement(
    profile: PotentialProfile,
    region: Region,
    E: float,
    g0: float,
    sigma: float,
    channel: str = "T",
    units: UnitSystem = UnitSystem(),
    n_points: int = GRID_POINTS,
    check: bool = True,
) -> PointerOutcome:
    """Von Neumann pointer with initial position profile exp(-Q^2 / 4 sigma^2).

    dQ and dP are the first moments of the normalized post-selected pointer
    state.  With ``check`` the computation is repeated on a doubled grid and
    must agree to 1e-8 relative.
    """
    if not (g0 >= 0 and sigma > 0):
        raise ValueError("need g0 >= 0 and sigma > 0")
    if n_points < GRID_POINTS:
        raise ValueError(f"pointer grid needs at least {GRID_POINTS} points")
    ch = _channel(channel)
    if ch == "dwell":
        raise ValueError("post-selection needs channel T or R")
    prof, mask = profile.aligned(region.x1, region.x2)
    dQ, dP, norm = _pointer_once(prof, mask, E, g0, sigma, ch, units, n_points)
    if check:
        dQ2, _, _ = _pointer_once(prof, mask, E, g0, sigma, ch, units, 2 * n_points)
        if abs(dQ2 - dQ) > GRID_TOL * max(abs(dQ), MIN_NORM):
            raise ClockError(f"pointer grid not converged: dQ {dQ!r} vs {dQ2!r} on doubled grid")
    return PointerOutcome(sigma, g0, dQ, dP, norm, ch, n_points)
