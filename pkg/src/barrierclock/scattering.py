"""Stationary scattering off piecewise-constant 1D potentials.

Conventions: the potential vanishes outside its support, amplitudes refer to
plane waves exp(+-ikx) with the absolute coordinate x (no per-edge phase
shifts), so for the barrier centred on the origin ``t`` and ``r`` are the
textbook amplitudes.

The left-incident state psi_i is built by propagating (psi, psi') from the
right edge, where it is purely outgoing, towards the left.  The dominant
solution grows in that direction, so rounding errors stay relative to it and
opaque segments do not lose precision.  The right-incident state is the
mirror image of the left-incident state of the mirrored profile.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._special import ch, cs_primitives, exp_integral, sh_minus_s_over_q2, shc

__all__ = [
    "UnitSystem",
    "Segment",
    "PotentialProfile",
    "ScatteringSolution",
    "RectangularCoefficients",
    "PhaseRelation",
    "CHANNELS",
    "solve_stationary",
    "amplitudes",
    "rectangular_coefficients",
    "wavefunction_at",
    "phase_relation_check",
]

CHANNELS = ("incident", "transmitted", "reflected")

# evanescent segments with q*w above this use the exponential basis
_EXP_BASIS_MIN_QW = 1.0
# keep cosh/sinh of a propagation step finite
_MAX_STEP_QW = 300.0
_RESCALE_ABOVE = 1e100
# rectangular closed forms switch to the (cosh, sinh/q) basis below this |kappa d|
THRESHOLD_KAPPA_D = 1e-4


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise ValueError("hbar and mass must be strictly positive")

    def wavenumber(self, E: float) -> float:
        return math.sqrt(2.0 * self.mass * E) / self.hbar

    def q2(self, V, E: float):
        """Local (V - E) * 2m / hbar**2; positive inside classically forbidden regions."""
        return 2.0 * self.mass * (np.asarray(V, dtype=float) - E) / self.hbar**2

    def flux_time(self, k: float) -> float:
        """m / (hbar k): inverse of the incident flux for a unit plane wave."""
        return self.mass / (self.hbar * k)


@dataclass(frozen=True)
class Segment:
    x_left: float
    x_right: float
    V: float

    @property
    def width(self) -> float:
        return self.x_right - self.x_left


class PotentialProfile:
    """Ordered, gap-free list of constant-potential segments.

    Gaps between the given segments are filled with explicit V = 0 segments;
    overlapping or zero-width segments are rejected.  An empty profile is the
    free particle.
    """

    def __init__(self, segments: Iterable[Segment | Sequence[float]] = ()):
        segs = []
        for s in segments:
            if not isinstance(s, Segment):
                s = Segment(*map(float, s))
            if not all(map(math.isfinite, (s.x_left, s.x_right, s.V))):
                raise ValueError(f"non-finite segment {s}")
            if not s.x_right > s.x_left:
                raise ValueError(f"degenerate segment {s}: x_left must be < x_right")
            segs.append(s)
        segs.sort(key=lambda s: s.x_left)
        filled: list[Segment] = []
        for s in segs:
            if filled:
                prev = filled[-1].x_right
                if s.x_left < prev:
                    raise ValueError(f"overlapping segments at x = {s.x_left}")
                if s.x_left > prev:
                    filled.append(Segment(prev, s.x_left, 0.0))
            filled.append(s)
        self.segments: tuple[Segment, ...] = tuple(filled)

    @classmethod
    def rectangular(cls, V0: float, d: float) -> "PotentialProfile":
        """Barrier of height V0 on [-d/2, d/2]."""
        if d <= 0:
            raise ValueError("barrier width must be positive")
        return cls([Segment(-d / 2, d / 2, V0)])

    @classmethod
    def from_json(cls, data) -> "PotentialProfile":
        """Accepts a list of {"x_left", "x_right", "V"} or {"V0", "d"}."""
        if isinstance(data, dict):
            if set(data) >= {"V0", "d"}:
                return cls.rectangular(float(data["V0"]), float(data["d"]))
            if "segments" in data:
                data = data["segments"]
            else:
                raise ValueError("profile object needs V0 and d, or segments")
        try:
            return cls(Segment(float(s["x_left"]), float(s["x_right"]), float(s["V"])) for s in data)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed profile segment: {exc}") from None

    @classmethod
    def load(cls, path) -> "PotentialProfile":
        return cls.from_json(json.loads(Path(path).read_text()))

    def to_json(self) -> list[dict]:
        return [{"x_left": s.x_left, "x_right": s.x_right, "V": s.V} for s in self.segments]

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __eq__(self, other):
        return isinstance(other, PotentialProfile) and self.segments == other.segments

    def __hash__(self):
        return hash(self.segments)

    def __repr__(self):
        return f"PotentialProfile({list(self.segments)!r})"

    @property
    def edges(self) -> np.ndarray:
        if not self.segments:
            return np.zeros(1)
        return np.array([self.segments[0].x_left] + [s.x_right for s in self.segments])

    @property
    def potentials(self) -> np.ndarray:
        return np.array([s.V for s in self.segments], dtype=float)

    @property
    def support(self) -> tuple[float, float]:
        e = self.edges
        return float(e[0]), float(e[-1])

    @property
    def width(self) -> float:
        lo, hi = self.support
        return hi - lo

    def mirrored(self) -> "PotentialProfile":
        return PotentialProfile(Segment(-s.x_right, -s.x_left, s.V) for s in self.segments)

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        a, b = self.edges, self.mirrored().edges
        if a.shape != b.shape:
            return False
        scale = max(1.0, float(np.max(np.abs(a))))
        return bool(
            np.allclose(a, b, rtol=0, atol=tol * scale)
            and np.allclose(self.potentials, self.mirrored().potentials, rtol=0, atol=tol)
        )

    def refined(self, points: Iterable[float]) -> "PotentialProfile":
        """Same potential with extra breakpoints; points outside the support
        extend it with V = 0 segments."""
        pts = sorted(set(float(p) for p in points))
        segs = list(self.segments)
        if not segs:
            if len(pts) < 2:
                return PotentialProfile()
            return PotentialProfile(Segment(a, b, 0.0) for a, b in zip(pts[:-1], pts[1:]))
        lo, hi = self.support
        left = [p for p in pts if p < lo]
        right = [p for p in pts if p > hi]
        if left:
            bounds = left + [lo]
            segs = [Segment(a, b, 0.0) for a, b in zip(bounds[:-1], bounds[1:])] + segs
        if right:
            bounds = [hi] + right
            segs = segs + [Segment(a, b, 0.0) for a, b in zip(bounds[:-1], bounds[1:])]
        out = []
        for s in segs:
            cuts = [p for p in pts if s.x_left < p < s.x_right]
            bounds = [s.x_left] + cuts + [s.x_right]
            out.extend(Segment(a, b, s.V) for a, b in zip(bounds[:-1], bounds[1:]))
        return PotentialProfile(out)

    def region_mask(self, x1: float, x2: float) -> np.ndarray:
        """Segments lying inside [x1, x2]; raises unless the region is a
        union of whole segments."""
        e = self.edges
        tol = 1e-12 * max(1.0, float(np.max(np.abs(e))))
        if not (np.any(np.abs(e - x1) <= tol) and np.any(np.abs(e - x2) <= tol)):
            raise ValueError(f"region [{x1}, {x2}] is not aligned with segment edges")
        mids = 0.5 * (e[:-1] + e[1:])
        return (mids > x1) & (mids < x2)

    def aligned(self, x1: float, x2: float) -> tuple["PotentialProfile", np.ndarray]:
        """Refine at the region edges and return the profile with the region mask."""
        prof = self.refined([x1, x2])
        return prof, prof.region_mask(x1, x2)

    def shifted(self, x1: float, x2: float, dV: float) -> "PotentialProfile":
        """Raise the potential by dV on [x1, x2]."""
        prof, mask = self.aligned(x1, x2)
        return PotentialProfile(
            Segment(s.x_left, s.x_right, s.V + dV if m else s.V) for s, m in zip(prof.segments, mask)
        )


# ---------------------------------------------------------------------------
# local wavefunction pieces


@dataclass(frozen=True)
class _ExpPiece:
    """psi(x) = sum_j coefs[j] * exp(rates[j] * (x - anchor)) on [lo, hi]."""

    lo: float
    hi: float
    rates: tuple[complex, complex]
    coefs: tuple[complex, complex]
    anchor: float

    def __call__(self, x):
        return sum(c * np.exp(r * (x - self.anchor)) for r, c in zip(self.rates, self.coefs))

    def conj(self) -> "_ExpPiece":
        return _ExpPiece(
            self.lo,
            self.hi,
            tuple(np.conj(r) for r in self.rates),
            tuple(np.conj(c) for c in self.coefs),
            self.anchor,
        )

    def scaled(self, f: complex) -> "_ExpPiece":
        return _ExpPiece(self.lo, self.hi, self.rates, tuple(f * c for c in self.coefs), self.anchor)

    def mirrored(self) -> "_ExpPiece":
        return _ExpPiece(-self.hi, -self.lo, tuple(-r for r in self.rates), self.coefs, -self.anchor)

    def product_integral(self, other: "_ExpPiece", lo: float, hi: float) -> complex:
        total = 0j
        for r1, c1 in zip(self.rates, self.coefs):
            for r2, c2 in zip(other.rates, other.coefs):
                if c1 == 0 or c2 == 0:
                    continue
                rs = r1 + r2
                if rs == 0:
                    total += c1 * c2 * np.exp(-r1 * self.anchor - r2 * other.anchor) * (hi - lo)
                else:
                    x0 = (r1 * self.anchor + r2 * other.anchor) / rs
                    total += c1 * c2 * exp_integral(rs, lo, hi, x0)
        return complex(total)


@dataclass(frozen=True)
class _CSPiece:
    """psi(x) = value * C(x - anchor) + slope * S(x - anchor) on [lo, hi]."""

    lo: float
    hi: float
    q2: float
    value: complex
    slope: complex
    anchor: float

    def __call__(self, x):
        s = x - self.anchor
        return self.value * ch(self.q2, s) + self.slope * shc(self.q2, s)

    def derivative(self, x):
        s = x - self.anchor
        return self.value * self.q2 * shc(self.q2, s) + self.slope * ch(self.q2, s)

    def conj(self) -> "_CSPiece":
        return _CSPiece(self.lo, self.hi, self.q2, np.conj(self.value), np.conj(self.slope), self.anchor)

    def scaled(self, f: complex) -> "_CSPiece":
        return _CSPiece(self.lo, self.hi, self.q2, f * self.value, f * self.slope, self.anchor)

    def mirrored(self) -> "_CSPiece":
        # C is even and S is odd
        return _CSPiece(-self.hi, -self.lo, self.q2, self.value, -self.slope, -self.anchor)

    def reanchored(self, anchor: float) -> "_CSPiece":
        if anchor == self.anchor:
            return self
        return _CSPiece(self.lo, self.hi, self.q2, complex(self(anchor)), complex(self.derivative(anchor)), anchor)

    def product_integral(self, other: "_CSPiece", lo: float, hi: float) -> complex:
        other = other.reanchored(self.anchor)
        a, b = lo - self.anchor, hi - self.anchor
        fa, fb = cs_primitives(self.q2, a), cs_primitives(self.q2, b)
        i_cc, i_cs, i_ss = (y - x for x, y in zip(fa, fb))
        return complex(
            self.value * other.value * i_cc
            + (self.value * other.slope + self.slope * other.value) * i_cs
            + self.slope * other.slope * i_ss
        )


def _plane_wave(lo, hi, k, right_going, left_going) -> _ExpPiece:
    return _ExpPiece(lo, hi, (1j * k, -1j * k), (complex(right_going), complex(left_going)), 0.0)


# ---------------------------------------------------------------------------
# propagation


def _propagate_leftward(k: float, edges: np.ndarray, q2: np.ndarray):
    """Carry an outgoing wave exp(ikx) at the right edge leftwards.

    q2 has shape (nseg, batch).  Returns psi, psi' at the left edge, the
    accumulated log rescaling, and per segment the (psi, psi', log scale)
    found at its right edge.
    """
    nseg, batch = q2.shape
    psi = np.full(batch, np.exp(1j * k * edges[-1]), dtype=complex)
    dpsi = 1j * k * psi
    log_scale = np.zeros(batch)
    at_right = [None] * nseg
    for j in range(nseg - 1, -1, -1):
        at_right[j] = (psi, dpsi, log_scale.copy())
        w = edges[j + 1] - edges[j]
        qj = q2[j]
        nsteps = max(1, int(math.ceil(float(np.max(np.sqrt(np.abs(qj)))) * w / _MAX_STEP_QW)))
        h = w / nsteps
        c, s = ch(qj, h), shc(qj, h)
        for _ in range(nsteps):
            psi, dpsi = c * psi - s * dpsi, -qj * s * psi + c * dpsi
            big = np.maximum(np.abs(psi), np.abs(dpsi) / k)
            over = big > _RESCALE_ABOVE
            if np.any(over):
                f = np.where(over, big, 1.0)
                psi, dpsi = psi / f, dpsi / f
                log_scale = log_scale + np.log(f)
    return psi, dpsi, log_scale, at_right


def _decompose_left(k, x, psi, dpsi):
    """Amplitudes of exp(ikx) and exp(-ikx) matching (psi, psi') at x."""
    inc = 0.5 * (psi + dpsi / (1j * k)) * np.exp(-1j * k * x)
    back = 0.5 * (psi - dpsi / (1j * k)) * np.exp(1j * k * x)
    return inc, back


def amplitudes(profile: PotentialProfile, E: float, units: UnitSystem = UnitSystem(), dV=None):
    """Left-incidence (t, r), vectorized over potential perturbations.

    ``dV`` may be None or an array of shape (nseg, batch) added to the
    segment potentials; the result then has shape (batch,).
    """
    if E <= 0:
        raise ValueError("energy must be positive")
    k = units.wavenumber(E)
    V = profile.potentials[:, None]
    if dV is not None:
        V = V + np.asarray(dV, dtype=float)
    if profile.segments:
        q2 = units.q2(V, E)
    else:
        q2 = np.zeros((0, 1 if dV is None else np.shape(dV)[1]))
    edges = profile.edges
    psi, dpsi, log_scale, _ = _propagate_leftward(k, edges, q2)
    inc, back = _decompose_left(k, edges[0], psi, dpsi)
    with np.errstate(under="ignore"):
        t = np.exp(-log_scale) / inc
    r = back / inc
    if dV is None:
        return complex(t[0]), complex(r[0])
    return t, r


def _left_incident_pieces(profile: PotentialProfile, k: float, q2: np.ndarray):
    edges = profile.edges
    psi, dpsi, log_total, at_right = _propagate_leftward(k, edges, q2[:, None])
    inc, back = _decompose_left(k, edges[0], psi, dpsi)
    inc, back, log_total = complex(inc[0]), complex(back[0]), float(log_total[0])
    with np.errstate(under="ignore"):
        t = math.exp(-log_total) / inc
    r = back / inc
    pieces = []
    for j, seg in enumerate(profile.segments):
        p_b, dp_b, ls = at_right[j]
        with np.errstate(under="ignore"):
            norm = math.exp(float(ls[0]) - log_total) / inc
        p_b, dp_b = complex(p_b[0]) * norm, complex(dp_b[0]) * norm
        qj = float(q2[j])
        w = seg.width
        if qj > 0 and math.sqrt(qj) * w > _EXP_BASIS_MIN_QW:
            q = math.sqrt(qj)
            pieces.append(
                _ExpPiece(seg.x_left, seg.x_right, (q, -q), (0.5 * (p_b + dp_b / q), 0.5 * (p_b - dp_b / q)), seg.x_right)
            )
        else:
            piece = _CSPiece(seg.x_left, seg.x_right, qj, p_b, dp_b, seg.x_right)
            pieces.append(piece.reanchored(seg.x_left))
    lo, hi = profile.support
    left = _plane_wave(-np.inf, lo, k, 1.0, r)
    right = _plane_wave(hi, np.inf, k, t, 0.0)
    return t, r, left, pieces, right


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScatteringSolution:
    """Both left- and right-incident stationary states at one energy.

    ``t, r`` describe incidence from the left, ``t_rev, r_rev`` incidence
    from the right.  ``coef_plus[j], coef_minus[j]`` are the amplitudes of
    exp(+q s) and exp(-q s), s = x - x_left, of the left-incident state in
    segment j (q = i k_local when E > V; the pair (psi, psi') at x_left when
    E == V exactly).
    """

    profile: PotentialProfile
    E: float
    units: UnitSystem
    k: float
    t: complex
    r: complex
    t_rev: complex
    r_rev: complex
    _incident: tuple = field(repr=False)
    _reverse: tuple = field(repr=False)

    @property
    def transmission(self) -> float:
        return abs(self.t) ** 2

    @property
    def reflection(self) -> float:
        return abs(self.r) ** 2

    @property
    def coefficients(self) -> list[tuple[complex, complex]]:
        out = []
        for seg, piece in zip(self.profile.segments, self._incident[1]):
            qj = float(self.units.q2(seg.V, self.E))
            a = seg.x_left
            v, dv = complex(piece(a)), complex(_derivative(piece, a))
            if qj == 0:
                out.append((v, dv))
                continue
            q = np.sqrt(complex(qj))
            out.append((0.5 * (v + dv / q), 0.5 * (v - dv / q)))
        return out

    @property
    def coef_plus(self) -> list[complex]:
        return [c[0] for c in self.coefficients]

    @property
    def coef_minus(self) -> list[complex]:
        return [c[1] for c in self.coefficients]

    def pieces(self, channel: str) -> list:
        """Local pieces of psi_i, or of psi_f* for channel 'transmitted' / 'reflected'.

        Ordered left asymptote, segments, right asymptote.
        """
        if channel == "incident":
            left, segs, right = self._incident
        elif channel == "transmitted":
            left, segs, right = self._reverse
        elif channel == "reflected":
            left, segs, right = self._incident
        else:
            raise ValueError(f"unknown channel {channel!r}; expected one of {CHANNELS}")
        return [left, *segs, right]

    def psi(self, channel: str, x):
        """Evaluate psi_channel at x (scalar or array)."""
        if channel not in CHANNELS:
            raise ValueError(f"unknown channel {channel!r}; expected one of {CHANNELS}")
        x = np.asarray(x, dtype=float)
        base = "transmitted" if channel == "transmitted" else "incident"
        pieces = self.pieces(base)
        bounds = self.profile.edges
        idx = np.searchsorted(bounds, x, side="right")
        out = np.empty(x.shape, dtype=complex)
        for i, piece in enumerate(pieces):
            sel = idx == i
            if np.any(sel):
                out[sel] = piece(x[sel])
        if channel != "incident":
            out = np.conj(out)
        return complex(out) if out.ndim == 0 else out

    def overlap(self, channel: str, x1: float, x2: float) -> complex:
        """Integral over [x1, x2] of psi_f*(x) psi_i(x) for the given final channel."""
        if x2 < x1:
            raise ValueError("region must satisfy x1 <= x2")
        inc = self.pieces("incident")
        if channel == "transmitted":
            fin = self.pieces("transmitted")
        elif channel == "reflected":
            fin = inc
        elif channel == "incident":
            fin = [p.conj() for p in inc]
        else:
            raise ValueError(f"unknown channel {channel!r}")
        total = 0j
        for pi, pf in zip(inc, fin):
            lo, hi = max(x1, pi.lo), min(x2, pi.hi)
            if hi > lo:
                total += pf.product_integral(pi, lo, hi)
        return total


def _derivative(piece, x):
    if isinstance(piece, _CSPiece):
        return piece.derivative(x)
    return sum(r * c * np.exp(r * (x - piece.anchor)) for r, c in zip(piece.rates, piece.coefs))


def solve_stationary(profile: PotentialProfile, E: float, units: UnitSystem = UnitSystem()) -> ScatteringSolution:
    if not E > 0:
        raise ValueError("energy must be positive")
    k = units.wavenumber(E)
    q2 = units.q2(profile.potentials, E) if profile.segments else np.zeros(0)
    t, r, left, segs, right = _left_incident_pieces(profile, k, q2)

    mirror = profile.mirrored()
    q2m = q2[::-1].copy()
    t_rev, r_rev, mleft, msegs, mright = _left_incident_pieces(mirror, k, q2m)
    # right-incident state phi(x) = chi(-x); psi_t* = phi for unit incidence
    rev = (mright.mirrored(), tuple(p.mirrored() for p in reversed(msegs)), mleft.mirrored())
    rev_segs = tuple(
        p.reanchored(seg.x_left) if isinstance(p, _CSPiece) else p for p, seg in zip(rev[1], profile.segments)
    )
    return ScatteringSolution(
        profile=profile,
        E=float(E),
        units=units,
        k=k,
        t=t,
        r=r,
        t_rev=t_rev,
        r_rev=r_rev,
        _incident=(left, tuple(segs), right),
        _reverse=(rev[0], rev_segs, rev[2]),
    )


def wavefunction_at(solution: ScatteringSolution, channel: str, x):
    """psi_i, psi_t or psi_r at x.  psi_r = conj(psi_i) and psi_t is the
    complex conjugate of the unit right-incident state."""
    return solution.psi(channel, x)


# ---------------------------------------------------------------------------
# rectangular barrier in closed form


@dataclass(frozen=True)
class RectangularCoefficients:
    """Closed-form amplitudes for V0 on [-d/2, d/2].

    Inside, psi = B exp(-kappa x) + C exp(kappa x) = P cosh(kappa x) + Q sinh(kappa x)/kappa.
    B and C are None exactly at threshold (kappa = 0) where that basis degenerates.
    """

    B: complex | None
    C: complex | None
    t: complex
    r: complex
    kappa: complex
    P: complex
    Q: complex
    regularized: bool


def rectangular_coefficients(V0: float, d: float, E: float, units: UnitSystem = UnitSystem()) -> RectangularCoefficients:
    if V0 < 0 or d <= 0 or E <= 0:
        raise ValueError("need V0 >= 0, d > 0, E > 0")
    k = units.wavenumber(E)
    kq2 = float(units.q2(V0, E))
    kappa = complex(np.sqrt(complex(kq2)))
    c_d, s_d = float(ch(kq2, d)), float(shc(kq2, d))
    t = np.exp(-1j * k * d) / (c_d + 1j * (kq2 - k * k) * s_d / (2 * k))
    r = -1j * t * (kq2 + k * k) * s_d / (2 * k)
    ph = t * np.exp(0.5j * k * d)
    c_h, s_h = float(ch(kq2, d / 2)), float(shc(kq2, d / 2))
    P = ph * (c_h - 1j * k * s_h)
    Q = ph * (-kq2 * s_h + 1j * k * c_h)
    if kappa == 0:
        B = C = None
    else:
        B = complex(ph * np.exp(kappa * d / 2) * (kappa - 1j * k) / (2 * kappa))
        C = complex(ph * np.exp(-kappa * d / 2) * (kappa + 1j * k) / (2 * kappa))
    return RectangularCoefficients(
        B=B,
        C=C,
        t=complex(t),
        r=complex(r),
        kappa=kappa,
        P=complex(P),
        Q=complex(Q),
        regularized=abs(kappa * d) < THRESHOLD_KAPPA_D,
    )


def rectangular_overlaps(V0: float, d: float, E: float, units: UnitSystem = UnitSystem()):
    """Barrier integrals of phi*psi_i, psi_i**2 and |psi_i|**2 (before the
    1/t, 1/r and m/hbar k factors), plus the coefficients used.

    Deep tunnelling uses the B, C form directly; near threshold and above
    the barrier the equivalent P, Q form avoids the kappa -> 0 singularity.
    """
    co = rectangular_coefficients(V0, d, E, units)
    kq2 = float(units.q2(V0, E))
    kappa_d = math.sqrt(abs(kq2)) * d
    if kq2 > 0 and kappa_d > 1.0:
        B, C, kap = co.B, co.C, co.kappa.real
        sh = math.sinh(kap * d) / kap
        i_t = (B * B + C * C) * d + 2 * B * C * sh
        i_r = 2 * B * C * d + (B * B + C * C) * sh
        i_d = 2 * (np.conj(B) * C).real * d + (abs(B) ** 2 + abs(C) ** 2) * sh
    else:
        P, Q = co.P, co.Q
        X = 0.5 * (d + float(shc(kq2, d)))
        Y = -0.5 * sh_minus_s_over_q2(kq2, d)
        i_t = P * P * X + Q * Q * Y
        i_r = P * P * X - Q * Q * Y
        i_d = abs(P) ** 2 * X - abs(Q) ** 2 * Y
    return complex(i_t), complex(i_r), float(np.real(i_d)), co


@dataclass(frozen=True)
class PhaseRelation:
    phase_difference: float | None
    symmetric: bool
    reason: str | None = None


def phase_relation_check(solution: ScatteringSolution, tol: float = 1e-8) -> PhaseRelation:
    """arg r - arg t, wrapped to (-pi, pi]; ``symmetric`` is set when it equals +-pi/2."""
    if abs(solution.r) < 1e-10:
        return PhaseRelation(None, False, "zero_reflection_amplitude")
    if solution.t == 0:
        return PhaseRelation(None, False, "zero_transmission_amplitude")
    delta = float(np.angle(solution.r / solution.t))
    return PhaseRelation(delta, abs(abs(delta) - math.pi / 2) < tol)
