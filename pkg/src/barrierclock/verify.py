"""Seeded self-check: module invariants and oracle comparisons over random profiles.

Every check yields an OracleReport; the suite passes iff all of them do.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._parallel import ordered_map
from .oracle import MAX_KAPPA_D, OracleReport, integrate_schrodinger, quadrature_weak_value
from .scattering import PotentialProfile, UnitSystem, solve_stationary
from .weaktimes import Region, channel_times, complex_time_via_derivative

DEFAULT_SEED = 0
DEFAULT_CASES = 100

TOLERANCES = {
    "unitarity": 1e-12,
    "reciprocity": 1e-12,
    "rk4_transmission": 1e-6,
    "weighted_identity": 1e-10,
    "imaginary_balance": 1e-10,
    "quadrature_tau_T": 1e-8,
    "quadrature_tau_d": 1e-8,
    "derivative_tau_T": 1e-6,
    "dwell_nonnegative": 0.0,
    "real_part_T": 1e-10,
    "real_part_R": 1e-10,
}


@dataclass(frozen=True)
class Case:
    index: int
    profile: PotentialProfile
    E: float
    region: Region


def random_cases(seed: int, n: int) -> list[Case]:
    """Random piecewise-constant profiles, energies and regions.  Every fourth
    profile is made mirror-symmetric and paired with its full support."""
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(n):
        nseg = int(rng.integers(1, 5))
        widths = rng.uniform(0.2, 2.0, nseg)
        V = rng.uniform(-0.5, 2.0, nseg)
        E = float(rng.uniform(0.05, 3.0))
        symmetric = i % 4 == 3
        if symmetric:
            widths = np.concatenate([widths, widths[::-1]])
            V = np.concatenate([V, V[::-1]])
        edges = np.concatenate([[0.0], np.cumsum(widths)])
        edges -= 0.5 * edges[-1] if symmetric else rng.uniform(0.0, edges[-1])
        profile = PotentialProfile([(a, b, v) for a, b, v in zip(edges[:-1], edges[1:], V)])
        lo, hi = profile.support
        ends = np.sort(rng.uniform(lo - 2.0, hi + 2.0, 2))
        if symmetric or rng.random() < 0.5:
            region = Region(lo, hi)
        else:
            region = Region(float(ends[0]), float(ends[1]))
        cases.append(Case(i, profile, E, region))
    return cases


def _opacity(profile: PotentialProfile, E: float) -> float:
    return sum(np.sqrt(2.0 * (s.V - E)) * s.width for s in profile.segments if s.V > E)


def check_case(case: Case, units: UnitSystem = UnitSystem()) -> list[OracleReport]:
    tag = f"case{case.index}"
    sol = solve_stationary(case.profile, case.E, units)
    out = [
        OracleReport.compare(f"{tag}:unitarity", sol.transmission + sol.reflection, 1.0, TOLERANCES["unitarity"], "abs"),
        OracleReport.compare(f"{tag}:reciprocity", sol.t_rev, sol.t, TOLERANCES["reciprocity"], "abs"),
    ]
    if _opacity(case.profile, case.E) <= MAX_KAPPA_D:
        t_rk, _ = integrate_schrodinger(case.profile, case.E, units=units)
        out.append(OracleReport.compare(f"{tag}:rk4_transmission", sol.t, t_rk, TOLERANCES["rk4_transmission"]))

    times = channel_times(sol, case.region)
    out.append(
        OracleReport.compare(
            f"{tag}:weighted_identity", times.weighted_residual() + times.tau_d, times.tau_d, TOLERANCES["weighted_identity"]
        )
    )
    balance = 0.0
    if times.tau_T is not None:
        balance += times.w_T * times.tau_T.imag
    if times.tau_R is not None:
        balance += times.w_R * times.tau_R.imag
    out.append(
        OracleReport.compare(
            f"{tag}:imaginary_balance", balance, 0.0, TOLERANCES["imaginary_balance"] * max(times.tau_d, 1.0), "abs"
        )
    )
    out.append(OracleReport.compare(f"{tag}:dwell_nonnegative", min(times.tau_d, 0.0), 0.0, TOLERANCES["dwell_nonnegative"], "abs"))
    quad_d = quadrature_weak_value(sol, case.region, "dwell")
    out.append(OracleReport.compare(f"{tag}:quadrature_tau_d", times.tau_d, quad_d.value, TOLERANCES["quadrature_tau_d"]))
    if times.tau_T is not None:
        quad_t = quadrature_weak_value(sol, case.region, "T")
        out.append(OracleReport.compare(f"{tag}:quadrature_tau_T", times.tau_T.value, quad_t.value, TOLERANCES["quadrature_tau_T"]))
        if case.region.length > 0:
            deriv = complex_time_via_derivative(case.profile, case.region, case.E, units, "T")
            out.append(OracleReport.compare(f"{tag}:derivative_tau_T", deriv.value, times.tau_T.value, TOLERANCES["derivative_tau_T"]))
    if case.profile.is_symmetric() and case.region == Region.of(case.profile):
        for ch, tau in (("T", times.tau_T), ("R", times.tau_R)):
            if tau is not None:
                out.append(OracleReport.compare(f"{tag}:real_part_{ch}", tau.real, times.tau_d, TOLERANCES[f"real_part_{ch}"]))
    return out


def run(seed: int = DEFAULT_SEED, cases: int = DEFAULT_CASES, tolerance: float | None = None) -> list[OracleReport]:
    """All reports for ``cases`` random cases.  A ``tolerance`` overrides every
    per-check tolerance (0 turns any nonzero discrepancy into a failure)."""
    if cases < 1:
        raise ValueError("cases must be >= 1")
    reports = [r for batch in ordered_map(check_case, random_cases(seed, cases)) for r in batch]
    if tolerance is not None:
        if not tolerance >= 0:
            raise ValueError("tolerance must be >= 0")
        reports = [_retolerate(r, tolerance) for r in reports]
    return reports


def _retolerate(report: OracleReport, tol: float) -> OracleReport:
    disc = report.rel_error if report.metric == "rel" else report.abs_error
    return replace(report, tolerance=float(tol), passed=bool(disc <= tol))
