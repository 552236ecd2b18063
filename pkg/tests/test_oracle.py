import json
import math

import numpy as np
import pytest

from barrierclock.oracle import (
    OracleError,
    OracleReport,
    integrate_schrodinger,
    quadrature_weak_value,
    richardson_derivative,
)
from barrierclock.scattering import PotentialProfile, rectangular_coefficients, solve_stationary
from barrierclock.weaktimes import Region, conditional_times_rectangular, weak_value_time


def test_free_particle():
    t, r = integrate_schrodinger(PotentialProfile([(0, 2, 0.0)]), 0.8)
    assert abs(t - 1) < 1e-8 and abs(r) < 1e-8


def test_rectangular_matches_transfer_matrix():
    t, r = integrate_schrodinger(PotentialProfile.rectangular(1, 1), 0.5)
    sol = solve_stationary(PotentialProfile.rectangular(1, 1), 0.5)
    assert abs(t - sol.t) < 1e-6 and abs(r - sol.r) < 1e-6


def test_stiff_opaque_barrier():
    t, _ = integrate_schrodinger(PotentialProfile.rectangular(1, 15), 0.5)
    ref = rectangular_coefficients(1, 15, 0.5).t
    assert abs(abs(t) - abs(ref)) < 1e-5 * abs(ref)


def test_resolution_and_budget_checks():
    with pytest.raises(OracleError):
        integrate_schrodinger(PotentialProfile.rectangular(1, 1), 0.5, grid_step=0.1)
    with pytest.raises(OracleError):
        integrate_schrodinger(PotentialProfile.rectangular(1, 40), 0.5)


def test_quadrature_matches_closed_form():
    sol = solve_stationary(PotentialProfile.rectangular(1, 2), 0.4)
    closed = conditional_times_rectangular(1, 2, 0.4)
    region = Region(-1, 1)
    assert abs(quadrature_weak_value(sol, region, "T").value - closed.tau_T.value) < 1e-8 * abs(closed.tau_T)
    assert abs(quadrature_weak_value(sol, region, "R").value - closed.tau_R.value) < 1e-8 * abs(closed.tau_R)
    assert abs(quadrature_weak_value(sol, region, "dwell").value - closed.tau_d) < 1e-8 * closed.tau_d


def test_quadrature_zero_region_and_straddling(steps):
    sol = solve_stationary(steps, 0.7)
    assert quadrature_weak_value(sol, Region(0.2, 0.2), "T").value == 0
    whole = quadrature_weak_value(sol, Region(-0.5, 1.5), "T").value
    parts = sum(weak_value_time(sol, Region(a, b), "T").value for a, b in ((-0.5, 0), (0, 0.7), (0.7, 1.5)))
    assert abs(whole - parts) < 1e-8 * abs(parts)


def test_richardson_polynomial():
    est, err = richardson_derivative(lambda x: x * x, 3.0, 1e-3)
    assert abs(est - 6) < 1e-10
    with pytest.raises(OracleError):
        richardson_derivative(lambda x: math.sin(1 / x), 0.01, 1e-3, bound=1e-12)


def test_richardson_on_transmission_phase():
    prof, E, region = PotentialProfile.rectangular(1, 1), 0.5, Region(-0.5, 0.5)
    tau = conditional_times_rectangular(1, 1, E).tau_T.value

    def t_of(dv):
        return solve_stationary(prof.shifted(-0.5, 0.5, dv), E).t

    t0 = t_of(0.0)
    arg, _ = richardson_derivative(lambda v: float(np.angle(t_of(v) / t0)), 0.0, 1e-4)
    lnabs, _ = richardson_derivative(lambda v: math.log(abs(t_of(v))), 0.0, 1e-4)
    assert abs(-arg - tau.real) < 1e-6 * abs(tau.real)
    assert abs(lnabs - tau.imag) < 1e-6 * abs(tau.imag)


def test_report_semantics():
    ok = OracleReport.compare("x", 1.0, 1.0 + 1e-9, 1e-8)
    assert ok.passed and ok.metric == "rel"
    bad = OracleReport.compare("x", 1.0, 1.1, 1e-8)
    assert not bad.passed
    zero = OracleReport.compare("z", 1e-20, 0.0, 1e-12, "abs")
    assert zero.passed and math.isinf(zero.rel_error)
    d = json.loads(zero.to_json())
    assert d["rel_error"] is None and d["quantity"] == "z"
    c = json.loads(OracleReport.compare("c", 1 + 2j, 1 + 2j, 0).to_json())
    assert c["primary"] == [1, 2] and c["passed"] is True
