import math

import numpy as np
import pytest

from barrierclock.clock import (
    ClockError,
    SpinState,
    coherent_spin_state,
    far_side_field_effect,
    larmor_spin_S,
    larmor_spin_half,
    pointer_measurement,
    squeezed_spin_state,
)
from barrierclock.scattering import PotentialProfile, solve_stationary
from barrierclock.weaktimes import Region, weak_value_time

BARRIER = PotentialProfile.rectangular(1.0, 10.0)
REGION = Region(-5.0, 5.0)
E = 0.5


@pytest.fixture(scope="module")
def tau_T():
    return weak_value_time(solve_stationary(BARRIER, E), REGION, "T").value


def test_spin_half_weak_limit(tau_T):
    res = larmor_spin_half(BARRIER, REGION, E, 1e-4)
    assert abs(res.tau_y - tau_T.real) < 1e-6 * abs(tau_T)
    assert abs(res.tau_z + tau_T.imag) < 1e-6 * abs(tau_T)


def test_spin_half_reflection_channel():
    sol = solve_stationary(BARRIER, E)
    tau_R = weak_value_time(sol, REGION, "R").value
    res = larmor_spin_half(BARRIER, REGION, E, 1e-4, "R")
    assert abs(res.tau_y - tau_R.real) < 1e-6 and abs(res.tau_z + tau_R.imag) < 1e-6


def test_zero_field_is_exactly_zero(steps):
    sol = solve_stationary(steps, 0.7)
    res = larmor_spin_half(steps, Region(-1, 2), 0.7, 0.0)
    assert res.in_plane_angle == 0 and res.out_of_plane == 0 and res.tau_y == 0 and res.tau_z == 0
    assert res.norm == pytest.approx(sol.transmission, rel=1e-15)
    res = larmor_spin_S(steps, Region(-1, 2), 0.7, 0.0, coherent_spin_state(3), "R")
    assert res.in_plane_angle == 0 and res.out_of_plane == 0
    assert res.norm == pytest.approx(sol.reflection, rel=1e-14)


@pytest.mark.parametrize("S", [1, 5, 20])
def test_coherent_spin_S_matches_spin_half(S, tau_T):
    half = larmor_spin_half(BARRIER, REGION, E, 1e-4)
    res = larmor_spin_S(BARRIER, REGION, E, 1e-4, coherent_spin_state(S))
    assert abs(res.tau_y - half.tau_y) < 1e-5 * abs(tau_T)
    assert abs(res.tau_z - half.tau_z) < 1e-5 * abs(tau_T)


def test_coherent_state_width():
    for S in (0.5, 2, 7.5, 20):
        st = coherent_spin_state(S)
        assert st.sz_mean == pytest.approx(0, abs=1e-14)
        assert st.sz_width == pytest.approx(math.sqrt(S / 2), rel=1e-12)


@pytest.mark.parametrize("width", [3.0, 1.0, 0.5, 0.3])
def test_squeezed_state_width(width):
    st = squeezed_spin_state(20, width)
    assert st.sz_width == pytest.approx(width, rel=1e-10)
    assert np.allclose(st.amplitudes, st.amplitudes[::-1])


def test_squeezed_state_limits():
    with pytest.raises(ValueError):
        squeezed_spin_state(5, 2.0)
    with pytest.raises(ValueError):
        squeezed_spin_state(2.5, 0.4)
    with pytest.raises(ValueError):
        SpinState(1.0, [1, 0])


def test_squeezing_suppresses_back_action(tau_T):
    widths = [math.sqrt(10), 2.0, 1.0, 0.5]
    res = [larmor_spin_S(BARRIER, REGION, E, 1e-4, squeezed_spin_state(20, w)) for w in widths]
    tz = [abs(r.tau_z) for r in res]
    assert all(a > b for a, b in zip(tz, tz[1:]))
    for w, r in zip(widths, res):
        assert r.tau_z == pytest.approx(-tau_T.imag * w * w / 10, rel=1e-3)
        assert r.tau_y == pytest.approx(tau_T.real, rel=1e-4)


def test_far_side_field():
    sol = solve_stationary(PotentialProfile.rectangular(1.0, 5.0), 0.5)
    # one density period (pi / k) beyond the barrier, a quarter period long
    period = math.pi / sol.k
    probe = Region(2.5 + period, 2.5 + 1.25 * period)
    res = far_side_field_effect(sol.profile, Region(-2.5, 2.5), probe, 0.5, 1e-5)
    ref = weak_value_time(sol, probe, "R").value
    assert res.tau_y != 0
    assert abs(res.tau_y - ref.real) < 1e-3 * abs(ref)
    with pytest.raises(ValueError):
        far_side_field_effect(sol.profile, Region(-2.5, 2.5), Region(0, 3), 0.5, 1e-5)


def test_far_side_half_period_probe_reads_baseline_only():
    # R-density right of the barrier is t^2 e^{2ikx} / r with no constant part,
    # so a whole number of half-wavelengths integrates to zero
    sol = solve_stationary(PotentialProfile.rectangular(1.0, 5.0), 0.5)
    probe = Region(2.5, 2.5 + 3 * math.pi / sol.k)
    assert abs(weak_value_time(sol, probe, "R").value) < 1e-15
    res = far_side_field_effect(sol.profile, Region(-2.5, 2.5), probe, 0.5, 1e-6)
    assert abs(res.tau_y) < 1e-9


def test_pointer_weak_limit(tau_T):
    out = pointer_measurement(BARRIER, REGION, E, 1e-5, 1.0)
    assert out.dQ / 1e-5 == pytest.approx(tau_T.real, rel=1e-4)
    assert out.dP * 2 / 1e-5 == pytest.approx(tau_T.imag, rel=1e-3)


def test_pointer_sigma_dependence(tau_T):
    outs = [pointer_measurement(BARRIER, REGION, E, 1e-5, s) for s in (1.0, 3.0, 10.0)]
    dq = [o.dQ for o in outs]
    assert max(dq) - min(dq) < 1e-4 * abs(dq[0])
    dp = [abs(o.dP) for o in outs]
    assert dp[0] > dp[1] > dp[2]


def test_pointer_zero_coupling_is_exact(steps):
    sol = solve_stationary(steps, 0.7)
    out = pointer_measurement(steps, Region(-1, 2), 0.7, 0.0, 2.0)
    assert out.dQ == 0 and out.dP == 0
    assert out.norm == pytest.approx(sol.transmission, rel=1e-12)


def test_pointer_rejects_bad_input():
    with pytest.raises(ValueError):
        pointer_measurement(BARRIER, REGION, E, 1e-5, 0.0)
    with pytest.raises(ValueError):
        pointer_measurement(BARRIER, REGION, E, 1e-5, 1.0, n_points=100)
    with pytest.raises(ValueError):
        pointer_measurement(BARRIER, REGION, E, 1e-5, 1.0, channel="dwell")


def test_pointer_grid_check_raises_when_unresolved():
    # huge coupling over a wide pointer spread: arg t winds too fast for the grid
    with pytest.raises(ClockError):
        pointer_measurement(BARRIER, REGION, E, 5.0, 0.01)
