import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemonav.ase import (
    AseParams, AseState, DepolChannels, HyperChannels, InstabilityError, Side,
    adapt_threshold, alpha_depol, alpha_hyper, channel_conductance, heaviside,
    resting_potential, sgn, step_ase, step_depol, step_hyper, step_membrane,
    threshold_rate,
)

P = AseParams()
unit = st.floats(0.0, 1.0)
rate = st.floats(0.0, 50.0)


@pytest.mark.parametrize("x, want", [(5, 1), (-3, 0), (0, 0), (1e-300, 1)])
def test_heaviside(x, want):
    assert heaviside(x) == want


def test_sgn_zero():
    assert (sgn(-2.0), sgn(0.0), sgn(3.0)) == (-1, 0, 1)


@pytest.mark.parametrize("C, thr, side, want", [
    (50, 40, Side.LEFT, 10),
    (30, 40, Side.LEFT, 0),
    (30, 40, Side.RIGHT, 10),
    (50, 40, Side.RIGHT, 0),
    (40, 40, Side.LEFT, 0),
    (40, 40, Side.RIGHT, 0),
])
def test_alpha_depol(C, thr, side, want):
    assert alpha_depol(C, thr, side, 1.0) == want


@given(st.floats(0, 100), st.floats(0, 100), st.sampled_from(list(Side)), st.floats(0, 10))
def test_alpha_depol_nonnegative(C, thr, side, scale):
    assert alpha_depol(C, thr, side, scale) >= 0


@pytest.mark.parametrize("C, want", [(60, 2), (40, 0), (50, 0)])
def test_alpha_hyper(C, want):
    assert alpha_hyper(C, 50, 2) == want


def test_step_depol_fixed_point():
    for dt in (1e-4, 1e-3, 0.1):
        assert step_depol(DepolChannels(), 0.0, P, dt) == DepolChannels(1.0, 0.0, 0.0)


def test_step_depol_hand_step():
    p = AseParams(beta_d=1, gamma_d=1, delta_d=1)
    s = step_depol(DepolChannels(), 10.0, p, 0.01)
    # du = -10, db = +10, di = 0; times 0.01
    assert s.u == pytest.approx(0.9, abs=1e-15)
    assert s.b == pytest.approx(0.1, abs=1e-15)
    assert s.i == 0.0


def test_step_depol_reports_instability():
    with pytest.raises(InstabilityError):
        step_depol(DepolChannels(), 500.0, P, 0.01)


@st.composite
def depol_state(draw):
    a, b = sorted([draw(unit), draw(unit)])
    return DepolChannels(a, b - a, 1.0 - b)


@given(depol_state(), st.floats(0, 20), st.floats(1e-5, 1e-2))
def test_step_depol_conserves(s, a, dt):
    try:
        out = step_depol(s, a, P, dt)
    except InstabilityError:
        return
    assert abs((out.u + out.b + out.i) - (s.u + s.b + s.i)) <= 1e-12


def test_step_hyper_examples():
    assert step_hyper(HyperChannels(), 0.0, P, 0.01) == HyperChannels(1.0, 0.0)
    s = step_hyper(HyperChannels(), 2.0, AseParams(beta_h=1.0), 0.01)
    assert (s.u, s.b) == pytest.approx((0.98, 0.02), abs=1e-15)


@given(st.floats(0.1, 10), st.floats(0.1, 10))
@settings(max_examples=25, deadline=None)
def test_step_hyper_steady_state(a, beta):
    p = AseParams(beta_h=beta)
    s = HyperChannels()
    dt = 1e-3
    for _ in range(int(20 / (a + beta) / dt)):
        s = step_hyper(s, a, p, dt)
    assert s.b == pytest.approx(a / (a + beta), abs=1e-6)
    assert abs(s.u + s.b - 1) <= 1e-9


@pytest.mark.parametrize("b, km, want", [(0, 5, 0), (1, 5, 5), (0.5, 4, 1)])
def test_channel_conductance(b, km, want):
    assert channel_conductance(b, km) == want


def test_threshold_rate_left():
    p = AseParams(tau_L=10)
    assert threshold_rate(Side.LEFT, 40, 50, p) == pytest.approx(1.0)
    assert threshold_rate(Side.LEFT, 40, 30, p) == pytest.approx(-4.0)


def test_threshold_rate_right_branches():
    p = AseParams(tau_R=10)
    assert threshold_rate(Side.RIGHT, 40, 30, p) == pytest.approx(-1.0)   # (C - C_R)/tau
    assert threshold_rate(Side.RIGHT, 40, 50, p) == pytest.approx(4.0)    # +C_R/tau
    assert threshold_rate(Side.RIGHT, 40, 40, p) == 0.0


def test_threshold_held_at_equality():
    for side in Side:
        s = AseState.adapted(side, 40.0, P)
        assert adapt_threshold(s, 40.0, P, 1e-3) == 40.0


def test_left_threshold_converges():
    p = AseParams(tau_L=10)
    s = AseState(Side.LEFT, 0.0, DepolChannels(), HyperChannels(), 40.0)
    dt = 1e-3
    for _ in range(int(100 / dt)):
        s = AseState(Side.LEFT, 0.0, s.depol, s.hyper, adapt_threshold(s, 50.0, p, dt))
    assert s.threshold == pytest.approx(50.0, abs=0.1)


def test_right_threshold_clamped():
    p = AseParams(C_R_min=1.0, tau_R=1.0)
    s = AseState(Side.RIGHT, 0.0, DepolChannels(), HyperChannels(), 0.5)
    # C below threshold drives C_R down toward C, then the floor applies
    assert adapt_threshold(s, 0.0, p, 0.1) == 1.0


@given(st.floats(0, 80), st.floats(0, 80), st.floats(1e-4, 1e-2))
def test_right_threshold_never_below_floor(C, thr, dt):
    s = AseState(Side.RIGHT, 0.0, DepolChannels(), HyperChannels(), max(thr, P.C_R_min))
    assert adapt_threshold(s, C, P, dt) >= P.C_R_min


def test_step_membrane_examples():
    assert step_membrane(P.V0, 0, 0, P, 1e-3) == P.V0
    p = AseParams(V0=0, Vd=100, tau_m=1)
    assert step_membrane(0.0, 1.0, 0.0, p, 0.1) == pytest.approx(10.0)


@given(st.floats(0, 5), st.floats(0, 5))
@settings(max_examples=30, deadline=None)
def test_membrane_converges_to_fixed_point(kd, kh):
    V = 0.0
    for _ in range(20000):
        V = step_membrane(V, kd, kh, P, 1e-3)
    assert V == pytest.approx(resting_potential(kd, kh, P), abs=1e-6)
    # derivative vanishes at the fixed point
    v = resting_potential(kd, kh, P)
    assert step_membrane(v, kd, kh, P, 1e-3) == pytest.approx(v, abs=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        AseParams(tau_m=0)
    with pytest.raises(ValueError):
        AseParams(V_T=70, V_max=60)
    with pytest.raises(ValueError):
        AseParams(C_R_min=0)
    with pytest.raises(ValueError):
        AseParams(beta_d=-1)


@pytest.mark.parametrize("side", list(Side))
def test_adapted_constant_input_is_silent(side):
    s = AseState.adapted(side, 40.0, P)
    dt = 1e-3
    spikes = 0
    for _ in range(int(100 / dt)):
        s, sp = step_ase(s, 40.0, P, dt)
        spikes += sp
        assert s.V == P.V0
    assert spikes == 0


def test_spike_then_reset():
    s = AseState.adapted(Side.LEFT, 40.0, P)
    out = []
    for _ in range(20000):
        s, sp = step_ase(s, 60.0, P, 1e-3)
        out.append((s.V, sp))
    n = next(k for k, (_, sp) in enumerate(out) if sp)
    assert out[n][0] == P.V_max
    assert out[n + 1][0] == P.V0
    assert not out[n + 1][1]
    # graded variant never reports a spike
    s = AseState.adapted(Side.LEFT, 40.0, P)
    for _ in range(n + 5):
        s, sp = step_ase(s, 60.0, P, 1e-3, spiking=False)
        assert not sp
    assert P.V_T <= s.V < P.V_max


def test_left_ignores_hyper_channels():
    s = AseState.adapted(Side.LEFT, 70.0, P)
    s2, _ = step_ase(s, 80.0, P, 1e-3)
    assert s2.hyper == HyperChannels()


@given(st.lists(st.floats(10, 70), min_size=1, max_size=200),
       st.sampled_from(list(Side)))
@settings(max_examples=40, deadline=None)
def test_conservation_along_random_inputs(Cs, side):
    s = AseState.adapted(side, 40.0, P)
    for C in Cs:
        for _ in range(20):
            s, _ = step_ase(s, C, P, 1e-3)
            assert abs(s.depol.u + s.depol.b + s.depol.i - 1) <= 1e-9
            assert abs(s.hyper.u + s.hyper.b - 1) <= 1e-9
            assert s.threshold >= 0
            if side == Side.RIGHT:
                assert s.threshold >= P.C_R_min


def _peak(side, C1, dt=1e-3, T=40.0, p=P):
    s = AseState.adapted(side, 40.0, p)
    peak = 0.0
    for _ in range(int(T / dt)):
        s, _ = step_ase(s, C1, p, dt, spiking=False)
        peak = max(peak, abs(s.V - p.V0))
    return peak, s


def test_selectivity_and_adaptation():
    up_L, sL = _peak(Side.LEFT, 50.0)
    dn_L, _ = _peak(Side.LEFT, 30.0)
    dn_R, sR = _peak(Side.RIGHT, 30.0)
    up_R, _ = _peak(Side.RIGHT, 50.0)
    assert up_L > 10 * dn_L
    assert dn_R > 10 * up_R
    # transient: back near rest long after the step
    assert abs(sL.V - P.V0) < 0.05 * up_L
    assert abs(sR.V - P.V0) < 0.05 * dn_R


def test_graded_up_steps():
    peaks = [_peak(Side.LEFT, 40.0 + d, T=20.0)[0] for d in (2, 5, 10, 15)]
    assert all(b > a for a, b in zip(peaks, peaks[1:]))


def test_dt_halving_changes_peak_little():
    a = _peak(Side.LEFT, 50.0, dt=1e-3, T=10.0)[0]
    b = _peak(Side.LEFT, 50.0, dt=5e-4, T=10.0)[0]
    assert abs(a - b) / b < 0.01


def test_fresh_instance_independence():
    # pure function: the same input state gives the same output every time
    s = AseState.adapted(Side.RIGHT, 45.0, P)
    a = step_ase(s, 30.0, P, 1e-3)
    b = step_ase(s, 30.0, P, 1e-3)
    assert a == b
    assert math.isfinite(a[0].V)
