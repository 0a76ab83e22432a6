import numpy as np
import pytest

from affinesym.errors import BlowUp, GeometryError
from affinesym.flow import (
    StructureState,
    Trajectory,
    first_integral_check,
    flow_integrate,
    match_surface,
    trace_symmetry_line,
)


def state(a, eta, mu1, mu2, beta=1.0, f=0.0, lam=0.0):
    return StructureState(t=0.0, a=a, eta=eta, mu1=mu1, mu2=mu2, beta=beta,
                          f=f, lambda_fn=lambda t: lam)


def test_zero_right_hand_side_stays_constant():
    traj = flow_integrate(state(0, 0, 0, 0), (0.0, 1.0), 1e-2)
    assert np.max(np.abs(traj.states - traj.states[0])) == 0.0


def test_step_halving_self_oracle():
    # the (1, 0, 1, 0) / lambda = 1 state escapes in finite time near
    # t = 0.39 (Riccati), so the oracle runs on the surviving window
    init = state(1.0, 0.0, 1.0, 0.0, lam=1.0)
    end1 = flow_integrate(init, (0.0, 0.25), 1e-3).states[-1]
    end2 = flow_integrate(init, (0.0, 0.25), 5e-4).states[-1]
    assert np.max(np.abs(end1 - end2)) < 1e-9
    with pytest.raises(BlowUp):
        flow_integrate(init, (0.0, 0.5), 1e-3)


def test_beta_stationary_when_eta_plus_mu1_zero():
    # (eta + mu1)' = -(eta + mu1)(eta + 3 mu1) - lambda: the eta = -mu1
    # state is invariant exactly when lambda = 0, and then beta' = 0 holds
    # along the whole trajectory
    init = state(0.5, -0.4, 0.4, 0.1, lam=0.0)
    traj = flow_integrate(init, (0.0, 0.2), 1e-3)
    beta = traj.column("beta")
    s = traj.column("eta") + traj.column("mu1")
    assert np.max(np.abs(s)) < 1e-12
    assert np.max(np.abs(beta - beta[0])) < 1e-12


def test_first_integrals_conserved_span_one():
    # a run exercising every scalar, chosen to stay bounded over span 1
    init = state(1.0, 0.0, 0.0, 0.0, lam=1.0)
    drift = first_integral_check(flow_integrate(init, (0.0, 1.0), 1e-3))
    assert drift.drift_nu < 1e-6 and drift.drift_curv < 1e-6

    init = state(0.0, 0.5, 0.5, 0.2, lam=-2.0)
    traj = flow_integrate(init, (0.0, 1.0), 1e-3)
    drift = first_integral_check(traj)
    assert drift.drift_nu < 1e-6 and drift.drift_curv < 1e-6
    # nu = 0 level set is conserved absolutely
    assert np.max(np.abs(traj.e2f_nu())) < 1e-8


def test_corrupted_trajectory_detected():
    init = state(1.0, 0.0, 0.0, 0.0, lam=1.0)
    traj = flow_integrate(init, (0.0, 1.0), 1e-3)
    states = traj.states.copy()
    states[len(states) // 2, 0] += 1e-3  # bump a at one sample
    bad = Trajectory(t=traj.t, states=states, method=traj.method, step=traj.step)
    drift = first_integral_check(bad)
    assert drift.drift_nu > 1e-4


def test_sign_persistence_of_conserved_nu():
    # e^{2f} nu never changes sign along a trajectory
    rng = np.random.default_rng(31)
    survivors = 0
    for _ in range(20):
        a, eta, mu1, mu2 = 0.4 * rng.standard_normal(4)
        lam = float(-1.0 - rng.random())
        init = state(a, eta, mu1, mu2, lam=lam)
        try:
            traj = flow_integrate(init, (0.0, 0.8), 1e-3)
        except BlowUp:
            continue
        survivors += 1
        series = traj.e2f_nu()
        if abs(series[0]) > 1e-10:
            assert np.all(np.sign(series) == np.sign(series[0]))
    assert survivors >= 10


def test_eta_minus_mu1_no_zero_crossing():
    # e1(eta - mu1) = 4 mu1 (eta - mu1): the difference cannot cross zero
    rng = np.random.default_rng(8)
    survivors = 0
    for _ in range(20):
        eta, mu1 = 0.5 * rng.standard_normal(2)
        if abs(eta - mu1) < 1e-3:
            continue
        a = mu1 ** 2 - eta ** 2  # start on nu = 0
        init = state(a, eta, mu1, 0.1, lam=-1.5)
        try:
            traj = flow_integrate(init, (0.0, 0.8), 1e-3)
        except BlowUp:
            continue
        survivors += 1
        diff = traj.column("eta") - traj.column("mu1")
        assert np.all(np.sign(diff) == np.sign(diff[0]))
    assert survivors >= 8


def test_blowup_reports_time():
    init = state(0.0, -3.0, 0.0, 0.0, lam=5.0)  # eta' = -eta^2 - ... plunges
    with pytest.raises(BlowUp) as err:
        flow_integrate(init, (0.0, 5.0), 1e-3)
    assert err.value.t is not None and 0.0 < err.value.t <= 5.0


def test_invalid_spans_and_state():
    with pytest.raises(ValueError):
        flow_integrate(state(0, 0, 0, 0), (0.0, -1.0), 1e-3)
    with pytest.raises(ValueError):
        flow_integrate(state(0, 0, 0, 0), (0.5, 1.0), 1e-3)  # t mismatch
    with pytest.raises(ValueError):
        StructureState(t=0, a=0, eta=0, mu1=0, mu2=0, beta=-1.0)


def test_match_surface_case1(families):
    spec, _ = families["case1_ellipsoid"]
    rep = match_surface(spec, (2.65, 1.3, 0.4), 0.5)
    assert rep.max_deviation < 1e-4


def test_match_surface_case3_has_zero_a(families):
    spec, _ = families["case3_ma_wedge"]
    line = trace_symmetry_line(spec, (1.0, 0.1, -0.1), 0.3, step=5e-3)
    from affinesym.symmetry import classify_point

    for i in np.linspace(0, len(line.t) - 1, 5).astype(int):
        rep = classify_point(spec, line.points[i], compute_eta=False)
        assert abs(rep.a) < 1e-6


def test_match_surface_rejects_quadric(sphere3):
    with pytest.raises(GeometryError):
        match_surface(sphere3, (1.2, 1.0, 0.4), 0.3)
