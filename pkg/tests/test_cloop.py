import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lqrpid.cloop import (
    Scenario,
    evaluate_quadratic_cost,
    rk4_step_matrices,
    simulate_continuous,
    simulate_discrete,
    simulate_state_feedback,
)
from lqrpid.errors import ConfigError
from lqrpid.pidmap import PidGains
from lqrpid.reference import CARE_GAINS, DARE_GAINS, OSCILLATORY, PLANTS, SLUGGISH
from lqrpid.riccati import LqrWeights, solve_care, solve_dare
from lqrpid.ssmodel import DiscretePlant, build_plant_state_space, discretize_zoh

from oracles import ode_reference

REG = dict(mode="regulator", x0=(0.0, 1.0, 0.0))


def _table_gains(table, name, order=1.0):
    _, kp, ki, kd = table[(name, order)]
    return PidGains(kp, ki, kd)


def _rk4_loop(a, b, u_const, x0, dt, n):
    """Plain stage-by-stage RK4, for comparison with the propagator form."""
    f = lambda x: a @ x + b * u_const
    xs = [x0]
    x = x0
    for _ in range(n):
        k1 = f(x)
        k2 = f(x + dt / 2 * k1)
        k3 = f(x + dt / 2 * k2)
        k4 = f(x + dt * k3)
        x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        xs.append(x)
    return np.array(xs)


def test_zero_gains_regulator_at_rest(oscillatory):
    tr = simulate_continuous(oscillatory, PidGains(0, 0, 0), Scenario(mode="regulator", x0=(0, 0, 0), horizon=5))
    assert not np.any(tr.e) and not np.any(tr.u) and not np.any(tr.y)


def test_zero_feedback_discrete_at_rest(oscillatory):
    d = discretize_zoh(build_plant_state_space(oscillatory), 0.1)
    tr = simulate_discrete(d, np.zeros((1, 3)), Scenario(mode="regulator", x0=(0, 0, 0), horizon=5))
    assert not np.any(tr.states)


def test_scalar_discrete_recursion():
    d = DiscretePlant([[1.0]], [[0.5]], 1.0)
    tr = simulate_discrete(d, [[1.0]], Scenario(mode="regulator", x0=(1.0,), horizon=2, dt=1.0))
    np.testing.assert_allclose(tr.states.ravel(), [1.0, 0.5, 0.25])


def test_rk4_propagator_equals_stepping(oscillatory):
    ss = build_plant_state_space(oscillatory)
    f = PidGains(2, 2, 1).feedback
    a_cl = ss.a - ss.b @ f
    dt = 0.05
    t_mat, s_vec = rk4_step_matrices(a_cl, ss.b, dt)
    x0 = np.array([0.0, 1.0, 0.0])
    c = -1.0
    ref = _rk4_loop(a_cl, ss.b.ravel(), c, x0, dt, 200)
    x = x0
    for k in range(200):
        x = t_mat @ x + s_vec.ravel() * c
    np.testing.assert_allclose(x, ref[-1], rtol=0, atol=1e-12)
    tr = simulate_continuous(oscillatory, PidGains(2, 2, 1), Scenario(horizon=10, dt=dt))
    np.testing.assert_allclose(tr.states, ref, rtol=0, atol=1e-10)


def test_continuous_matches_ode(oscillatory):
    gains = _table_gains(CARE_GAINS, "oscillatory")
    ss = build_plant_state_space(oscillatory)
    sc = Scenario(horizon=20)
    tr = simulate_continuous(oscillatory, gains, sc, record_every=100)
    a_cl = ss.a - ss.b @ gains.feedback
    ref = ode_reference(a_cl, ss.b, [-oscillatory.servo_offset(1.0)], [0, 1, 0], tr.times)
    np.testing.assert_allclose(tr.states, ref, rtol=0, atol=1e-9)


def test_sluggish_table_gains_settle(sluggish):
    tr = simulate_continuous(sluggish, _table_gains(CARE_GAINS, "sluggish"), Scenario(), record_every=10)
    assert tr.stable and abs(tr.e[-1]) < 0.01


def test_oscillatory_demo_gains_bounded(oscillatory):
    tr = simulate_continuous(oscillatory, PidGains(2, 2, 1), Scenario(), record_every=10)
    assert tr.stable and np.max(np.abs(tr.e)) < 10
    # oscillatory: the error changes sign repeatedly
    assert np.count_nonzero(np.diff(np.sign(tr.e[tr.e != 0]))) >= 4


@pytest.mark.parametrize("name", ["oscillatory", "sluggish"])
@pytest.mark.parametrize("table", [CARE_GAINS, DARE_GAINS], ids=["care_gains", "dare_gains"])
def test_servo_steady_state(name, table):
    plant = PLANTS[name]
    tr = simulate_continuous(plant, _table_gains(table, name), Scenario(), record_every=10)
    assert abs(tr.e[-1]) < 1e-3
    assert abs(tr.u[-1] - plant.wn**2 * 1.0 / plant.k_gain) < 1e-3


@pytest.mark.parametrize("name", ["oscillatory", "sluggish"])
def test_grid_refinement(name):
    plant, gains = PLANTS[name], _table_gains(CARE_GAINS, name)
    coarse = simulate_continuous(plant, gains, Scenario(dt=1e-3), record_every=2)
    fine = simulate_continuous(plant, gains, Scenario(dt=5e-4), record_every=4)
    assert np.max(np.abs(coarse.e - fine.e)) < 1e-6


@settings(max_examples=15)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 20))
def test_disturbance_superposition(r, d, t_d):
    gains = PidGains(2, 2, 1)
    both = simulate_continuous(OSCILLATORY, gains, Scenario(setpoint=r, disturbance_time=t_d,
                                                            disturbance_magnitude=d, horizon=20, dt=1e-2))
    only_r = simulate_continuous(OSCILLATORY, gains, Scenario(setpoint=r, horizon=20, dt=1e-2))
    only_d = simulate_continuous(OSCILLATORY, gains, Scenario(setpoint=0.0, disturbance_time=t_d,
                                                              disturbance_magnitude=d, horizon=20, dt=1e-2))
    np.testing.assert_allclose(both.e, only_r.e + only_d.e, rtol=0, atol=1e-9)
    np.testing.assert_allclose(both.u, only_r.u + only_d.u, rtol=0, atol=1e-9)


def test_record_stride_does_not_change_values(oscillatory):
    gains = PidGains(2, 2, 1)
    full = simulate_continuous(oscillatory, gains, Scenario(horizon=10))
    thin = simulate_continuous(oscillatory, gains, Scenario(horizon=10), record_every=10)
    np.testing.assert_allclose(thin.e, full.e[::10], rtol=0, atol=1e-12)


def test_divergent_loop_truncated(oscillatory):
    # negative gains destabilize the loop
    tr = simulate_continuous(oscillatory, PidGains(-5, -5, -5), Scenario(), record_every=10)
    assert not tr.stable
    assert tr.times[-1] < 100


@pytest.mark.parametrize("plant", [OSCILLATORY, SLUGGISH], ids=["oscillatory", "sluggish"])
def test_regulator_cost_matches_riccati(plant):
    ss = build_plant_state_space(plant)
    w = LqrWeights(1, 1, 1, 1)
    sol = solve_care(ss.a, ss.b, w.q, w.r_matrix)
    sc = Scenario(horizon=100, **REG)
    tr = simulate_state_feedback(ss.a, ss.b, sol.feedback, sc)
    assert evaluate_quadratic_cost(tr, w) == pytest.approx(sol.p[1, 1], rel=0.01)
    d = discretize_zoh(ss, 0.1)
    sd = solve_dare(d.g, d.h, w.q, w.r_matrix)
    td = simulate_discrete(d, sd.feedback, Scenario(horizon=100, dt=0.1, **REG))
    assert evaluate_quadratic_cost(td, w, discrete=True) == pytest.approx(sd.p[1, 1], rel=0.01)


def test_discrete_approaches_continuous(oscillatory):
    ss = build_plant_state_space(oscillatory)
    fc = solve_care(ss.a, ss.b, np.eye(3), np.eye(1)).feedback
    errs = []
    for ts in (0.1, 0.01):
        d = discretize_zoh(ss, ts)
        fd = solve_dare(d.g, d.h, np.eye(3), np.eye(1)).feedback
        sc = Scenario(horizon=20, **REG)
        td = simulate_discrete(d, fd, sc)
        tc = simulate_state_feedback(ss.a, ss.b, fc, sc, record_every=int(round(ts / sc.dt)))
        errs.append(np.max(np.abs(td.states - tc.states)))
    assert errs[0] < 0.1 and errs[1] < 0.01
    assert errs[1] < errs[0] / 5


def test_inter_sample_trace_hits_samples(oscillatory):
    d = discretize_zoh(build_plant_state_space(oscillatory), 0.1)
    f = _table_gains(DARE_GAINS, "oscillatory").feedback
    sc = Scenario(horizon=10)
    coarse = simulate_discrete(d, f, sc, plant=oscillatory)
    fine = simulate_discrete(d, f, sc, plant=oscillatory, substeps=10)
    np.testing.assert_allclose(fine.states[::10], coarse.states, rtol=0, atol=1e-12)
    assert fine.sample_stride == 10


def test_quadratic_cost_zero_trace(oscillatory):
    tr = simulate_continuous(oscillatory, PidGains(0, 0, 0), Scenario(mode="regulator", x0=(0, 0, 0), horizon=5))
    assert evaluate_quadratic_cost(tr, LqrWeights(1, 1, 1, 1)) == 0.0


def test_quadratic_cost_needs_regulator(oscillatory):
    tr = simulate_continuous(oscillatory, PidGains(1, 1, 1), Scenario(horizon=5))
    with pytest.raises(ConfigError):
        evaluate_quadratic_cost(tr, LqrWeights(1, 1, 1, 1))


def test_scenario_validation():
    with pytest.raises(ConfigError):
        Scenario(mode="bogus")
    with pytest.raises(ConfigError):
        Scenario(horizon=1.0005, dt=1e-3)
    with pytest.raises(ConfigError):
        Scenario(disturbance_time=200, disturbance_magnitude=1.0)
    with pytest.raises(ConfigError):
        simulate_discrete(DiscretePlant([[1.0]], [[1.0]], 0.1), [[1.0]], Scenario(horizon=1))
