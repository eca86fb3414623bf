import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lqrpid.errors import ConfigError, NotStabilizableError
from lqrpid.riccati import (
    LqrWeights,
    care_residual,
    dare_residual,
    solve_care,
    solve_dare,
    symmetric_eigenvalues,
)
from lqrpid.ssmodel import SecondOrderPlant, build_plant_state_space, discretize_zoh

from oracles import care_newton_kleinman, dare_fixed_point


def test_scalar_care_closed_forms():
    sol = solve_care([[-1.0]], [[1.0]], [[1.0]], [[1.0]])
    assert sol.p[0, 0] == pytest.approx(math.sqrt(2) - 1, abs=1e-12)
    sol = solve_care([[0.0]], [[1.0]], [[1.0]], [[1.0]])
    assert sol.p[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert sol.feedback[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert sol.closed_loop_eigenvalues[0] == pytest.approx(-1.0, abs=1e-12)


def test_scalar_dare_closed_forms():
    sol = solve_dare([[0.5]], [[1.0]], [[1.0]], [[1.0]])
    root = (0.25 + math.sqrt(0.0625 + 4)) / 2  # p^2 - 0.25 p - 1 = 0
    assert sol.p[0, 0] == pytest.approx(root, abs=1e-12)
    assert root == pytest.approx(1.132782, abs=1e-6)
    sol = solve_dare([[0.0]], [[1.0]], [[1.0]], [[1.0]])
    assert sol.p[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_care_matches_newton_kleinman(oscillatory):
    ss = build_plant_state_space(oscillatory)
    sol = solve_care(ss.a, ss.b, np.eye(3), np.eye(1))
    assert sol.residual <= 1e-9
    # a stabilizing start: the PID gains (2, 2, 1)
    f0 = -np.array([[2.0, 2.0, 1.0]])
    p_ref = care_newton_kleinman(ss.a, ss.b, np.eye(3), np.eye(1), f0)
    np.testing.assert_allclose(sol.p, p_ref, rtol=0, atol=1e-8)


def test_dare_matches_fixed_point(oscillatory):
    d = discretize_zoh(build_plant_state_space(oscillatory), 0.1)
    sol = solve_dare(d.g, d.h, np.eye(3), np.eye(1))
    assert sol.residual <= 1e-9
    p_ref = dare_fixed_point(d.g, d.h, np.eye(3), np.eye(1))
    np.testing.assert_allclose(sol.p, p_ref, rtol=0, atol=1e-8)


@pytest.mark.parametrize("xi", [0.2, 5.0])
def test_certificates(xi):
    ss = build_plant_state_space(SecondOrderPlant(1, xi, 1))
    sol = solve_care(ss.a, ss.b, np.eye(3), np.eye(1))
    assert np.max(np.abs(sol.p - sol.p.T)) <= 1e-10
    assert np.linalg.eigvalsh(sol.p).min() >= -1e-9 * np.linalg.norm(sol.p)
    assert care_residual(ss.a, ss.b, np.eye(3), np.eye(1), sol.p) <= 1e-9
    assert sol.spectral_abscissa < -1e-8
    d = discretize_zoh(ss, 0.5)
    sd = solve_dare(d.g, d.h, np.eye(3), np.eye(1))
    assert dare_residual(d.g, d.h, np.eye(3), np.eye(1), sd.p) <= 1e-9
    assert sd.spectral_radius < 1 - 1e-8


def test_feedback_formulas(oscillatory):
    ss = build_plant_state_space(oscillatory)
    sol = solve_care(ss.a, ss.b, np.eye(3), 2 * np.eye(1))
    np.testing.assert_allclose(sol.feedback, ss.b.T @ sol.p / 2)
    d = discretize_zoh(ss, 0.1)
    sd = solve_dare(d.g, d.h, np.eye(3), np.eye(1))
    ref = np.linalg.solve(1 + d.h.T @ sd.p @ d.h, d.h.T @ sd.p @ d.g)
    np.testing.assert_allclose(sd.feedback, ref)


def test_unstabilizable_pair_rejected():
    # unstable mode not reachable from the input
    a = np.diag([1.0, -1.0])
    b = np.array([[0.0], [1.0]])
    with pytest.raises(NotStabilizableError):
        solve_care(a, b, np.eye(2), np.eye(1))
    with pytest.raises(NotStabilizableError):
        solve_dare(np.diag([2.0, 0.5]), b, np.eye(2), np.eye(1))


def test_zero_integral_weight_is_not_accepted(oscillatory):
    # the integrator mode is invisible to the cost: no stabilizing solution
    ss = build_plant_state_space(oscillatory)
    with pytest.raises(NotStabilizableError):
        solve_care(ss.a, ss.b, np.diag([0.0, 1.0, 1.0]), np.eye(1))


def test_input_validation():
    with pytest.raises(ConfigError):
        solve_care([[1.0]], [[1.0]], [[1.0]], [[-1.0]])
    with pytest.raises(ConfigError):
        solve_care(np.eye(2), np.ones((2, 1)), np.array([[1.0, 2.0], [0.0, 1.0]]), np.eye(1))
    with pytest.raises(ConfigError):
        LqrWeights(-1, 1, 1, 1)
    with pytest.raises(ConfigError):
        LqrWeights(1, 1, 1, 0)


def test_weights_from_vector_floors_r():
    w = LqrWeights.from_vector([1, 2, 3, 0.0])
    assert w.r == 1e-6
    np.testing.assert_array_equal(w.q, np.diag([1.0, 2.0, 3.0]))


@given(st.lists(st.floats(0.01, 50), min_size=3, max_size=3),
       st.lists(st.floats(0.0, 50), min_size=3, max_size=3),
       st.floats(0.05, 50), st.sampled_from([0.2, 5.0]))
def test_monotone_in_q(q_small, q_extra, r, xi):
    ss = build_plant_state_space(SecondOrderPlant(1, xi, 1))
    q2 = np.diag(q_small)
    q1 = np.diag(np.add(q_small, q_extra))
    p1 = solve_care(ss.a, ss.b, q1, [[r]]).p
    p2 = solve_care(ss.a, ss.b, q2, [[r]]).p
    assert np.linalg.eigvalsh(p1 - p2).min() >= -1e-8 * max(1, np.abs(p1).max())


@pytest.mark.parametrize("mat, expected", [(np.eye(3), [1, 1, 1]), (np.diag([3.0, 1.0, 2.0]), [1, 2, 3])])
def test_symmetric_eigenvalues_examples(mat, expected):
    np.testing.assert_allclose(symmetric_eigenvalues(mat), expected, atol=1e-14)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_symmetric_eigenvalues_against_lapack(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n)) * 10 ** rng.uniform(-2, 3)
    s = m + m.T
    eig = symmetric_eigenvalues(s)
    np.testing.assert_allclose(eig, np.linalg.eigvalsh(s), rtol=0, atol=1e-10 * max(1, np.linalg.norm(s)))
    assert np.all(np.diff(eig) >= 0)
    assert abs(eig.sum() - np.trace(s)) <= 1e-9 * max(1, np.linalg.norm(s))


def test_symmetric_eigenvalues_rejects_asymmetric():
    with pytest.raises(ConfigError):
        symmetric_eigenvalues([[1.0, 2.0], [0.0, 1.0]])
