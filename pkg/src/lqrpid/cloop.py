"""Closed-loop simulation of the error-state model under PID/LQR feedback.

Servo mode tracks a step set-point ``r``.  In error coordinates that adds a
constant forcing, carried here as an effective plant input
``u_eff = u + d - wn^2 r / K``.  Regulator mode drops the set-point term and
lets an initial state decay, which is the setting where ``x0' P x0`` equals the
accumulated quadratic cost.

Continuous loops are integrated with classical RK4 at a fixed step.  For a
linear time-invariant loop with input held constant over each step, one RK4
step is exactly ``x+ = T x + S c`` with ``T`` and ``S`` truncated exponential
series, so the integrator is run as that recursion (blocked matrix powers
instead of a Python loop over 1e5 steps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import ConfigError, NumericFailure
from .pidmap import PidGains
from .riccati import LqrWeights
from .ssmodel import DiscretePlant, SecondOrderPlant, build_plant_state_space, zoh_blocks

DIVERGENCE_LIMIT = 1e6
MODES = ("servo", "regulator")


def _grid_count(span: float, step: float, what: str) -> int:
    count = span / step
    n = int(round(count))
    if n < 1 or abs(count - n) > 1e-9 * max(1.0, count):
        raise ConfigError(f"{what}: {span} is not an integer multiple of {step}")
    return n


@dataclass(frozen=True)
class Scenario:
    """Set-point step, optional plant-input load step, horizon and step size.

    ``disturbance_time`` of ``None`` disables the load step.  The default load
    magnitude is 0 (set-point response only).
    """

    setpoint: float = 1.0
    disturbance_time: float | None = 50.0
    disturbance_magnitude: float = 0.0
    horizon: float = 100.0
    dt: float = 1e-3
    mode: str = "servo"
    x0: tuple | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ConfigError("horizon must be positive")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("dt must be positive")
        if not math.isfinite(self.setpoint) or not math.isfinite(self.disturbance_magnitude):
            raise ConfigError("setpoint and disturbance magnitude must be finite")
        if (self.disturbance_time is not None and self.disturbance_magnitude != 0.0
                and not (0 <= self.disturbance_time <= self.horizon)):
            raise ConfigError("disturbance_time must lie in [0, horizon]")
        if self.x0 is not None:
            object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        _grid_count(self.horizon, self.dt, "horizon")

    @property
    def n_steps(self) -> int:
        return _grid_count(self.horizon, self.dt, "horizon")

    @property
    def reference(self) -> float:
        """Set-point seen by the loop (0 in regulator mode)."""
        return self.setpoint if self.mode == "servo" else 0.0

    def initial_state(self, n: int) -> np.ndarray:
        if self.x0 is not None:
            x0 = np.array(self.x0, dtype=float)
            if x0.shape != (n,):
                raise ConfigError(f"x0 must have {n} entries")
            return x0
        x0 = np.zeros(n)
        x0[_error_index(n)] = self.setpoint
        return x0

    def disturbance_step(self, step: float) -> int | None:
        """First grid index at or after the load step, or None."""
        if self.disturbance_time is None or self.disturbance_magnitude == 0.0:
            return None
        return int(math.ceil(self.disturbance_time / step - 1e-9))


@dataclass(frozen=True, eq=False)
class SimTrace:
    times: np.ndarray
    e: np.ndarray
    u: np.ndarray
    y: np.ndarray
    states: np.ndarray
    setpoint: float
    mode: str
    stable: bool = True
    # indices [0, stride, 2*stride, ...] are the controller sampling instants
    sample_stride: int = 1

    def __post_init__(self):
        if len(self.times) < 2:
            raise ConfigError("a trace needs at least two samples")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def __len__(self):
        return len(self.times)


def _error_index(n: int) -> int:
    # x2 = e in the 3-state error model; other sizes report the first state
    return 1 if n == 3 else 0


def _orbit(step_matrix: np.ndarray, z0: np.ndarray, count: int) -> np.ndarray:
    """Rows ``z0, M z0, M^2 z0, ...`` (``count`` of them)."""
    d = z0.shape[0]
    if count <= 0:
        return np.empty((0, d))
    block = max(1, math.isqrt(count))
    powers = np.eye(d)[None, :, :]
    jump = step_matrix.copy()
    while powers.shape[0] < block:
        powers = np.concatenate([powers, powers @ jump])
        jump = jump @ jump
    powers = powers[:block]
    leap = np.linalg.matrix_power(step_matrix, block)
    n_blocks = -(-count // block)
    starts = np.empty((n_blocks, d))
    z = z0
    for i in range(n_blocks):
        starts[i] = z
        z = leap @ z
    out = np.einsum("ijk,bk->bij", powers, starts).reshape(-1, d)
    return out[:count]


def _run_recursion(one_step, z0, n_steps, stride, switch_step, new_input):
    """Augmented recursion ``z[k+1] = one_step z[k]``, recorded every ``stride``.

    The last component of ``z`` is the held input; at ``switch_step`` it is
    replaced by ``new_input``.
    """
    n_records = n_steps // stride + 1
    stride_matrix = np.linalg.matrix_power(one_step, stride)
    if switch_step is None or switch_step > n_steps:
        return _orbit(stride_matrix, z0, n_records)
    first = -(-switch_step // stride)  # records strictly before the switch
    head = _orbit(stride_matrix, z0, first)
    if first > 0:
        z_sw = np.linalg.matrix_power(one_step, switch_step - (first - 1) * stride) @ head[-1]
    else:
        z_sw = z0.copy()
    z_sw = z_sw.copy()
    z_sw[-1] = new_input
    z_first = np.linalg.matrix_power(one_step, first * stride - switch_step) @ z_sw
    tail = _orbit(stride_matrix, z_first, n_records - first)
    return np.concatenate([head, tail])


def _truncate_divergent(times, states, e, u, y):
    bad = ~np.isfinite(e) | (np.abs(np.nan_to_num(e, nan=np.inf)) > DIVERGENCE_LIMIT)
    bad |= ~np.all(np.isfinite(states), axis=1)
    if not bad.any():
        return (times, states, e, u, y), True
    stop = max(int(np.argmax(bad)) + 1, 2)
    return tuple(arr[:stop] for arr in (times, states, e, u, y)), False


def rk4_step_matrices(a_cl: np.ndarray, b_cl: np.ndarray, dt: float):
    """``(T, S)`` with one RK4 step of ``xdot = a_cl x + b_cl c`` equal to ``T x + S c``."""
    n = a_cl.shape[0]
    eye = np.eye(n)
    ah = a_cl * dt
    ah2 = ah @ ah
    ah3 = ah2 @ ah
    t = eye + ah + ah2 / 2.0 + ah3 / 6.0 + ah3 @ ah / 24.0
    s = dt * (eye + ah / 2.0 + ah2 / 6.0 + ah3 / 24.0) @ b_cl
    return t, s


def simulate_state_feedback(a, b, feedback, scenario: Scenario, input_offset: float = 0.0,
                            record_every: int = 1) -> SimTrace:
    """RK4 simulation of ``xdot = a x + b (u + d - input_offset)`` with ``u = -F x``.

    ``input_offset`` is only applied in servo mode.  States are recorded every
    ``record_every`` integration steps; values at recorded instants do not
    depend on the stride.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    n = a.shape[0]
    b = np.asarray(b, dtype=float).reshape(n, 1)
    f = np.asarray(feedback, dtype=float).reshape(1, n)
    if not np.all(np.isfinite(f)):
        raise NumericFailure("feedback gains are not finite")
    n_steps = scenario.n_steps
    if record_every < 1 or n_steps % record_every:
        raise ConfigError(f"record_every={record_every} must divide the {n_steps} steps")

    t_mat, s_vec = rk4_step_matrices(a - b @ f, b, scenario.dt)
    one_step = np.zeros((n + 1, n + 1))
    one_step[:n, :n] = t_mat
    one_step[:n, n:] = s_vec
    one_step[n, n] = 1.0

    c0 = -input_offset if scenario.mode == "servo" else 0.0
    z0 = np.append(scenario.initial_state(n), c0)
    switch = scenario.disturbance_step(scenario.dt)
    with np.errstate(all="ignore"):
        z = _run_recursion(one_step, z0, n_steps, record_every, switch,
                           c0 + scenario.disturbance_magnitude)
        states = z[:, :n]
        u = -(states @ f.T).ravel()
    times = np.arange(z.shape[0]) * (scenario.dt * record_every)
    r = scenario.reference
    e = states[:, _error_index(n)]
    (times, states, e, u, y), stable = _truncate_divergent(times, states, e, u, r - e)
    return SimTrace(times, e, u, y, states, r, scenario.mode, stable)


def simulate_continuous(plant: SecondOrderPlant, gains: PidGains, scenario: Scenario,
                        record_every: int = 1) -> SimTrace:
    """Analog PID loop on ``plant``; returns error, control and output samples."""
    ss = build_plant_state_space(plant)
    return simulate_state_feedback(ss.a, ss.b, gains.feedback, scenario,
                                   input_offset=plant.servo_offset(scenario.setpoint),
                                   record_every=record_every)


def simulate_discrete(dplant: DiscretePlant, feedback, scenario: Scenario,
                      plant: SecondOrderPlant | None = None, substeps: int = 1) -> SimTrace:
    """Sampled loop ``x[k+1] = G x[k] + H (u[k] + d[k] - offset)``, ``u[k] = -F x[k]``.

    With ``substeps > 1`` the continuous plant response between samples is also
    recorded (input held), giving a trace with spacing ``ts / substeps``; this
    needs ``plant``.  Servo mode needs ``plant`` for the set-point forcing.
    """
    g, h = dplant.g, dplant.h
    n = g.shape[0]
    f = np.asarray(feedback, dtype=float).reshape(1, n)
    if not np.all(np.isfinite(f)):
        raise NumericFailure("feedback gains are not finite")
    if substeps < 1:
        raise ConfigError("substeps must be >= 1")
    if plant is None and (substeps > 1 or scenario.mode == "servo"):
        raise ConfigError("servo mode and inter-sample output need the continuous plant")
    ts = dplant.ts
    n_samples = _grid_count(scenario.horizon, ts, "horizon")

    one_step = np.zeros((n + 1, n + 1))
    one_step[:n, :n] = g - h @ f
    one_step[:n, n:] = h
    one_step[n, n] = 1.0
    offset = plant.servo_offset(scenario.setpoint) if plant is not None else 0.0
    c0 = -offset if scenario.mode == "servo" else 0.0
    z0 = np.append(scenario.initial_state(n), c0)
    switch = scenario.disturbance_step(ts)

    with np.errstate(all="ignore"):
        z = _run_recursion(one_step, z0, n_samples, 1, switch, c0 + scenario.disturbance_magnitude)
        xk = z[:, :n]
        uk = -(xk @ f.T).ravel()
        if substeps == 1:
            states, u = xk, uk
            times = np.arange(n_samples + 1) * ts
        else:
            ss = build_plant_state_space(plant)
            delta = ts / substeps
            phi, gam = zoh_blocks(ss.a, ss.b, delta)
            step = np.zeros((n + 1, n + 1))
            step[:n, :n] = phi
            step[:n, n:] = gam
            step[n, n] = 1.0
            blocks = [np.eye(n + 1)]
            for _ in range(substeps - 1):
                blocks.append(step @ blocks[-1])
            blocks = np.stack(blocks)  # (m, n+1, n+1): [[Phi_j, Gamma_j], [0, 1]]
            u_eff = uk[:-1] + z[:-1, n]
            aug = np.column_stack([xk[:-1], u_eff])
            inner = np.einsum("jab,kb->kja", blocks, aug)[:, :, :n].reshape(-1, n)
            states = np.vstack([inner, xk[-1:]])
            u = np.append(np.repeat(uk[:-1], substeps), uk[-1])
            times = np.arange(states.shape[0]) * delta
    r = scenario.reference
    e = states[:, _error_index(n)]
    (times, states, e, u, y), stable = _truncate_divergent(times, states, e, u, r - e)
    return SimTrace(times, e, u, y, states, r, scenario.mode, stable, sample_stride=substeps)


def evaluate_quadratic_cost(trace: SimTrace, weights, discrete: bool = False) -> float:
    """Accumulated ``x'Qx + R u^2`` along a regulator trace.

    ``weights`` is an ``LqrWeights`` or a ``(q, r)`` pair of matrices.  The
    continuous cost uses trapezoid quadrature; the discrete cost is a plain sum
    over the controller sampling instants (no ``ts`` factor).
    """
    if trace.mode != "regulator":
        raise ConfigError("quadratic cost identity only holds for regulator traces")
    if isinstance(weights, LqrWeights):
        q, r = weights.q, weights.r
    else:
        q, r = weights
        q = np.atleast_2d(np.asarray(q, dtype=float))
        r = float(np.asarray(r, dtype=float).ravel()[0])
    x = trace.states
    u = trace.u
    if discrete:
        x = x[:: trace.sample_stride]
        u = u[:: trace.sample_stride]
    running = np.einsum("ki,ij,kj->k", x, q, x) + r * u**2
    if discrete:
        return float(np.sum(running))
    return float(trapezoid(running, trace.times))
