"""Error-state model of a second-order plant and its zero-order-hold sampling.

The state vector is ``x = [integral of e, e, de/dt]`` where ``e = r - y``.
With a PID law ``u = Ki*x1 + Kp*x2 + Kd*x3`` the controller is a plain state
feedback on this vector, which is what makes the LQR formulation possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigError, NumericFailure


@dataclass(frozen=True)
class SecondOrderPlant:
    """Process ``K / (s^2 + 2 xi wn s + wn^2)``."""

    k_gain: float
    xi: float
    wn: float

    def __post_init__(self):
        for name in ("k_gain", "xi", "wn"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"{name} must be a finite number, got {value!r}")
        if self.wn <= 0:
            raise ConfigError(f"wn must be positive, got {self.wn}")
        if self.xi <= 0:
            raise ConfigError(f"xi must be positive, got {self.xi}")
        if self.k_gain == 0:
            raise ConfigError("k_gain must be nonzero")

    @property
    def poles(self) -> np.ndarray:
        """Open-loop poles of the plant, in rad/s."""
        return np.roots([1.0, 2.0 * self.xi * self.wn, self.wn**2]).astype(complex)

    def servo_offset(self, setpoint: float) -> float:
        """Constant plant input that holds ``y = setpoint`` at steady state."""
        return self.wn**2 * setpoint / self.k_gain


def _as_matrix(value, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ConfigError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Continuous realization ``xdot = a x + b u``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _as_matrix(self.a, "a")
        b = _as_matrix(self.b, "b")
        if a.shape[0] != a.shape[1]:
            raise ConfigError(f"a must be square, got {a.shape}")
        if b.shape[0] != a.shape[0]:
            raise ConfigError(f"b has {b.shape[0]} rows, a has {a.shape[0]}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n_states(self) -> int:
        return self.a.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.b.shape[1]


@dataclass(frozen=True, eq=False)
class DiscretePlant:
    """Sampled realization ``x[k+1] = g x[k] + h u[k]`` with period ``ts``."""

    g: np.ndarray
    h: np.ndarray
    ts: float

    def __post_init__(self):
        g = _as_matrix(self.g, "g")
        h = _as_matrix(self.h, "h")
        if g.shape[0] != g.shape[1]:
            raise ConfigError(f"g must be square, got {g.shape}")
        if h.shape[0] != g.shape[0]:
            raise ConfigError(f"h has {h.shape[0]} rows, g has {g.shape[0]}")
        if not (math.isfinite(self.ts) and self.ts > 0):
            raise ConfigError(f"ts must be positive, got {self.ts}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "ts", float(self.ts))

    @property
    def n_states(self) -> int:
        return self.g.shape[0]


def build_plant_state_space(plant: SecondOrderPlant) -> StateSpace:
    """Return ``(A, B)`` of the error-state model of ``plant``."""
    wn, xi, k = plant.wn, plant.xi, plant.k_gain
    a = np.array(
        [
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, -(wn**2), -2.0 * xi * wn],
        ]
    )
    b = np.array([[0.0], [0.0], [-k]])
    return StateSpace(a, b)


def zoh_blocks(a: np.ndarray, b: np.ndarray, ts: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact ZOH pair ``(exp(a ts), int_0^ts exp(a s) ds b)``.

    Both come from one exponential of the augmented matrix ``[[a, b], [0, 0]]``,
    so no inverse of ``a`` is needed (the error-state ``a`` is singular).
    """
    n, m = b.shape
    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = a
    aug[:n, n:] = b
    with np.errstate(over="ignore", invalid="ignore"):
        e = scipy.linalg.expm(aug * ts)
    if not np.all(np.isfinite(e)):
        raise NumericFailure(f"matrix exponential overflowed for ts={ts}")
    return e[:n, :n], e[:n, n:]


def discretize_zoh(ss: StateSpace, ts: float) -> DiscretePlant:
    if not (math.isfinite(ts) and ts > 0):
        raise ConfigError(f"ts must be positive, got {ts}")
    g, h = zoh_blocks(ss.a, ss.b, ts)
    return DiscretePlant(g, h, ts)


def map_poles_to_z(s_poles, ts: float) -> np.ndarray:
    """Image of continuous poles under ``z = exp(s ts)``, order preserved."""
    if not (math.isfinite(ts) and ts > 0):
        raise ConfigError(f"ts must be positive, got {ts}")
    s = np.asarray(s_poles, dtype=complex)
    if not np.all(np.isfinite(s)):
        raise ConfigError("poles must be finite")
    return np.exp(s * ts)
