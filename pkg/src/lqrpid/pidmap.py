"""PID gains from LQR feedback rows, and the sampled PID law."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float
    kd: float

    def __post_init__(self):
        for name in ("kp", "ki", "kd"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")

    @property
    def feedback(self) -> np.ndarray:
        """State-feedback row ``F`` on ``[int e, e, de/dt]`` with ``u = -F x``."""
        return np.array([[-self.ki, -self.kp, -self.kd]])

    def as_dict(self) -> dict:
        return {"kp": self.kp, "ki": self.ki, "kd": self.kd}


def gains_from_feedback(f) -> PidGains:
    """Read ``(Ki, Kp, Kd)`` off a feedback row ``F = -[Ki, Kp, Kd]``."""
    row = np.asarray(f, dtype=float).ravel()
    if row.shape != (3,):
        raise ConfigError(f"feedback row must have 3 entries, got {row.shape}")
    return PidGains(kp=float(-row[1]), ki=float(-row[0]), kd=float(-row[2]))


def discrete_control_step(gains: PidGains, e_now, e_prev, integral_accum, ts):
    """One sample of the digital PID law.

    The integral state advances by the trapezoid rule and the derivative is a
    backward difference. Returns ``(u, new_integral_accum)``.
    """
    if not ts > 0:
        raise ConfigError(f"ts must be positive, got {ts}")
    acc = integral_accum + ts * (e_now + e_prev) / 2.0
    de = (e_now - e_prev) / ts
    u = gains.ki * acc + gains.kp * e_now + gains.kd * de
    return u, acc
