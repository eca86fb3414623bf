"""Integer- and fractional-order time-domain performance indices.

The integrand is ``w1 * t * e(t)^2 + w2 * u(t)^2`` (ITSE plus squared
controller output).  Order 1 gives the ordinary integral; other orders apply a
Riemann-Liouville integral of that order and read its value at the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cloop import SimTrace
from .errors import ConfigError
from .fracint import rl_fractional_integral, rl_fractional_integral_final


@dataclass(frozen=True)
class CostSpec:
    order: float = 1.0
    w1: float = 1.0
    w2: float = 1.0
    horizon: float = 100.0
    eval_step: float = 0.01
    method: str = "trapezoid"

    def __post_init__(self):
        for name in ("order", "w1", "w2", "horizon", "eval_step"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.order <= 0:
            raise ConfigError("integration order must be positive")
        if self.w1 < 0 or self.w2 < 0:
            raise ConfigError("weights must be nonnegative")
        if self.horizon <= 0 or self.eval_step <= 0:
            raise ConfigError("horizon and eval_step must be positive")


def decimation_stride(trace_dt: float, eval_step: float) -> int:
    """Integer stride taking the trace grid to ``eval_step``."""
    ratio = eval_step / trace_dt
    stride = int(round(ratio))
    if stride < 1 or abs(ratio - stride) > 1e-6 * ratio:
        raise ConfigError(f"eval_step {eval_step} is not a multiple of the trace step {trace_dt}")
    return stride


def integrand(trace: SimTrace, spec: CostSpec):
    """``(t, phi)`` on the evaluation grid, cut at the horizon."""
    if not trace.stable:
        raise ConfigError("trace diverged; cost is undefined")
    stride = decimation_stride(trace.dt, spec.eval_step)
    n = int(round(spec.horizon / spec.eval_step))
    t = trace.times[::stride]
    if t.size < n + 1 or t[n] < spec.horizon * (1 - 1e-9):
        raise ConfigError(f"trace ends at {trace.times[-1]}, shorter than horizon {spec.horizon}")
    t = t[: n + 1]
    e = trace.e[::stride][: n + 1]
    u = trace.u[::stride][: n + 1]
    return t, spec.w1 * t * e**2 + spec.w2 * u**2


def cost_trajectory(trace: SimTrace, spec: CostSpec) -> tuple[np.ndarray, np.ndarray]:
    """Running index ``I^order phi`` on the evaluation grid, as ``(t, J(t))``."""
    t, phi = integrand(trace, spec)
    return t, rl_fractional_integral(phi, spec.eval_step, spec.order, spec.method)


def fractional_cost(trace: SimTrace, spec: CostSpec) -> float:
    """Value of the order-``spec.order`` index at the horizon."""
    _, phi = integrand(trace, spec)
    return rl_fractional_integral_final(phi, spec.eval_step, spec.order, spec.method)
