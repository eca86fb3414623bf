"""Riemann-Liouville fractional integrals of sampled signals, and Oustaloup filters.

Two quadratures of ``I^a f(t) = 1/Gamma(a) int_0^t f(s) (t - s)^(a-1) ds`` on a
uniform grid are provided.  Both integrate the power-law kernel exactly against
an interpolant of the samples:

* ``"trapezoid"`` (default) -- piecewise-linear interpolant, O(h^2) for smooth f,
  reduces to the trapezoid rule at ``a = 1``;
* ``"rectangle"`` -- piecewise-constant (left value) interpolant, O(h),
  reduces to left-rectangle cumulative integration at ``a = 1``.

All weights are formed with ``expm1``/``log1p`` so that the differences of
large powers stay accurate on grids of 1e5 points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import ConfigError

METHODS = ("trapezoid", "rectangle")


def _check(samples, h, alpha, method):
    f = np.asarray(samples, dtype=float)
    if f.ndim != 1 or f.size < 2:
        raise ConfigError("need a 1-D array of at least two samples")
    if not (math.isfinite(h) and h > 0):
        raise ConfigError(f"step must be positive, got {h}")
    if not (math.isfinite(alpha) and alpha > 0):
        raise ConfigError(f"order must be positive, got {alpha}")
    if method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}")
    return f


def _rectangle_weights(alpha: float, n: int) -> np.ndarray:
    """``b[m] = m^a - (m-1)^a`` for m = 0..n-1, with ``b[0] = 0``."""
    m = np.arange(1, n, dtype=float)
    b = np.zeros(n)
    with np.errstate(divide="ignore"):
        b[1:] = -(m**alpha) * np.expm1(alpha * np.log1p(-1.0 / m))
    return b


def _trapezoid_weights(alpha: float, n: int) -> np.ndarray:
    """``w[m] = (m+1)^p - 2 m^p + (m-1)^p`` (p = a+1) for m >= 1, ``w[0] = 1``."""
    p = alpha + 1.0
    w = np.ones(n)
    if n > 1:
        m = np.arange(1, n, dtype=float)
        x = 1.0 / m
        with np.errstate(divide="ignore"):
            w[1:] = m**p * (np.expm1(p * np.log1p(x)) + np.expm1(p * np.log1p(-x)))
    return w


def _trapezoid_start_weight(alpha: float, n) -> np.ndarray:
    """Weight of ``f[0]`` in ``I[n]``: ``(n-1)^p - (n-1-a) n^a``."""
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = n * np.expm1((alpha + 1.0) * np.log1p(-1.0 / n)) + 1.0 + alpha
        out = n**alpha * inner
    return np.where(n > 0, out, 0.0)


def rl_fractional_integral(samples, h: float, alpha: float, method: str = "trapezoid") -> np.ndarray:
    """Order-``alpha`` integral at every grid point; ``I[0] = 0``.

    Direct O(n^2) convolution.
    """
    f = _check(samples, h, alpha, method)
    n = f.size
    if alpha == 1.0:
        # plain cumulative sums: keeps the running integral of f >= 0 monotone
        steps = f[:-1] if method == "rectangle" else (f[1:] + f[:-1]) / 2.0
        return np.concatenate([[0.0], h * np.cumsum(steps)])
    if method == "rectangle":
        b = _rectangle_weights(alpha, n)
        return h**alpha / math.gamma(alpha + 1.0) * np.convolve(f, b)[:n]
    w = _trapezoid_weights(alpha, n)
    out = np.zeros(n)
    out[1:] = np.convolve(f[1:], w)[: n - 1]
    out += _trapezoid_start_weight(alpha, np.arange(n)) * f[0]
    return h**alpha / math.gamma(alpha + 2.0) * out


def rl_fractional_integral_final(samples, h: float, alpha: float, method: str = "trapezoid") -> float:
    """Last element of :func:`rl_fractional_integral`, in O(n)."""
    f = _check(samples, h, alpha, method)
    n = f.size - 1
    if method == "rectangle":
        b = _rectangle_weights(alpha, n + 1)
        return float(h**alpha / math.gamma(alpha + 1.0) * np.dot(f[:-1], b[:0:-1]))
    w = _trapezoid_weights(alpha, n)
    acc = np.dot(f[1:], w[::-1]) + float(_trapezoid_start_weight(alpha, n)) * f[0]
    return float(h**alpha / math.gamma(alpha + 2.0) * acc)


@dataclass(frozen=True, eq=False)
class OustaloupFilter:
    """Band-limited rational approximation ``K prod (s + zeros_k)/(s + poles_k)`` of ``s^gamma``.

    ``zeros`` and ``poles`` hold the (positive) corner frequencies in rad/s.
    """

    gamma: float
    n_half: int
    wb: float
    wh: float
    zeros: np.ndarray
    poles: np.ndarray
    gain: float

    @property
    def order(self) -> int:
        return 2 * self.n_half + 1

    def zpk(self):
        """Zeros, poles, gain in the ``scipy.signal`` convention."""
        return -self.zeros, -self.poles, self.gain


def oustaloup_synthesize(gamma: float, n_half: int = 2, wb: float = 1e-2, wh: float = 1e2) -> OustaloupFilter:
    if not (-1.0 < gamma < 1.0):
        raise ConfigError(f"gamma must lie in (-1, 1), got {gamma}")
    if int(n_half) != n_half or n_half < 0:
        raise ConfigError("n_half must be a nonnegative integer")
    if not (0 < wb < wh) or not math.isfinite(wh):
        raise ConfigError(f"need 0 < wb < wh, got wb={wb}, wh={wh}")
    n_half = int(n_half)
    k = np.arange(-n_half, n_half + 1, dtype=float)
    span = 2 * n_half + 1
    ratio = wh / wb
    poles = wb * ratio ** ((k + n_half + 0.5 * (1 + gamma)) / span)
    zeros = wb * ratio ** ((k + n_half + 0.5 * (1 - gamma)) / span)
    for arr in (poles, zeros):
        arr.setflags(write=False)
    return OustaloupFilter(float(gamma), n_half, float(wb), float(wh), zeros, poles, float(wh**gamma))


def filter_frequency_response(filt: OustaloupFilter, w):
    """Complex response at ``s = j w``; scalar in, scalar out."""
    w_arr = np.asarray(w, dtype=float)
    s = 1j * w_arr[..., None]
    keep = filt.zeros != filt.poles  # coincident pairs cancel exactly
    resp = filt.gain * np.prod((s + filt.zeros[keep]) / (s + filt.poles[keep]), axis=-1)
    return complex(resp) if np.ndim(w) == 0 else resp


def oustaloup_fractional_integral(samples, h: float, alpha: float, n_half: int = 2,
                                  wb: float = 1e-2, wh: float = 1e2) -> np.ndarray:
    """Fractional integral through a rational filter instead of quadrature.

    ``s^-alpha`` is split into ``floor(alpha)`` exact integrators times an
    Oustaloup approximation of the remaining order; the samples are driven
    through it with linear interpolation between grid points.
    """
    f = _check(samples, h, alpha, "trapezoid")
    whole = math.floor(alpha)
    frac = alpha - whole
    zeros, poles, gain = np.array([]), np.array([]), 1.0
    if frac > 1e-12:
        filt = oustaloup_synthesize(-frac, n_half, wb, wh)
        zeros, poles, gain = filt.zpk()
    poles = np.concatenate([poles, np.zeros(whole)])
    if poles.size == 0:
        return gain * f
    t = np.arange(f.size) * h
    sys = signal.ZerosPolesGain(zeros, poles, gain).to_ss()
    _, y, _ = signal.lsim(sys, f, t, interp=True)
    return np.asarray(y, dtype=float)
