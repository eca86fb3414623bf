"""Certified continuous/discrete algebraic Riccati solvers.

The initial solution comes from the Schur-based solvers in SciPy.  It is then
polished with Newton steps (Kleinman for the continuous case, Hewer for the
discrete case) and every returned solution carries a residual certificate and
has been checked to be stabilizing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigError, ConvergenceError, NotStabilizableError, NumericFailure

RESIDUAL_TOL = 1e-9
STABILITY_MARGIN = 1e-8
R_FLOOR = 1e-6


@dataclass(frozen=True)
class LqrWeights:
    """Diagonal state weights ``q1..q3`` and scalar control weight ``r``."""

    q1: float
    q2: float
    q3: float
    r: float

    def __post_init__(self):
        for name in ("q1", "q2", "q3", "r"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ConfigError(f"{name} must be finite")
        if min(self.q1, self.q2, self.q3) < 0:
            raise ConfigError("state weights must be nonnegative")
        if self.r <= 0:
            raise ConfigError("control weight r must be positive")

    @classmethod
    def from_vector(cls, x, r_floor: float = R_FLOOR) -> "LqrWeights":
        """Build from a GA decision vector ``[q1, q2, q3, r]``; ``r`` is floored."""
        q1, q2, q3, r = (float(v) for v in x)
        return cls(max(q1, 0.0), max(q2, 0.0), max(q3, 0.0), max(r, r_floor))

    def as_vector(self) -> np.ndarray:
        return np.array([self.q1, self.q2, self.q3, self.r])

    @property
    def q(self) -> np.ndarray:
        return np.diag([self.q1, self.q2, self.q3])

    @property
    def r_matrix(self) -> np.ndarray:
        return np.array([[self.r]])


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    p: np.ndarray
    residual: float
    feedback: np.ndarray
    closed_loop_eigenvalues: np.ndarray
    kind: str  # "care" or "dare"

    @property
    def spectral_abscissa(self) -> float:
        return float(np.max(self.closed_loop_eigenvalues.real))

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.closed_loop_eigenvalues)))


def _prepare(a, b, q, r):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float)
    if b.ndim < 2:
        b = b.reshape(a.shape[0], -1)
    q = np.atleast_2d(np.asarray(q, dtype=float))
    r = np.atleast_2d(np.asarray(r, dtype=float))
    n = a.shape[0]
    if a.shape != (n, n) or b.shape[0] != n or q.shape != (n, n):
        raise ConfigError(f"inconsistent shapes a{a.shape} b{b.shape} q{q.shape}")
    m = b.shape[1]
    if r.shape != (m, m):
        raise ConfigError(f"r must be {m}x{m}, got {r.shape}")
    for name, mat in (("a", a), ("b", b), ("q", q), ("r", r)):
        if not np.all(np.isfinite(mat)):
            raise NumericFailure(f"{name} has non-finite entries")
    if not np.allclose(q, q.T, atol=1e-12 * max(1.0, np.abs(q).max())):
        raise ConfigError("q must be symmetric")
    if not np.allclose(r, r.T):
        raise ConfigError("r must be symmetric")
    if np.linalg.eigvalsh(r).min() <= 0:
        raise ConfigError("r must be positive definite")
    return a, b, 0.5 * (q + q.T), 0.5 * (r + r.T)


def _normalized(res: np.ndarray, p: np.ndarray) -> float:
    return float(np.linalg.norm(res, "fro") / max(1.0, np.linalg.norm(p, "fro")))


def care_residual(a, b, q, r, p) -> float:
    """``||A'P + PA - PBR^-1B'P + Q||_F / max(1, ||P||_F)``."""
    bt_p = b.T @ p
    res = a.T @ p + p @ a - bt_p.T @ np.linalg.solve(r, bt_p) + q
    return _normalized(res, p)


def dare_residual(g, h, q, r, p) -> float:
    ht_p_g = h.T @ p @ g
    s = r + h.T @ p @ h
    res = q + g.T @ p @ g - ht_p_g.T @ np.linalg.solve(s, ht_p_g) - p
    return _normalized(res, p)


def _finish(p, residual, feedback, closed_loop, kind, tol):
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(feedback))):
        raise NumericFailure(f"{kind}: non-finite solution")
    if kind == "care":
        stable = np.max(closed_loop.real) < -STABILITY_MARGIN
    else:
        stable = np.max(np.abs(closed_loop)) < 1.0 - STABILITY_MARGIN
    if not stable:
        raise NotStabilizableError(f"{kind}: solution is not stabilizing")
    if residual > tol:
        raise ConvergenceError(f"{kind}: normalized residual {residual:.3e} exceeds {tol:.1e}")
    p.setflags(write=False)
    feedback.setflags(write=False)
    return RiccatiSolution(p, residual, feedback, closed_loop, kind)


def solve_care(a, b, q, r, tol: float = RESIDUAL_TOL, newton_steps: int = 6) -> RiccatiSolution:
    """Stabilizing solution of ``A'P + PA - PBR^-1B'P + Q = 0``.

    The returned ``feedback`` is ``F = R^-1 B' P`` for the law ``u = -F x``.
    """
    a, b, q, r = _prepare(a, b, q, r)
    try:
        with np.errstate(all="ignore"):
            p = scipy.linalg.solve_continuous_are(a, b, q, r)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NotStabilizableError(f"care: {exc}") from exc
    if not np.all(np.isfinite(p)):
        raise NumericFailure("care: non-finite solution")
    p = 0.5 * (p + p.T)
    res = care_residual(a, b, q, r, p)
    for _ in range(newton_steps):
        if res <= 0.01 * tol:
            break
        f = np.linalg.solve(r, b.T @ p)
        ac = a - b @ f
        if np.max(np.linalg.eigvals(ac).real) >= 0:
            break
        with np.errstate(all="ignore"):
            p_new = scipy.linalg.solve_continuous_lyapunov(ac.T, -(q + f.T @ r @ f))
        p_new = 0.5 * (p_new + p_new.T)
        if not np.all(np.isfinite(p_new)):
            break
        res_new = care_residual(a, b, q, r, p_new)
        if res_new >= res:
            break
        p, res = p_new, res_new
    f = np.linalg.solve(r, b.T @ p)
    closed = np.linalg.eigvals(a - b @ f)
    return _finish(p, res, f, closed, "care", tol)


def solve_dare(g, h, q, r, tol: float = RESIDUAL_TOL, newton_steps: int = 6) -> RiccatiSolution:
    """Stabilizing solution of ``P = Q + G'PG - G'PH(R + H'PH)^-1 H'PG``.

    The returned ``feedback`` is ``F = (R + H'PH)^-1 H'PG``.
    """
    g, h, q, r = _prepare(g, h, q, r)
    try:
        with np.errstate(all="ignore"):
            p = scipy.linalg.solve_discrete_are(g, h, q, r)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NotStabilizableError(f"dare: {exc}") from exc
    if not np.all(np.isfinite(p)):
        raise NumericFailure("dare: non-finite solution")
    p = 0.5 * (p + p.T)
    res = dare_residual(g, h, q, r, p)

    def gain(pm):
        return np.linalg.solve(r + h.T @ pm @ h, h.T @ pm @ g)

    for _ in range(newton_steps):
        if res <= 0.01 * tol:
            break
        f = gain(p)
        gc = g - h @ f
        if np.max(np.abs(np.linalg.eigvals(gc))) >= 1:
            break
        with np.errstate(all="ignore"):
            p_new = scipy.linalg.solve_discrete_lyapunov(gc.T, q + f.T @ r @ f)
        p_new = 0.5 * (p_new + p_new.T)
        if not np.all(np.isfinite(p_new)):
            break
        res_new = dare_residual(g, h, q, r, p_new)
        if res_new >= res:
            break
        p, res = p_new, res_new
    f = gain(p)
    closed = np.linalg.eigvals(g - h @ f)
    return _finish(p, res, f, closed, "dare", tol)


def symmetric_eigenvalues(s, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm is at most
    ``tol * max(1, ||s||_F)``.
    """
    s = np.array(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise NumericFailure("matrix has non-finite entries")
    scale = max(1.0, np.linalg.norm(s, "fro"))
    if np.max(np.abs(s - s.T), initial=0.0) > 1e-8 * scale:
        raise ConfigError("matrix is not symmetric")
    s = 0.5 * (s + s.T)
    n = s.shape[0]

    def off(m):
        return float(np.linalg.norm(m - np.diag(np.diag(m))))

    for _ in range(max_sweeps):
        if off(s) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = s[p, q]
                if apq == 0.0:
                    continue
                theta = (s[q, q] - s[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = sn
                rot[q, p] = -sn
                s = rot.T @ s @ rot
                s[p, q] = s[q, p] = 0.0
    else:
        raise NumericFailure("Jacobi iteration did not converge")
    return np.sort(np.diag(s))
