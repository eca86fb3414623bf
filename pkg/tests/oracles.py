"""Independent reference computations used only by the tests.

Nothing here imports the package; each oracle takes a different numerical
route from the code it checks.
"""

import math

import numpy as np
from scipy import integrate


def expm_taylor(m, terms=60):
    """Truncated Taylor series of exp(m), summed with scaling and squaring by 2^s."""
    m = np.asarray(m, dtype=float)
    s = max(0, int(math.ceil(math.log2(max(np.abs(m).sum(axis=0).max(), 1e-300)))) + 1)
    a = m / 2**s
    out = np.eye(m.shape[0])
    term = np.eye(m.shape[0])
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def zoh_taylor(a, b, ts, terms=60):
    """(G, H) with G = sum (a ts)^k/k!, H = sum a^k ts^(k+1)/(k+1)! b, plain series."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.shape[0]
    g = np.eye(n)
    h = np.eye(n) * ts
    term = np.eye(n)
    for k in range(1, terms):
        term = term @ a * ts / k
        g = g + term
        h = h + term * ts / (k + 1)
    return g, h @ b


def lyap_kron(a, q):
    """Solve a' X + X a + q = 0 by vectorization."""
    n = a.shape[0]
    eye = np.eye(n)
    lhs = np.kron(eye, a.T) + np.kron(a.T, eye)
    x = np.linalg.solve(lhs, -q.reshape(-1))
    x = x.reshape(n, n)
    return 0.5 * (x + x.T)


def care_newton_kleinman(a, b, q, r, f0, iters=60):
    """Kleinman iteration from a stabilizing gain ``f0``."""
    f = np.asarray(f0, dtype=float)
    p = None
    for _ in range(iters):
        ac = a - b @ f
        p_new = lyap_kron(ac, q + f.T @ r @ f)
        f = np.linalg.solve(r, b.T @ p_new)
        if p is not None and np.max(np.abs(p_new - p)) < 1e-14 * max(1, np.abs(p).max()):
            p = p_new
            break
        p = p_new
    return p


def dare_fixed_point(g, h, q, r, iters=200000, damping=0.5, tol=1e-14):
    """Damped Riccati difference iteration starting from P = Q."""
    p = q.copy()
    for _ in range(iters):
        s = r + h.T @ p @ h
        nxt = q + g.T @ p @ g - g.T @ p @ h @ np.linalg.solve(s, h.T @ p @ g)
        nxt = 0.5 * (nxt + nxt.T)
        new = damping * nxt + (1 - damping) * p
        if np.max(np.abs(new - p)) < tol * max(1.0, np.abs(p).max()):
            return new
        p = new
    raise RuntimeError("fixed-point iteration did not converge")


def rl_integral_quad(func, t, alpha):
    """I^alpha f(t) with adaptive quadrature and an algebraic end-point weight."""
    if t == 0:
        return 0.0
    val, _ = integrate.quad(func, 0.0, t, weight="alg", wvar=(0.0, alpha - 1.0), limit=5000)
    return val / math.gamma(alpha)


def ode_reference(a, b, u_const, x0, t_eval):
    """High-accuracy solution of xdot = a x + b u for constant u."""
    a = np.asarray(a, dtype=float)
    bu = (np.asarray(b, dtype=float) @ np.atleast_1d(u_const)).ravel()
    sol = integrate.solve_ivp(lambda t, x: a @ x + bu, (0.0, t_eval[-1]), x0, t_eval=t_eval,
                              method="DOP853", rtol=1e-13, atol=1e-14)
    return sol.y.T
