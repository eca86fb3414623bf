"""Cost of control from Riccati solutions, and choice of the index order."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .riccati import symmetric_eigenvalues
from .ssmodel import SecondOrderPlant


def cost_of_control(p, x0) -> float:
    """Infinite-horizon LQR cost ``x0' P x0`` from initial state ``x0``."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    x0 = np.asarray(x0, dtype=float).ravel()
    if p.shape != (x0.size, x0.size):
        raise ConfigError(f"P is {p.shape} but x0 has {x0.size} entries")
    if not np.allclose(p, p.T, rtol=0, atol=1e-8 * max(1.0, np.abs(p).max())):
        raise ConfigError("P must be symmetric")
    return float(x0 @ p @ x0)


@dataclass(frozen=True, eq=False)
class RiccatiComparison:
    eigenvalues: np.ndarray
    positive_definite: bool

    def as_dict(self, decimals: int | None = None) -> dict:
        eig = [float(v) for v in self.eigenvalues]
        if decimals is not None:
            eig = [round(v, decimals) for v in eig]
        return {"eigenvalues": eig, "positive_definite": self.positive_definite}


def compare_riccati(p_a, p_b) -> RiccatiComparison:
    """Spectrum of ``p_a - p_b``.

    A positive-definite difference means ``p_a`` costs more than ``p_b`` from
    every nonzero initial state.
    """
    a = np.atleast_2d(np.asarray(p_a, dtype=float))
    b = np.atleast_2d(np.asarray(p_b, dtype=float))
    if a.shape != b.shape:
        raise ConfigError(f"shape mismatch {a.shape} vs {b.shape}")
    for name, m in (("p_a", a), ("p_b", b)):
        if not np.allclose(m, m.T, rtol=0, atol=1e-8 * max(1.0, np.abs(m).max())):
            raise ConfigError(f"{name} is not symmetric")
    eig = symmetric_eigenvalues(a - b)
    return RiccatiComparison(eig, bool(eig[0] > 0))


def recommend_order(plant: SecondOrderPlant) -> float:
    """0.5 for oscillatory plants (xi < 1), 1.5 otherwise."""
    return 0.5 if plant.xi < 1 else 1.5
