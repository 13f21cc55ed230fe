"""Gradient-descent training of the two reservoir couplings.

Forward model is the closed-form steady-state magnetization

    A(J1, J2) = (J1^2 <sz1> + J2^2 <sz2>) / (J1^2 + J2^2),

cost C = (Y - A)^2 / 2, update dJ_i = -eta dC/dJ_i.  A depends on the squares
of the couplings, so descent does not constrain their sign; report |J_i|.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError


@dataclass(frozen=True)
class TrainConfig:
    eta: float
    target: float
    sz: tuple[float, float]
    j_init: tuple[float, float]
    max_iters: int = 200_000
    cost_tol: float = 5e-7

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be >= 0")
        if not -1.0 <= self.target <= 1.0:
            raise ValueError("target magnetization must lie in [-1, 1]")
        lo, hi = min(self.sz), max(self.sz)
        if not lo <= self.target <= hi:
            warnings.warn(
                f"target {self.target} outside the reachable band [{lo}, {hi}];"
                " descent will stall at a boundary",
                stacklevel=2,
            )


@dataclass
class TrainTrace:
    rows: list[tuple[int, float, float, float, float]] = field(default_factory=list)
    converged: bool = False

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    @property
    def final(self) -> tuple[int, float, float, float, float]:
        return self.rows[-1]


def actual_magnetization(j: tuple[float, float], sz: tuple[float, float]) -> float:
    j1, j2 = j
    jsum = j1 * j1 + j2 * j2
    if jsum <= 0:
        raise ValueError("at least one coupling must be nonzero")
    return (j1 * j1 * sz[0] + j2 * j2 * sz[1]) / jsum


def cost(target: float, actual: float) -> float:
    return 0.5 * (target - actual) ** 2


def gradient(
    j: tuple[float, float], sz: tuple[float, float], target: float
) -> tuple[float, float]:
    """dC/dJ_i = (Y - A) * (-dA/dJ_i), with dA/dJ_i = 2 J_i (<sz_i> - A) / (J1^2 + J2^2)."""
    j1, j2 = j
    jsum = j1 * j1 + j2 * j2
    if jsum <= 0:
        raise ValueError("at least one coupling must be nonzero")
    a = actual_magnetization(j, sz)
    da1 = 2 * j1 * (sz[0] - a) / jsum
    da2 = 2 * j2 * (sz[1] - a) / jsum
    err = target - a
    return (-err * da1, -err * da2)


def train(config: TrainConfig) -> TrainTrace:
    """Descend until cost <= cost_tol or max_iters; every iteration is traced.

    Raises DivergenceError (naming the learning rate) when the cost grows past
    ten times its initial value.
    """
    j1, j2 = config.j_init
    trace = TrainTrace()
    a = actual_magnetization((j1, j2), config.sz)
    c = cost(config.target, a)
    initial_cost = c
    trace.rows.append((0, j1, j2, a, c))
    for it in range(1, config.max_iters + 1):
        if c <= config.cost_tol:
            break
        g1, g2 = gradient((j1, j2), config.sz, config.target)
        j1 -= config.eta * g1
        j2 -= config.eta * g2
        a = actual_magnetization((j1, j2), config.sz)
        c = cost(config.target, a)
        trace.rows.append((it, j1, j2, a, c))
        if c > 10 * initial_cost and c > 1e-12:
            raise DivergenceError(
                f"cost {c:.3g} exceeded 10x initial {initial_cost:.3g}"
                f" at learning rate eta={config.eta}"
            )
    trace.converged = c <= config.cost_tol
    return trace


def cost_surface(
    j1_grid: np.ndarray,
    j2_grid: np.ndarray,
    sz: tuple[float, float],
    target: float,
) -> np.ndarray:
    """cost(target, A(J1, J2)) on the outer grid; rows index j1_grid."""
    j1 = np.asarray(j1_grid, dtype=float)[:, None]
    j2 = np.asarray(j2_grid, dtype=float)[None, :]
    jsum = j1 * j1 + j2 * j2
    with np.errstate(invalid="ignore", divide="ignore"):
        a = (j1 * j1 * sz[0] + j2 * j2 * sz[1]) / jsum
    a = np.where(jsum > 0, a, np.nan)
    return 0.5 * (target - a) ** 2
