"""Nelder-Mead polytope minimizer over an opaque objective callback.

The engine minimizes. Callers that maximize a quantity hand in its negation.
Vertex values are cached on the simplex and never re-evaluated, so a noisy
objective is sampled exactly once per visited point.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Objective = Callable[[np.ndarray], float]

REFLECT_ACCEPT = "reflect-accept"
EXPAND_ACCEPT = "expand-accept"
REFLECT_AFTER_EXPAND = "reflect-after-expand"
CONTRACT_ACCEPT = "contract-accept"
SHRINK = "shrink"


class Termination(enum.Enum):
    CONVERGED = "converged"
    BUDGET_EXHAUSTED = "budget_exhausted"
    EXTERNAL_STOP = "external_stop"


@dataclass(frozen=True)
class PolytopeConfig:
    """Coefficients and stopping limits for the polytope iteration.

    ``max_iterations`` is optional and only used by callers that want an
    iteration cap in addition to the evaluation budget.
    """

    alpha: float = 1.0
    gamma: float = 2.0
    beta: float = 0.5
    epsilon: float = 1e-8
    max_evaluations: int = 10_000
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.gamma > 1:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.max_evaluations < 0:
            raise ValueError("max_evaluations must be >= 0")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")


@dataclass
class Simplex:
    """n+1 vertices in R^n with their cached objective values.

    Attributes
    ----------
    points : (n+1, n) float array
    values : (n+1,) float array
    """

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.points = np.array(self.points, dtype=float)
        self.values = np.array(self.values, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("points must be a 2-d array of shape (n+1, n)")
        m, n = self.points.shape
        if n < 1 or m != n + 1:
            raise ValueError(f"a simplex in R^{n} needs {n + 1} vertices, got {m}")
        if self.values.shape != (m,):
            raise ValueError(f"expected {m} values, got shape {self.values.shape}")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def copy(self) -> "Simplex":
        return Simplex(self.points.copy(), self.values.copy())

    @classmethod
    def from_points(cls, points, objective: Objective) -> "Simplex":
        """Evaluate ``objective`` once at every point (in order)."""
        points = np.array(points, dtype=float)
        values = [float(objective(p.copy())) for p in points]
        return cls(points, values)


@dataclass
class OptimizerOutcome:
    best_point: np.ndarray
    best_value: float
    evaluations_used: int
    iterations: int
    termination_reason: Termination
    simplex: Simplex


def sort_vertices(s: Simplex) -> Simplex:
    """Return a copy ordered by ascending value; ties keep their prior order."""
    order = np.argsort(s.values, kind="stable")
    return Simplex(s.points[order], s.values[order])


def centroid(s: Simplex) -> np.ndarray:
    """Mean of all vertices except the last (worst, once sorted)."""
    return s.points[:-1].sum(axis=0) / s.dim


def reflect(c: np.ndarray, worst: np.ndarray, alpha: float = 1.0) -> np.ndarray:
    return c + alpha * (c - worst)


def expand(c: np.ndarray, r: np.ndarray, gamma: float = 2.0) -> np.ndarray:
    return c + gamma * (r - c)


def contract(c: np.ndarray, target: np.ndarray, beta: float = 0.5) -> np.ndarray:
    return c + beta * (target - c)


def shrink(s: Simplex, objective: Objective) -> Simplex:
    """Pull every vertex halfway toward the first one and re-evaluate it.

    ``s`` must already be sorted. Costs exactly n evaluations.
    """
    points = s.points.copy()
    values = s.values.copy()
    for i in range(1, len(points)):
        points[i] = 0.5 * (points[0] + points[i])
        values[i] = float(objective(points[i].copy()))
    return Simplex(points, values)


def termination_measure(s: Simplex) -> float:
    """Mean absolute deviation of the vertex values from their mean."""
    f = s.values
    return float(np.mean(np.abs(f - np.mean(f))))


def step(s: Simplex, objective: Objective, config: PolytopeConfig = PolytopeConfig()):
    """Perform one polytope iteration.

    Returns
    -------
    simplex : Simplex
        The new simplex (the input is not modified).
    evaluations : int
        Objective calls consumed: 1, 2, or 2 + n.
    branch : str
        Which move was taken, one of the module-level branch labels.
    """
    s = sort_vertices(s)
    n = s.dim
    f = s.values
    worst = s.points[n]

    c = centroid(s)
    r = reflect(c, worst, config.alpha)
    fr = float(objective(r.copy()))

    if f[0] <= fr <= f[n - 1]:
        s.points[n], s.values[n] = r, fr
        return s, 1, REFLECT_ACCEPT

    if fr < f[0]:
        e = expand(c, r, config.gamma)
        fe = float(objective(e.copy()))
        if fe < fr:
            s.points[n], s.values[n] = e, fe
            return s, 2, EXPAND_ACCEPT
        s.points[n], s.values[n] = r, fr
        return s, 2, REFLECT_AFTER_EXPAND

    # fr > f[n-1] here
    target = worst if fr >= f[n] else r
    k = contract(c, target, config.beta)
    fk = float(objective(k.copy()))
    if fk < min(fr, f[n]):
        s.points[n], s.values[n] = k, fk
        return s, 2, CONTRACT_ACCEPT
    return shrink(s, objective), 2 + n, SHRINK


def run(
    initial: Simplex,
    objective: Objective,
    config: PolytopeConfig = PolytopeConfig(),
    stop: Optional[Callable[[], bool]] = None,
) -> OptimizerOutcome:
    """Iterate :func:`step` until a stopping rule fires.

    Stopping rules, checked before every iteration in this order: the
    termination measure drops to ``config.epsilon`` or below; the
    evaluation budget (or the optional iteration cap) is used up; the
    ``stop`` predicate returns True.

    A step is never started partway: a shrink may overshoot the evaluation
    budget by up to n + 1 calls.
    """
    s = initial.copy()
    evaluations = 0
    iterations = 0
    while True:
        if termination_measure(s) <= config.epsilon:
            reason = Termination.CONVERGED
            break
        if evaluations >= config.max_evaluations or (
            config.max_iterations is not None and iterations >= config.max_iterations
        ):
            reason = Termination.BUDGET_EXHAUSTED
            break
        if stop is not None and stop():
            reason = Termination.EXTERNAL_STOP
            break
        s, used, _ = step(s, objective, config)
        evaluations += used
        iterations += 1

    s = sort_vertices(s)
    return OptimizerOutcome(
        best_point=s.points[0].copy(),
        best_value=float(s.values[0]),
        evaluations_used=evaluations,
        iterations=iterations,
        termination_reason=reason,
        simplex=s,
    )
