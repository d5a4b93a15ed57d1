"""Cart-pole simulator with Euler integration.

Frictionless track and hinge, fixed-magnitude bang-bang force. All state
arithmetic is done on Python floats; a single step is far too small for
numpy to pay off.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class SimulationError(ArithmeticError):
    """Raised when the integrator produces a non-finite state."""


class CartPoleState(NamedTuple):
    x: float = 0.0
    x_dot: float = 0.0
    theta: float = 0.0
    theta_dot: float = 0.0

    def negate(self) -> "CartPoleState":
        return CartPoleState(-self.x, -self.x_dot, -self.theta, -self.theta_dot)


@dataclass(frozen=True)
class EnvConfig:
    """Physical constants, failure bounds and initial-state sampling ranges.

    ``init_fractions`` scales the sampling half-ranges
    ``(x_fail, velocity_range, theta_fail, angular_velocity_range)`` used by
    :func:`random_initial_state`.
    """

    dt: float = 0.02
    gravity: float = 9.8
    cart_mass: float = 1.0
    pole_mass: float = 0.1
    pole_half_length: float = 0.5
    force_magnitude: float = 10.0
    theta_fail: float = 12.0 * math.pi / 180.0
    x_fail: float = 2.4
    velocity_range: float = 1.0
    angular_velocity_range: float = 1.0
    init_fractions: tuple = (0.2, 0.5, 0.2, 0.5)

    def __post_init__(self):
        for name in ("dt", "gravity", "cart_mass", "pole_mass", "pole_half_length",
                     "force_magnitude", "theta_fail", "x_fail",
                     "velocity_range", "angular_velocity_range"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        fr = tuple(float(v) for v in self.init_fractions)
        if len(fr) != 4 or not all(0.0 <= v <= 1.0 for v in fr):
            raise ValueError("init_fractions must be four numbers in [0, 1]")
        object.__setattr__(self, "init_fractions", fr)

    @property
    def total_mass(self) -> float:
        return self.cart_mass + self.pole_mass


DEFAULT_ENV = EnvConfig()


def accelerations(state: CartPoleState, force: float, cfg: EnvConfig = DEFAULT_ENV):
    """Return ``(theta_ddot, x_ddot)`` for the given state and applied force."""
    _, _, theta, theta_dot = state
    total_mass = cfg.cart_mass + cfg.pole_mass
    ml = cfg.pole_mass * cfg.pole_half_length
    sin_t = math.sin(theta)
    cos_t = math.cos(theta)

    temp = (force + ml * theta_dot * theta_dot * sin_t) / total_mass
    theta_acc = (cfg.gravity * sin_t - cos_t * temp) / (
        cfg.pole_half_length * (4.0 / 3.0 - cfg.pole_mass * cos_t * cos_t / total_mass)
    )
    x_acc = temp - ml * theta_acc * cos_t / total_mass
    return theta_acc, x_acc


def step(state: CartPoleState, force: float, cfg: EnvConfig = DEFAULT_ENV) -> CartPoleState:
    """Advance the system one time step.

    Positions are advanced with the velocities from before the step.
    """
    x, x_dot, theta, theta_dot = state
    theta_acc, x_acc = accelerations(state, force, cfg)
    dt = cfg.dt
    nxt = CartPoleState(
        x + dt * x_dot,
        x_dot + dt * x_acc,
        theta + dt * theta_dot,
        theta_dot + dt * theta_acc,
    )
    if not all(map(math.isfinite, nxt)):
        raise SimulationError(f"non-finite cart-pole state {nxt} after force {force}")
    return nxt


def is_failure(state: CartPoleState, cfg: EnvConfig = DEFAULT_ENV) -> bool:
    return abs(state.theta) > cfg.theta_fail or abs(state.x) > cfg.x_fail


def _init_half_ranges(cfg: EnvConfig) -> np.ndarray:
    fx, fv, ft, fw = cfg.init_fractions
    return np.array([
        cfg.x_fail * fx,
        cfg.velocity_range * fv,
        cfg.theta_fail * ft,
        cfg.angular_velocity_range * fw,
    ])


def random_initial_states(rng: np.random.Generator, count: int, cfg: EnvConfig = DEFAULT_ENV) -> np.ndarray:
    """Draw ``count`` initial states as a ``(count, 4)`` array.

    Each component is uniform on its half-range scaled by
    ``cfg.init_fractions``. Row i consumes uniforms ``4i .. 4i+3`` of the
    stream, so ``count`` draws match ``count`` calls of
    :func:`random_initial_state`.
    """
    u = rng.uniform(-1.0, 1.0, size=(count, 4))
    return u * _init_half_ranges(cfg)


def random_initial_state(rng: np.random.Generator, cfg: EnvConfig = DEFAULT_ENV) -> CartPoleState:
    return CartPoleState(*(float(v) for v in random_initial_states(rng, 1, cfg)[0]))
