"""Episodic objective and the restart strategy wrapped around the polytope engine."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import env as cartpole
from .linesearch import LineSearchConfig, build_initial_simplex
from .net import DEFAULT_TOPOLOGY, ActionNetwork, Topology, parameter_count, scale_state
from .optimizer import PolytopeConfig, run

# Two probes per axis keep simplex construction (2n + 1 = 71 cycles for the
# default network) inside the 100-cycle probe budget. A unit step lets the
# first simplex reach weights well outside the (-0.5, 0.5) start box.
TRAINING_LINE_SEARCH = LineSearchConfig(probes_per_direction=2, step_magnitude=1.0)


class Cause(enum.Enum):
    FAILURE = "failure"
    REACHED_MAX_STEPS = "reached_max_steps"


@dataclass(frozen=True)
class CycleOutcome:
    steps_survived: int
    cause: Cause


@dataclass(frozen=True)
class StrategyConfig:
    probe_evaluations: int = 100
    probe_success_steps: int = 100
    continuation_evaluations: int = 750
    max_restarts: int = 15
    max_total_evaluations: int = 15_000
    max_cycle_steps: int = 10_000
    stochastic_prefix_steps: int = 10
    weight_init_range: float = 0.5
    probe_includes_construction: bool = True

    def __post_init__(self):
        for name in ("probe_evaluations", "probe_success_steps", "continuation_evaluations",
                     "max_restarts", "max_total_evaluations", "max_cycle_steps",
                     "stochastic_prefix_steps"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not self.weight_init_range > 0:
            raise ValueError("weight_init_range must be positive")


PAPER_STRATEGY = StrategyConfig(max_cycle_steps=120_000)


@dataclass
class TrainingReport:
    succeeded: bool
    total_evaluations: int
    restarts_used: int
    best_weights: np.ndarray
    best_cycle_steps: int
    per_restart_log: list = field(default_factory=list)  # (evaluations, best_steps) per restart


def evaluate_cycle(
    network,
    rng: np.random.Generator,
    env_cfg: cartpole.EnvConfig = cartpole.DEFAULT_ENV,
    strategy: StrategyConfig = StrategyConfig(),
    topology: Topology = DEFAULT_TOPOLOGY,
    initial_state: Optional[cartpole.CartPoleState] = None,
) -> CycleOutcome:
    """Run one episode and count the steps survived.

    ``network`` is an :class:`ActionNetwork` or a flat parameter vector.
    Unless ``initial_state`` is given, four uniforms are drawn from ``rng``
    for the start state; then one uniform per stochastic prefix step. During
    the prefix the force is +F with probability y; afterwards it is +F iff
    y > 0.5. The step that causes failure is not counted.
    """
    if not isinstance(network, ActionNetwork):
        network = ActionNetwork(network, topology)
    state = cartpole.random_initial_state(rng, env_cfg) if initial_state is None else initial_state
    max_steps = strategy.max_cycle_steps
    prefix = min(strategy.stochastic_prefix_steps, max_steps)
    coins = rng.random(prefix).tolist() if prefix else []

    magnitude = env_cfg.force_magnitude
    step, is_failure = cartpole.step, cartpole.is_failure
    for t in range(max_steps):
        y = network(scale_state(state))
        if t < prefix:
            push = coins[t] < y
        else:
            push = y > 0.5
        state = step(state, magnitude if push else -magnitude, env_cfg)
        if is_failure(state, env_cfg):
            return CycleOutcome(t, Cause.FAILURE)
    return CycleOutcome(max_steps, Cause.REACHED_MAX_STEPS)


def objective_from_cycle(steps_survived: int) -> float:
    """Minimization objective for a cycle: the negated cycle length."""
    return -float(steps_survived)


def cycle_objective(rng, env_cfg=cartpole.DEFAULT_ENV, strategy=StrategyConfig(), topology=DEFAULT_TOPOLOGY):
    """Objective ``params -> -(cycle length)`` drawing every episode from ``rng``."""
    def objective(params):
        return objective_from_cycle(evaluate_cycle(params, rng, env_cfg, strategy, topology).steps_survived)
    return objective


def restart_rng(seed_seq: np.random.SeedSequence, restart: int) -> np.random.Generator:
    """Generator for restart ``restart``: child ``restart`` of ``seed_seq``."""
    child = np.random.SeedSequence(seed_seq.entropy, spawn_key=tuple(seed_seq.spawn_key) + (restart,))
    return np.random.Generator(np.random.PCG64(child))


class _CycleSucceeded(Exception):
    pass


def run_training(
    seed,
    env_cfg: cartpole.EnvConfig = cartpole.DEFAULT_ENV,
    strategy: StrategyConfig = StrategyConfig(),
    polytope: PolytopeConfig = PolytopeConfig(),
    line_search: LineSearchConfig = TRAINING_LINE_SEARCH,
    topology: Topology = DEFAULT_TOPOLOGY,
    cycle_fn: Optional[Callable[[np.ndarray, np.random.Generator], int]] = None,
) -> TrainingReport:
    """Train an action network with the polytope method and random restarts.

    Each restart draws a fresh first vertex uniformly in
    ``(-weight_init_range, weight_init_range)^n``, builds the initial simplex
    by line searches, and runs the optimizer until the restart has spent
    ``probe_evaluations`` cycles (simplex construction included). If some
    cycle of the restart lasted more than ``probe_success_steps`` steps the
    same simplex is optimized for ``continuation_evaluations`` more cycles;
    otherwise, or if that also fails, the next restart begins.

    Training ends successfully the moment any cycle reaches
    ``max_cycle_steps``. It ends unsuccessfully after ``max_restarts``
    restarts or once ``max_total_evaluations`` cycles have been spent. The
    budget is checked between optimizer steps, so one step (at most n + 2
    cycles) may overshoot it.

    Parameters
    ----------
    seed : int or numpy.random.SeedSequence
        Restart r draws all of its randomness from child r of this seed.
    cycle_fn : callable, optional
        ``(params, rng) -> steps_survived`` replacement for
        :func:`evaluate_cycle`, for testing the strategy in isolation.
    """
    seed_seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    n = parameter_count(topology)
    if cycle_fn is None:
        def cycle_fn(params, rng):
            return evaluate_cycle(params, rng, env_cfg, strategy, topology).steps_survived

    total = 0
    best_steps = -1
    best_weights = np.zeros(n)
    log = []
    restarts = 0

    for restart in range(strategy.max_restarts):
        if total >= strategy.max_total_evaluations:
            break
        restarts += 1
        rng = restart_rng(seed_seq, restart)
        restart_best = -1
        start_total = total

        def objective(params):
            nonlocal total, best_steps, best_weights, restart_best
            steps = int(cycle_fn(params, rng))
            total += 1
            restart_best = max(restart_best, steps)
            if steps > best_steps:
                best_steps = steps
                best_weights = np.array(params, dtype=float)
            if steps >= strategy.max_cycle_steps:
                raise _CycleSucceeded
            return objective_from_cycle(steps)

        def remaining(phase_budget):
            return max(0, min(phase_budget, strategy.max_total_evaluations - total))

        try:
            first = rng.uniform(-strategy.weight_init_range, strategy.weight_init_range, size=n)
            simplex, _ = build_initial_simplex(first, objective, line_search)
            probe_left = strategy.probe_evaluations
            if strategy.probe_includes_construction:
                probe_left -= total - start_total
            outcome = run(simplex, objective, replace(polytope, max_evaluations=remaining(probe_left)))
            if restart_best > strategy.probe_success_steps:
                run(outcome.simplex, objective, replace(polytope, max_evaluations=remaining(strategy.continuation_evaluations)))
        except _CycleSucceeded:
            log.append((total - start_total, restart_best))
            return TrainingReport(True, total, restarts, best_weights, best_steps, log)
        log.append((total - start_total, restart_best))

    return TrainingReport(False, total, restarts, best_weights, max(best_steps, 0), log)




