"""Generalization tests for trained networks and summary statistics over batches."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import env as cartpole
from .net import DEFAULT_TOPOLOGY, ActionNetwork, Topology
from .trainer import StrategyConfig, evaluate_cycle

LOWER_IS_BETTER = "lower_is_better"
HIGHER_IS_BETTER = "higher_is_better"


@dataclass(frozen=True)
class GeneralizationResult:
    tests_run: int
    successes: int
    success_percentage: float


@dataclass(frozen=True)
class BatchStats:
    best: float
    worst: float
    mean: float
    sd: float


def generalization_test(
    params,
    rng: np.random.Generator,
    env_cfg: cartpole.EnvConfig = cartpole.DEFAULT_ENV,
    n_tests: int = 5000,
    success_threshold: int = 1000,
    topology: Topology = DEFAULT_TOPOLOGY,
) -> GeneralizationResult:
    """Count the random starts from which the deterministic policy lasts.

    All ``n_tests`` initial states are drawn from ``rng`` up front (test i
    uses uniforms ``4i .. 4i+3``), so results do not depend on the order in
    which the episodes run. A test succeeds when the episode survives at
    least ``success_threshold`` steps; episodes stop at that point.
    """
    if n_tests <= 0:
        return GeneralizationResult(0, 0, 0.0)
    network = params if isinstance(params, ActionNetwork) else ActionNetwork(params, topology)
    starts = cartpole.random_initial_states(rng, n_tests, env_cfg)
    strategy = replace(StrategyConfig(), max_cycle_steps=success_threshold, stochastic_prefix_steps=0)

    successes = 0
    for row in starts.tolist():
        outcome = evaluate_cycle(network, rng, env_cfg, strategy, initial_state=cartpole.CartPoleState(*row))
        if outcome.steps_survived >= success_threshold:
            successes += 1
    return GeneralizationResult(n_tests, successes, 100.0 * successes / n_tests)


def batch_stats(values, orientation: str = LOWER_IS_BETTER) -> BatchStats:
    """Best, worst, mean and population standard deviation of ``values``."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("batch_stats needs at least one value")
    if orientation == LOWER_IS_BETTER:
        best, worst = v.min(), v.max()
    elif orientation == HIGHER_IS_BETTER:
        best, worst = v.max(), v.min()
    else:
        raise ValueError(f"unknown orientation {orientation!r}")
    return BatchStats(float(best), float(worst), float(v.mean()), float(v.std()))
