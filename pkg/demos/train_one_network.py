"""
Training one controller with restarts
=====================================

Run the restart strategy once at desk scale (10000-step cycles) and test the
network it returns.
"""

import numpy as np

from polytope_rl.evaluator import generalization_test
from polytope_rl.trainer import StrategyConfig, run_training

strategy = StrategyConfig(max_cycle_steps=10_000)
report = run_training(seed=3, strategy=strategy)

print("succeeded:", report.succeeded)
print("cycles used:", report.total_evaluations, "restarts:", report.restarts_used)
# per restart: cycles spent and the longest cycle seen
for r, (cycles, best) in enumerate(report.per_restart_log):
    print(f"  restart {r}: {cycles:4d} cycles, longest {best} steps")

result = generalization_test(report.best_weights, np.random.default_rng(0), n_tests=500)
print(f"generalization: {result.successes}/{result.tests_run} starts ({result.success_percentage:.1f}%)")
