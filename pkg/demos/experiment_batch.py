"""
A batch of independent trainings
================================

The ``experiment`` command in script form: several seeded trainings, then
best / worst / mean / SD of the cycles each one needed. The same thing from
a shell::

    polytope-rl experiment --experiments 5 --seed 7 --generalization-tests 500 --out batch
"""

import numpy as np

from polytope_rl.cli import experiment_seed
from polytope_rl.evaluator import HIGHER_IS_BETTER, batch_stats, generalization_test
from polytope_rl.trainer import run_training

reports = [run_training(experiment_seed(7, i)) for i in range(5)]
ok = [r for r in reports if r.succeeded]
print(f"{len(ok)}/{len(reports)} succeeded")

cycles = batch_stats([r.total_evaluations for r in ok])
print(f"cycles: best {cycles.best:.0f} worst {cycles.worst:.0f} mean {cycles.mean:.0f} sd {cycles.sd:.0f}")

pct = [generalization_test(r.best_weights, np.random.default_rng(i), n_tests=300).success_percentage
       for i, r in enumerate(ok)]
gen = batch_stats(pct, HIGHER_IS_BETTER)
print(f"generalization %: best {gen.best:.1f} worst {gen.worst:.1f} mean {gen.mean:.1f} sd {gen.sd:.1f}")
