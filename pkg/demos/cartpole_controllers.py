"""
Cart-pole dynamics and hand-made controllers
============================================

Simulate the cart-pole with a few fixed action networks to get a feel for
cycle lengths before any training happens.
"""

import numpy as np

from polytope_rl import env, net
from polytope_rl.evaluator import generalization_test
from polytope_rl.trainer import StrategyConfig, evaluate_cycle

# One push from rest: the cart accelerates to +x, the pole tips to -theta.
print("accelerations after +10 N from rest:", env.accelerations(env.CartPoleState(), 10.0))

# Parameter vectors use the flat layout documented in polytope_rl.net.
# Indices 30..33 are the direct input->output weights, 34 is the output bias.
always_right = np.zeros(35)
always_right[34] = 50.0

linear = np.zeros(35)
linear[30:34] = [0.5, 1.0, 5.0, 3.0]  # push toward the side the pole leans

random_net = np.random.default_rng(0).uniform(-0.5, 0.5, 35)

cfg = StrategyConfig(max_cycle_steps=10_000)
for name, params in [("always right", always_right), ("random", random_net), ("linear", linear)]:
    lengths = [evaluate_cycle(params, np.random.default_rng(k), strategy=cfg).steps_survived for k in range(5)]
    print(f"{name:>12}: cycle lengths {lengths}")

# Generalization: deterministic policy from many random starts, success = 1000 steps.
r = generalization_test(linear, np.random.default_rng(1), n_tests=200)
print(f"linear controller balanced from {r.success_percentage:.1f}% of 200 starts")

# Weight files are plain text and round-trip exactly.
net.save_weights("linear_weights.txt", linear)
loaded, topology = net.load_weights("linear_weights.txt")
print(topology, np.array_equal(loaded, linear))
