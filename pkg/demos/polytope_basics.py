"""
The polytope minimizer on textbook functions
============================================

Build a simplex, take single iterations to see which move fires, then run
to convergence on the Rosenbrock valley.
"""

import numpy as np

from polytope_rl import optimizer as nm


def rosenbrock(p):
    return (1 - p[0]) ** 2 + 100 * (p[1] - p[0] ** 2) ** 2


# A small triangle next to the classic starting point (-1.2, 1).
start = np.array([-1.2, 1.0])
simplex = nm.Simplex.from_points([start, start + [0.1, 0], start + [0, 0.1]], rosenbrock)

# One iteration at a time: each step reports the move it made and its cost.
s = simplex
for i in range(8):
    s, calls, move = nm.step(s, rosenbrock)
    print(f"iter {i}: {move:<22} {calls} call(s)  best f = {s.values.min():.4g}")

# Full run. epsilon bounds the mean absolute deviation of the vertex values.
out = nm.run(simplex, rosenbrock, nm.PolytopeConfig(epsilon=1e-14, max_evaluations=5000))
print(out.termination_reason.value, out.iterations, "iterations,", out.evaluations_used, "evaluations")
print("best point", out.best_point, "f =", out.best_value)

# The engine only minimizes; to maximize g, hand it -g.
g = lambda p: -((p[0] - 3) ** 2) - (p[1] + 1) ** 2  # noqa: E731
s0 = nm.Simplex.from_points([[0, 0], [1, 0], [0, 1]], lambda p: -g(p))
print("argmax of g:", nm.run(s0, lambda p: -g(p), nm.PolytopeConfig(epsilon=1e-12)).best_point)
