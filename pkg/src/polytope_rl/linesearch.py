"""Initial simplex construction by coarse line searches along the coordinate axes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .optimizer import Objective, Simplex


@dataclass(frozen=True)
class LineSearchConfig:
    """Probe pattern for the per-axis line searches.

    Offsets are taken in the fixed order ``+s, -s, +s/2, -s/2, +s/4, ...``
    and truncated to ``probes_per_direction`` entries.
    """

    probes_per_direction: int = 4
    step_magnitude: float = 0.5
    direction_set: str = "coordinate_axes"

    def __post_init__(self):
        if self.probes_per_direction < 2:
            raise ValueError("probes_per_direction must be >= 2")
        if not self.step_magnitude > 0:
            raise ValueError("step_magnitude must be > 0")
        if self.direction_set != "coordinate_axes":
            raise ValueError(f"unsupported direction_set {self.direction_set!r}")

    def offsets(self) -> list[float]:
        out = []
        scale = self.step_magnitude
        while len(out) < self.probes_per_direction:
            out.extend([scale, -scale])
            scale /= 2.0
        return out[: self.probes_per_direction]


def build_initial_simplex(first_vertex, objective: Objective, config: LineSearchConfig = LineSearchConfig()):
    """Build n+1 vertices from ``first_vertex`` plus one best probe per axis.

    For axis i every offset in ``config.offsets()`` is evaluated at
    ``first_vertex + offset * e_i`` and the lowest value wins (ties go to the
    earlier offset). The zero offset is never a candidate, so vertex i differs
    from the first vertex in coordinate i only and the simplex is
    nondegenerate.

    Returns
    -------
    simplex : Simplex
    evaluations : int
        Always ``n * probes_per_direction + 1``.
    """
    x0 = np.array(first_vertex, dtype=float).ravel()
    n = x0.size
    if n < 1:
        raise ValueError("first_vertex must have at least one coordinate")

    points = np.tile(x0, (n + 1, 1))
    values = np.empty(n + 1)
    values[0] = float(objective(x0.copy()))
    evaluations = 1

    offsets = config.offsets()
    for i in range(n):
        best_val = None
        for offset in offsets:
            probe = x0.copy()
            probe[i] += offset
            val = float(objective(probe.copy()))
            evaluations += 1
            if best_val is None or val < best_val:
                best_val = val
                points[i + 1] = probe
        values[i + 1] = best_val

    return Simplex(points, values), evaluations
