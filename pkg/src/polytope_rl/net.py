"""Fixed-topology action network and its weight-file format.

One hidden layer of sigmoid units, one sigmoid output, and optional direct
input-to-output connections. Parameters live in one flat vector laid out as::

    [input->hidden weights, row-major (hidden x inputs)]
    [hidden biases (hidden)]
    [hidden->output weights (hidden)]
    [input->output shortcut weights (inputs), only with shortcuts]
    [output bias (1)]
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

# Raw state -> network input divisors: x, x_dot, theta, theta_dot.
INPUT_SCALES = (2.4, 2.0, 12.0 * math.pi / 180.0, 3.0)


class WeightFileError(ValueError):
    """Malformed weight file; ``lineno`` points at the offending line (1-based)."""

    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


@dataclass(frozen=True)
class Topology:
    inputs: int = 4
    hidden: int = 5
    outputs: int = 1
    shortcut: bool = True

    def __post_init__(self):
        if min(self.inputs, self.hidden, self.outputs) < 1:
            raise ValueError("layer sizes must be >= 1")

    @property
    def parameter_count(self) -> int:
        return parameter_count(self)

    def header(self) -> str:
        tag = "shortcut" if self.shortcut else "noshortcut"
        return f"topology {self.inputs} {self.hidden} {self.outputs} {tag}"


DEFAULT_TOPOLOGY = Topology()


def parameter_count(t: Topology = DEFAULT_TOPOLOGY) -> int:
    count = t.inputs * t.hidden + t.hidden + t.hidden * t.outputs + t.outputs
    if t.shortcut:
        count += t.inputs * t.outputs
    return count


class Layers(NamedTuple):
    hidden_weights: np.ndarray   # (hidden, inputs)
    hidden_bias: np.ndarray      # (hidden,)
    output_weights: np.ndarray   # (outputs, hidden)
    shortcut_weights: np.ndarray  # (outputs, inputs); zeros without shortcuts
    output_bias: np.ndarray      # (outputs,)


def unflatten(params, t: Topology = DEFAULT_TOPOLOGY) -> Layers:
    p = np.asarray(params, dtype=float).ravel()
    if p.size != parameter_count(t):
        raise ValueError(f"expected {parameter_count(t)} parameters for {t}, got {p.size}")
    i, h, o = t.inputs, t.hidden, t.outputs
    pos = 0

    def take(size):
        nonlocal pos
        chunk = p[pos:pos + size]
        pos += size
        return chunk.copy()

    w = take(h * i).reshape(h, i)
    b = take(h)
    v = take(h * o).reshape(o, h)
    s = take(i * o).reshape(o, i) if t.shortcut else np.zeros((o, i))
    b_out = take(o)
    return Layers(w, b, v, s, b_out)


def flatten(layers: Layers, t: Topology = DEFAULT_TOPOLOGY) -> np.ndarray:
    parts = [layers.hidden_weights.ravel(), layers.hidden_bias.ravel(), layers.output_weights.ravel()]
    if t.shortcut:
        parts.append(layers.shortcut_weights.ravel())
    parts.append(layers.output_bias.ravel())
    return np.concatenate(parts).astype(float)


def sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def scale_state(state) -> tuple:
    """Divide a raw ``(x, x_dot, theta, theta_dot)`` state by :data:`INPUT_SCALES`."""
    return tuple(v / s for v, s in zip(state, INPUT_SCALES))


class ActionNetwork:
    """Single-output network evaluated with scalar float arithmetic.

    Weights are unpacked once into tuples so that calling the network inside
    a simulation loop stays cheap.
    """

    def __init__(self, params, topology: Topology = DEFAULT_TOPOLOGY):
        if topology.outputs != 1:
            raise ValueError("ActionNetwork supports a single output unit")
        self.topology = topology
        self.params = np.array(params, dtype=float).ravel()
        layers = unflatten(self.params, topology)
        self._hidden = tuple(
            (tuple(float(x) for x in row), float(bias))
            for row, bias in zip(layers.hidden_weights, layers.hidden_bias)
        )
        self._out = tuple(float(x) for x in layers.output_weights[0])
        self._shortcut = tuple(float(x) for x in layers.shortcut_weights[0])
        self._out_bias = float(layers.output_bias[0])

    def __call__(self, inputs: Sequence[float]) -> float:
        if len(inputs) != self.topology.inputs:
            raise ValueError(f"expected {self.topology.inputs} inputs, got {len(inputs)}")
        if not all(math.isfinite(v) for v in inputs):
            raise ValueError(f"non-finite network input {tuple(inputs)}")
        total = self._out_bias
        for (row, bias), v in zip(self._hidden, self._out):
            z = bias
            for w, a in zip(row, inputs):
                z += w * a
            total += v * sigmoid(z)
        for s, a in zip(self._shortcut, inputs):
            total += s * a
        return sigmoid(total)


def forward(params, inputs, topology: Topology = DEFAULT_TOPOLOGY) -> float:
    """Network output y in (0, 1) for already-scaled ``inputs``."""
    return ActionNetwork(params, topology)([float(v) for v in inputs])


def save_weights(path, params, topology: Topology = DEFAULT_TOPOLOGY) -> None:
    p = np.asarray(params, dtype=float).ravel()
    if p.size != parameter_count(topology):
        raise ValueError(f"expected {parameter_count(topology)} parameters, got {p.size}")
    with open(path, "w") as fh:
        fh.write(format_weights(p, topology))


def format_weights(params, topology: Topology = DEFAULT_TOPOLOGY) -> str:
    p = np.asarray(params, dtype=float).ravel()
    lines = [topology.header(), str(p.size)]
    lines.extend(repr(float(v)) for v in p)
    return "\n".join(lines) + "\n"


def load_weights(path) -> tuple[np.ndarray, Topology]:
    """Read a weight file; raise :class:`WeightFileError` on any defect."""
    path = os.fspath(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise WeightFileError(path, 1, "empty file")

    fields = lines[0].split()
    if len(fields) != 5 or fields[0] != "topology" or fields[4] not in ("shortcut", "noshortcut"):
        raise WeightFileError(path, 1, f"expected 'topology <in> <hidden> <out> shortcut|noshortcut', got {lines[0]!r}")
    try:
        topology = Topology(int(fields[1]), int(fields[2]), int(fields[3]), fields[4] == "shortcut")
    except ValueError as exc:
        raise WeightFileError(path, 1, str(exc)) from None

    if len(lines) < 2:
        raise WeightFileError(path, 2, "missing parameter count")
    try:
        n = int(lines[1])
    except ValueError:
        raise WeightFileError(path, 2, f"parameter count is not an integer: {lines[1]!r}") from None
    expected = parameter_count(topology)
    if n != expected:
        raise WeightFileError(path, 2, f"parameter count mismatch: expected {expected}, found {n}")

    body = lines[2:]
    if len(body) != n:
        lineno = 2 + min(len(body), n) + 1
        raise WeightFileError(path, lineno, f"expected {n} parameter lines, found {len(body)}")
    values = np.empty(n)
    for k, text in enumerate(body):
        try:
            values[k] = float(text)
        except ValueError:
            raise WeightFileError(path, k + 3, f"not a number: {text!r}") from None
        if not math.isfinite(values[k]):
            raise WeightFileError(path, k + 3, f"non-finite parameter {text!r}")
    return values, topology
