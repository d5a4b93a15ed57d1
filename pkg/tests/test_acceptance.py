"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
The desk-scale training batch (criteria 5 to 8) is run once per session with
master seed ACCEPTANCE_SEED and shared through a module fixture.
"""
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from polytope_rl import cli, env, net
from polytope_rl import optimizer as nm
from polytope_rl.env import CartPoleState
from polytope_rl.evaluator import generalization_test

from conftest import ACCEPTANCE_LINES
from oracles import oracle_cartpole_step, oracle_polytope_step, oracle_termination_measure, rel_close

ACCEPTANCE_SEED = 1
DESK_EXPERIMENTS = 10
GENERALIZATION_TESTS = 1000
GENERALIZATION_THRESHOLD = 1000


def record(number, passed, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
    return passed


def quadratic(p):
    return float(p[0] ** 2 + p[1] ** 2)


def rosenbrock(p):
    return float((1 - p[0]) ** 2 + 100 * (p[1] - p[0] ** 2) ** 2)


# -- 1. optimizer correctness -----------------------------------------------------

coord = st.floats(-10, 10, allow_nan=False)
triangle = st.lists(st.tuples(coord, coord), min_size=3, max_size=3).map(np.array)


def fat_enough(pts):
    # nondegenerate: area at least 1% of the squared longest edge, edges not vanishing
    area = abs(np.linalg.det(pts[1:] - pts[0])) / 2
    longest = max(np.linalg.norm(pts[i] - pts[j]) for i in range(3) for j in range(i))
    return longest >= 1e-3 and area >= 1e-2 * longest ** 2


_quadratic_worst = {"iterations": 0, "value": 0.0, "cases": 0}


@given(triangle.filter(fat_enough))
@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
def _quadratic_property(pts):
    s = nm.Simplex.from_points(pts, quadratic)
    out = nm.run(s, quadratic, nm.PolytopeConfig(epsilon=0.0, max_evaluations=10**9, max_iterations=200))
    _quadratic_worst["cases"] += 1
    _quadratic_worst["value"] = max(_quadratic_worst["value"], out.best_value)
    assert out.best_value < 1e-10


def test_criterion_1_optimizer_correctness():
    ok = True
    try:
        _quadratic_property()
    except AssertionError:
        ok = False
    start = np.array([-1.2, 1.0])
    s = nm.Simplex.from_points([start, start + [0.1, 0.0], start + [0.0, 0.1]], rosenbrock)
    out = nm.run(s, rosenbrock, nm.PolytopeConfig(epsilon=0.0, max_evaluations=10**9, max_iterations=500))
    dist = float(np.linalg.norm(out.best_point - [1.0, 1.0]))
    ok = ok and dist < 1e-4 and out.iterations <= 500
    record(1, ok, f"quadratic {_quadratic_worst['cases']} starts, worst best_value "
                  f"{_quadratic_worst['value']:.2e} (< 1e-10 in 200 iters); rosenbrock |x - (1,1)| = {dist:.1e} "
                  f"after {out.iterations} iters (< 1e-4 in 500)")
    assert ok


# -- 2. pseudocode fidelity --------------------------------------------------------

def random_objective(rng, n):
    kind = rng.integers(4)
    if kind == 0:
        a = rng.normal(size=(n, n))
        m = a @ a.T + 0.1 * np.eye(n)
        x0 = rng.normal(size=n)
        return lambda p: float((p - x0) @ m @ (p - x0))
    if kind == 1:
        return lambda p: float(np.sum(100 * (p[1:] - p[:-1] ** 2) ** 2 + (1 - p[:-1]) ** 2) + p[0] ** 2)
    if kind == 2:
        w = rng.normal(size=n) * 50
        return lambda p: float(np.sin(w @ p) + 0.01 * p @ p)
    # a noisy-looking integer objective, like the cycle length
    w = rng.normal(size=n)
    return lambda p: -float(np.floor(20 * np.cos(3 * w @ p)))


def test_criterion_2_pseudocode_fidelity():
    rng = np.random.default_rng(2)
    mismatches = 0
    branches = set()
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        fn = random_objective(rng, n)
        points = rng.uniform(-3, 3, (n + 1, n))
        s = nm.Simplex.from_points(points, fn)
        cfg = nm.PolytopeConfig()
        out, calls, branch = nm.step(s, fn, cfg)
        w, f, ref_branch, ref_calls = oracle_polytope_step(points.tolist(), s.values.tolist(),
                                                           lambda p: fn(np.array(p)))
        branches.add(branch)
        same = branch == ref_branch and calls == ref_calls and all(
            rel_close(a, b, rel=1e-12) for row, ref in zip(out.points.tolist(), w) for a, b in zip(row, ref))
        mismatches += not same
    ok = mismatches == 0 and len(branches) == 5
    record(2, ok, f"1000 random steps, {mismatches} mismatches vs longhand transcription, "
                  f"{len(branches)}/5 branches exercised")
    assert ok


# -- 3. termination formula --------------------------------------------------------

def test_criterion_3_termination_formula():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(1000):
        m = int(rng.integers(2, 40))
        values = rng.uniform(-1e3, 1e3, m) * 10.0 ** rng.integers(-3, 4)
        got = nm.termination_measure(nm.Simplex(np.zeros((m, m - 1)), values))
        ref = oracle_termination_measure(values.tolist())
        worst = max(worst, abs(got - ref) / abs(ref))
    ok = worst <= 1e-12
    record(3, ok, f"1000 value lists, worst relative error {worst:.1e} (<= 1e-12)")
    assert ok


# -- 4. dynamics fidelity ----------------------------------------------------------

def test_criterion_4_dynamics_fidelity():
    rng = np.random.default_rng(4)
    worst = 0.0
    mirror_ok = True
    for _ in range(10_000):
        s = CartPoleState(*rng.uniform([-2.4, -3, -0.3, -4], [2.4, 3, 0.3, 4]).tolist())
        force = 10.0 if rng.random() < 0.5 else -10.0
        got = env.step(s, force)
        ref = oracle_cartpole_step(tuple(s), force)
        for a, b in zip(got, ref):
            if a != b:
                worst = max(worst, abs(a - b) / max(abs(a), abs(b)))
        mirror_ok &= env.step(s.negate(), -force) == got.negate()
    ok = worst <= 1e-12 and mirror_ok
    record(4, ok, f"10000 random states, worst relative error {worst:.1e} (<= 1e-12), "
                  f"mirror antisymmetry exact: {mirror_ok}")
    assert ok


# -- 5 to 8: desk-scale training batch ------------------------------------------------

def run_batch(out_dir):
    cfg = cli.load_config(profile="desk", seed=ACCEPTANCE_SEED, experiments=DESK_EXPERIMENTS)
    cfg.generalization_tests = GENERALIZATION_TESTS
    cfg.generalization_threshold = GENERALIZATION_THRESHOLD
    cli.cmd_experiment(cfg, str(out_dir))
    return cfg


@pytest.fixture(scope="module")
def desk_batch(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk_batch")
    cfg = run_batch(out)
    runs = [cli.read_report(out / "runs" / f"run_{i:03d}.txt") for i in range(cfg.experiments)]
    return cfg, out, runs


def test_criterion_5_training_success(desk_batch):
    cfg, _, runs = desk_batch
    successes = [r for r in runs if r["succeeded"] == "true"]
    overshoot = cfg.strategy.max_total_evaluations + net.parameter_count(cfg.topology) + 2
    within_budget = all(int(r["restarts_used"]) <= cfg.strategy.max_restarts
                        and int(r["total_evaluations"]) <= overshoot for r in successes)
    ok = len(successes) >= 8 and within_budget and cfg.strategy.max_cycle_steps == 10_000
    record(5, ok, f"{len(successes)}/{len(runs)} desk-scale experiments reached 10000 steps "
                  f"(need >= 8) within 15 restarts / 15000 cycles: {within_budget}")
    assert ok


def test_criterion_6_training_cost(desk_batch):
    _, _, runs = desk_batch
    cycles = [int(r["total_evaluations"]) for r in runs if r["succeeded"] == "true"]
    median = float(np.median(cycles)) if cycles else math.inf
    ok = median < 8000
    record(6, ok, f"median cycles over successful runs {median:.0f} (< 8000); all: {sorted(cycles)}")
    assert ok


def test_criterion_7_generalization(desk_batch):
    _, _, runs = desk_batch
    pct = [float(r["generalization.success_percentage"]) for r in runs if "generalization.success_percentage" in r]
    mean = float(np.mean(pct)) if pct else 0.0
    ok = len(pct) >= 5 and mean >= 20.0
    record(7, ok, f"{len(pct)} trained networks, {GENERALIZATION_TESTS} tests each at threshold "
                  f"{GENERALIZATION_THRESHOLD}: mean {mean:.1f}% (>= 20%), per network {[round(p, 1) for p in pct]}")
    assert ok


def test_criterion_8_determinism(desk_batch, tmp_path):
    cfg, first, _ = desk_batch
    run_batch(tmp_path)
    names = ["summary.tsv", "summary.txt"]
    for i in range(cfg.experiments):
        names += [f"runs/run_{i:03d}.txt", f"runs/run_{i:03d}_weights.txt"]

    def content(path):
        text = path.read_text()
        if text.startswith(cli.REPORT_TITLE):
            text = text.split("\n", 1)[1]
        return text

    differing = [n for n in names if content(first / n) != content(tmp_path / n)]
    ok = not differing
    record(8, ok, f"rerun with seed {ACCEPTANCE_SEED}: {len(names) - len(differing)}/{len(names)} "
                  f"files byte-identical (timestamp line stripped)")
    assert ok


# -- 9. persistence round trip -------------------------------------------------------

_roundtrip = {"cases": 0}


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=35, max_size=35),
       st.lists(st.floats(-3, 3), min_size=4, max_size=4))
@settings(max_examples=200, deadline=None)
def _roundtrip_property(tmp_dir, values, inputs):
    params = np.array(values)
    a, b = tmp_dir / "a.txt", tmp_dir / "b.txt"
    net.save_weights(a, params)
    loaded, topo = net.load_weights(a)
    net.save_weights(b, loaded, topo)
    assert a.read_bytes() == b.read_bytes()
    y = net.forward(params, inputs)
    y_loaded = net.forward(loaded, inputs)
    # huge weights can give inf - inf = nan; bit-identical then means nan on both sides
    assert y_loaded == y or (math.isnan(y) and math.isnan(y_loaded))
    _roundtrip["cases"] += 1


def test_criterion_9_persistence(desk_batch, tmp_path):
    ok = True
    try:
        _roundtrip_property(tmp_path)
    except AssertionError:
        ok = False
    _, out, runs = desk_batch
    trained = 0
    for i in range(len(runs)):
        src = out / "runs" / f"run_{i:03d}_weights.txt"
        params, topo = net.load_weights(src)
        dst = tmp_path / f"copy_{i}.txt"
        net.save_weights(dst, params, topo)
        ok &= src.read_bytes() == dst.read_bytes()
        ref = generalization_test(params, np.random.default_rng(0), n_tests=5, success_threshold=50)
        ok &= generalization_test(net.load_weights(dst)[0], np.random.default_rng(0), n_tests=5,
                                  success_threshold=50) == ref
        trained += 1
    record(9, ok, f"{_roundtrip['cases']} random weight vectors and {trained} trained networks: "
                  f"save/load/save byte-identical, outputs bit-identical")
    assert ok
