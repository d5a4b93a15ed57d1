"""Command-line front end: ``train``, ``experiment`` and ``evaluate``.

Reports are plain ``key = value`` text records whose first line is the only
one carrying a timestamp. Everything else in every output file is a pure
function of the configuration and the master seed.

Seeding: experiment i of master seed s draws from
``SeedSequence(s, spawn_key=(i,))``; restart r within it uses spawn key
``(i, r)``. ``train --seed s`` is experiment 0 of seed s. Generalization
tests of experiment i draw from ``SeedSequence([s, 1], spawn_key=(i,))``.
"""
from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import net
from .env import EnvConfig
from .evaluator import HIGHER_IS_BETTER, LOWER_IS_BETTER, batch_stats, generalization_test
from .linesearch import LineSearchConfig
from .optimizer import PolytopeConfig
from .trainer import TRAINING_LINE_SEARCH, StrategyConfig, run_training

PROFILES = {
    "desk": {"max_cycle_steps": 10_000, "experiments": 10},
    "paper": {"max_cycle_steps": 120_000, "experiments": 50},
}

REPORT_TITLE = "# polytope-rl report"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    env: EnvConfig = field(default_factory=EnvConfig)
    strategy: StrategyConfig = field(default_factory=StrategyConfig)
    polytope: PolytopeConfig = field(default_factory=PolytopeConfig)
    line_search: LineSearchConfig = TRAINING_LINE_SEARCH
    topology: net.Topology = net.DEFAULT_TOPOLOGY
    seed: int = 0
    experiments: int = 10
    profile: str = "desk"
    generalization_tests: int = 0
    generalization_threshold: int = 1000

    def items(self):
        """Flat ``(key, value)`` pairs for every field, nested ones dotted."""
        out = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if dataclasses.is_dataclass(value):
                for sub in dataclasses.fields(value):
                    out.append((f"config.{f.name}.{sub.name}", getattr(value, sub.name)))
            else:
                out.append((f"config.{f.name}", value))
        return out


_SECTION_DEFAULTS = {
    "env": EnvConfig(),
    "strategy": StrategyConfig(),
    "polytope": PolytopeConfig(),
    "line_search": TRAINING_LINE_SEARCH,
    "topology": net.DEFAULT_TOPOLOGY,
}


def load_config(path=None, profile=None, seed=None, experiments=None) -> ExperimentConfig:
    """Build a config from an optional JSON file, then apply flag overrides.

    The profile sets the default ``max_cycle_steps`` and batch size; explicit
    values in the file or on the command line win over it.
    """
    raw = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be an object")

    profile = profile or raw.get("profile", "desk")
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
    defaults = PROFILES[profile]

    kwargs = {"profile": profile}
    for name, default in _SECTION_DEFAULTS.items():
        section = raw.get(name, {})
        if not isinstance(section, dict):
            raise ConfigError(f"config section {name!r} must be an object")
        section = dict(section)
        if name == "strategy":
            section.setdefault("max_cycle_steps", defaults["max_cycle_steps"])
        try:
            kwargs[name] = dataclasses.replace(default, **section)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid {name!r} section: {exc}") from None
    known = set(_SECTION_DEFAULTS) | {"profile", "seed", "experiments", "generalization_tests", "generalization_threshold"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("seed", "generalization_tests", "generalization_threshold"):
        if key in raw:
            kwargs[key] = int(raw[key])
    kwargs["experiments"] = int(raw.get("experiments", defaults["experiments"]))
    if seed is not None:
        kwargs["seed"] = seed
    if experiments is not None:
        kwargs["experiments"] = experiments
    cfg = ExperimentConfig(**kwargs)
    if cfg.experiments < 1:
        raise ConfigError("experiments must be >= 1")
    return cfg


def experiment_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


def generalization_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master_seed, 1], spawn_key=(index,))


# -- reports -------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return " ".join(_fmt(v) for v in value)
    return str(value)


def format_report(kind: str, items) -> str:
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    lines = [f"{REPORT_TITLE} {kind} generated {stamp}"]
    lines.extend(f"{key} = {_fmt(value)}" for key, value in items)
    return "\n".join(lines) + "\n"


def read_report(path) -> dict:
    """Parse a report back into a ``{key: str}`` mapping (header skipped)."""
    out = {}
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            key, _, value = line.rstrip("\n").partition(" = ")
            out[key] = value
    return out


def _training_items(report, cfg: ExperimentConfig, index: int):
    items = [
        ("experiment", index),
        ("seed", cfg.seed),
        ("succeeded", report.succeeded),
        ("total_evaluations", report.total_evaluations),
        ("restarts_used", report.restarts_used),
        ("best_cycle_steps", report.best_cycle_steps),
    ]
    for r, (evals, best) in enumerate(report.per_restart_log):
        items.append((f"restart.{r}", f"evaluations {evals} best_steps {best}"))
    return items


def _write(path, text):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from None


def _prepare_out(out_dir):
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc.strerror or exc}") from None


# -- commands ------------------------------------------------------------------

def _train_one(cfg: ExperimentConfig, index: int):
    return run_training(
        experiment_seed(cfg.seed, index),
        env_cfg=cfg.env,
        strategy=cfg.strategy,
        polytope=cfg.polytope,
        line_search=cfg.line_search,
        topology=cfg.topology,
    )


def _generalize(cfg: ExperimentConfig, weights, index: int):
    rng = np.random.default_rng(generalization_seed(cfg.seed, index))
    return generalization_test(weights, rng, cfg.env, cfg.generalization_tests,
                               cfg.generalization_threshold, cfg.topology)


def cmd_train(cfg: ExperimentConfig, out_dir: str) -> int:
    _prepare_out(out_dir)
    report = _train_one(cfg, 0)
    items = _training_items(report, cfg, 0) + cfg.items()
    net.save_weights(os.path.join(out_dir, "weights.txt"), report.best_weights, cfg.topology)
    _write(os.path.join(out_dir, "report.txt"), format_report("train", items))
    status = "succeeded" if report.succeeded else "failed"
    print(f"training {status}: {report.total_evaluations} cycles, {report.restarts_used} restart(s), "
          f"best cycle {report.best_cycle_steps} steps")
    return 0 if report.succeeded else 1


def _run_indexed(cfg, index):
    report = _train_one(cfg, index)
    gen = _generalize(cfg, report.best_weights, index) if cfg.generalization_tests > 0 and report.succeeded else None
    return index, report, gen


def cmd_experiment(cfg: ExperimentConfig, out_dir: str, jobs: int = 1) -> int:
    _prepare_out(out_dir)
    runs_dir = os.path.join(out_dir, "runs")
    _prepare_out(runs_dir)

    indices = range(cfg.experiments)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_indexed, [cfg] * len(indices), indices))
    else:
        results = [_run_indexed(cfg, i) for i in indices]
    results.sort(key=lambda t: t[0])

    header = ["experiment", "succeeded", "total_evaluations", "restarts_used", "best_cycle_steps", "generalization_pct"]
    rows = ["\t".join(header)]
    for index, report, gen in results:
        stem = os.path.join(runs_dir, f"run_{index:03d}")
        items = _training_items(report, cfg, index)
        if gen is not None:
            items += [("generalization.tests_run", gen.tests_run), ("generalization.successes", gen.successes),
                      ("generalization.success_percentage", gen.success_percentage)]
        _write(stem + ".txt", format_report("train", items + cfg.items()))
        net.save_weights(stem + "_weights.txt", report.best_weights, cfg.topology)
        pct = "" if gen is None else repr(gen.success_percentage)
        rows.append("\t".join([str(index), _fmt(report.succeeded), str(report.total_evaluations),
                               str(report.restarts_used), str(report.best_cycle_steps), pct]))

    ok = [r for _, r, _ in results if r.succeeded]
    summary = [("experiments", len(results)), ("successes", len(ok)),
               ("success_rate", len(ok) / len(results))]
    if ok:
        st = batch_stats([r.total_evaluations for r in ok], LOWER_IS_BETTER)
        summary += [("cycles.best", st.best), ("cycles.worst", st.worst), ("cycles.mean", st.mean), ("cycles.sd", st.sd),
                    ("cycles.median", float(np.median([r.total_evaluations for r in ok])))]
    gens = [g.success_percentage for _, _, g in results if g is not None]
    if gens:
        gst = batch_stats(gens, HIGHER_IS_BETTER)
        summary += [("generalization.best", gst.best), ("generalization.worst", gst.worst),
                    ("generalization.mean", gst.mean), ("generalization.sd", gst.sd)]

    rows.append("")
    rows.append("\t".join(["method", "best", "worst", "mean", "sd", "successes"]))
    if ok:
        rows.append("\t".join(["polytope", _fmt(st.best), _fmt(st.worst), _fmt(st.mean), _fmt(st.sd),
                               f"{len(ok)}/{len(results)}"]))
    else:
        rows.append("\t".join(["polytope", "", "", "", "", f"0/{len(results)}"]))
    _write(os.path.join(out_dir, "summary.tsv"), "\n".join(rows) + "\n")
    _write(os.path.join(out_dir, "summary.txt"), format_report("experiment", summary + cfg.items()))

    print(f"{len(ok)}/{len(results)} experiments succeeded")
    if ok:
        print(f"cycles  best {st.best:.0f}  worst {st.worst:.0f}  mean {st.mean:.1f}  sd {st.sd:.1f}")
    if gens:
        print(f"generalization %  best {gst.best:.1f}  worst {gst.worst:.1f}  mean {gst.mean:.1f}  sd {gst.sd:.1f}")
    return 0


def cmd_evaluate(cfg: ExperimentConfig, weights_path: str, out_dir: str, n_tests: int, threshold: int) -> int:
    params, topology = net.load_weights(weights_path)
    rng = np.random.default_rng(cfg.seed)
    result = generalization_test(params, rng, cfg.env, n_tests, threshold, topology)
    print(f"{weights_path}: {result.successes}/{result.tests_run} tests balanced for >= {threshold} steps "
          f"({result.success_percentage:.1f}%)")
    _prepare_out(out_dir)
    table = os.path.join(out_dir, "generalization.tsv")
    new = not os.path.exists(table)
    try:
        with open(table, "a") as fh:
            if new:
                fh.write("weights\tseed\ttests\tthreshold\tsuccesses\tpercentage\n")
            fh.write(f"{weights_path}\t{cfg.seed}\t{result.tests_run}\t{threshold}\t"
                     f"{result.successes}\t{result.success_percentage!r}\n")
    except OSError as exc:
        raise OSError(f"cannot write {table}: {exc.strerror or exc}") from None
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polytope-rl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--profile", choices=sorted(PROFILES), help="desk (10000-step cycles) or paper (120000)")
        p.add_argument("--out", default="out", help="output directory (default: out)")

    p = sub.add_parser("train", help="train one network")
    common(p)

    p = sub.add_parser("experiment", help="run a batch of independent trainings")
    common(p)
    p.add_argument("--experiments", type=int, help="number of trainings")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--generalization-tests", type=int, help="also test each trained network from this many starts")

    p = sub.add_parser("evaluate", help="generalization test of a weight file")
    common(p)
    p.add_argument("--weights", required=True, help="weight file to test")
    p.add_argument("--tests", type=int, default=5000)
    p.add_argument("--threshold", type=int, default=1000)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.profile, args.seed, getattr(args, "experiments", None))
        if args.command == "train":
            return cmd_train(cfg, args.out)
        if args.command == "experiment":
            if args.generalization_tests is not None:
                cfg = dataclasses.replace(cfg, generalization_tests=args.generalization_tests)
            return cmd_experiment(cfg, args.out, args.jobs)
        return cmd_evaluate(cfg, args.weights, args.out, args.tests, args.threshold)
    except net.WeightFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
