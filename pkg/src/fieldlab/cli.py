"""Command-line scenario runner.

    fieldlab list
    fieldlab run <scenario> [<scenario> ...] [--config FILE] [--out DIR] [--seed N] [--parallel]
    fieldlab check [--out DIR] [--seed N] [--parallel]

Each run writes, under ``<out>/<scenario>/``: ``results.csv`` (observable,
value), ``checks.csv``, one CSV per extra table, ``run.json`` with the fully
resolved configuration and ``summary.txt``; scenarios with a plot also write
``plot.png``.  Data files depend only on the configuration and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ScenarioConfig, read_config_file, resolve_config
from .io import format_value, write_table
from .scenarios import REGISTRY, ScenarioResult

DEFAULT_OUT = "fieldlab-results"


def execute(config: ScenarioConfig) -> ScenarioResult:
    scenario = REGISTRY[config.scenario]
    rng = np.random.default_rng(config.seed)
    return scenario.run(config.params, config.constants, rng)


def write_outputs(config: ScenarioConfig, result: ScenarioResult, out_dir: Path, plots: bool = True) -> Path:
    target = out_dir / config.scenario
    try:
        target.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {target}: {exc}") from exc
    write_table(target / "results.csv", ["observable", "value"], result.observables)
    write_table(target / "checks.csv", ["check", "passed", "detail"], [(c.name, c.passed, c.detail) for c in result.checks])
    for name, (header, rows) in sorted(result.tables.items()):
        write_table(target / f"{name}.csv", header, rows)
    meta = {
        "fieldlab_version": __version__,
        "config": config.resolved(),
        "passed": result.passed,
        "checks_total": len(result.checks),
        "checks_failed": sum(not c.passed for c in result.checks),
        "tables": sorted(result.tables),
    }
    (target / "run.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    (target / "summary.txt").write_text(summary_text(config, result))
    if plots and result.plot is not None:
        _save_plot(result, config.scenario, target / "plot.png")
    return target


def _save_plot(result: ScenarioResult, title: str, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4.5))
    result.plot(ax)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def summary_text(config: ScenarioConfig, result: ScenarioResult) -> str:
    scenario = REGISTRY[config.scenario]
    lines = [f"scenario: {config.scenario}", f"claim: {scenario.claim}", f"seed: {config.seed}", ""]
    lines.append("observables:")
    for name, value in result.observables:
        lines.append(f"  {name} = {format_value(value)}")
    lines.append("")
    lines.append("checks:")
    for c in result.checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"  [{status}] {c.name}" + (f" ({c.detail})" if c.detail else ""))
    lines.append("")
    lines.append("result: " + ("PASS" if result.passed else "FAIL"))
    return "\n".join(lines) + "\n"


def _run_one(args: tuple) -> tuple[str, bool, float, str]:
    """Worker: run a scenario and write its outputs; returns (name, passed, seconds, summary)."""
    config, out_dir, plots = args
    start = time.perf_counter()
    result = execute(config)
    write_outputs(config, result, Path(out_dir), plots)
    return config.scenario, result.passed, time.perf_counter() - start, summary_text(config, result)


def _run_many(configs: list, out_dir: str, parallel: bool, plots: bool = True) -> list:
    jobs = [(cfg, out_dir, plots) for cfg in configs]
    if parallel and len(jobs) > 1:
        with ProcessPoolExecutor() as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(job) for job in jobs]


def cmd_list(args) -> int:
    width = max(len(n) for n in REGISTRY)
    for name, sc in REGISTRY.items():
        print(f"{name:<{width}}  {sc.claim}")
    return 0


def cmd_run(args) -> int:
    data = read_config_file(args.config) if args.config else {}
    for name in args.scenarios:
        if name not in REGISTRY:
            raise ConfigError(f"unknown scenario {name!r}; try 'fieldlab list'")
    if len(args.scenarios) > 1 and "scenario" in data:
        raise ConfigError("a config naming one scenario cannot drive several")
    configs = []
    for name in args.scenarios:
        configs.append(resolve_config(name, REGISTRY[name].defaults, data, args.seed, args.out))
    out_dir = args.out or configs[0].out or DEFAULT_OUT
    outcomes = _run_many(configs, out_dir, args.parallel, not args.no_plots)
    for name, passed, seconds, summary in outcomes:
        print(summary, end="")
        print(f"runtime: {seconds:.2f} s")
        print(f"outputs: {Path(out_dir) / name}\n")
    return 0 if all(o[1] for o in outcomes) else 1


def cmd_check(args) -> int:
    configs = [resolve_config(name, sc.defaults, {}, args.seed) for name, sc in REGISTRY.items()]
    start = time.perf_counter()
    outcomes = _run_many(configs, args.out or DEFAULT_OUT, args.parallel, not args.no_plots)
    total = time.perf_counter() - start
    width = max(len(n) for n in REGISTRY)
    for name, passed, seconds, _ in outcomes:
        print(f"{'PASS' if passed else 'FAIL'}  {name:<{width}}  {seconds:7.2f} s")
    failed = [o[0] for o in outcomes if not o[1]]
    print(f"{len(outcomes) - len(failed)}/{len(outcomes)} scenarios passed in {total:.1f} s")
    if failed:
        print("failed: " + ", ".join(failed))
    return 0 if not failed else 1


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fieldlab", description="Particle and field pictures of free quantum fields, side by side.")
    parser.add_argument("--version", action="version", version=f"fieldlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="list scenarios and the claim each one tests")
    p_list.set_defaults(func=cmd_list)

    p_run = sub.add_parser("run", help="run one or more scenarios")
    p_run.add_argument("scenarios", nargs="+", metavar="scenario")
    p_run.add_argument("--config", help="JSON or YAML file with params, constants, seed, out")
    p_run.add_argument("--out", help=f"output directory (default {DEFAULT_OUT})")
    p_run.add_argument("--seed", type=_seed, help="seed for randomized suites")
    p_run.add_argument("--parallel", action="store_true", help="run the given scenarios in separate processes")
    p_run.add_argument("--no-plots", action="store_true", help="skip plot files")
    p_run.set_defaults(func=cmd_run)

    p_check = sub.add_parser("check", help="run every scenario at its defaults")
    p_check.add_argument("--out", help=f"output directory (default {DEFAULT_OUT})")
    p_check.add_argument("--seed", type=_seed, help="seed for randomized suites")
    p_check.add_argument("--parallel", action="store_true")
    p_check.add_argument("--no-plots", action="store_true")
    p_check.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"fieldlab: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"fieldlab: invalid configuration: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
