"""Command-line front end.

Subcommands:
  run        solve a scenario (optionally sweeping a parameter over methods
             and seeds) and write trace CSVs, report JSONs, and summary.csv
  cdf        merge report JSONs into achieved-rate CDF tables
  dump-rates print the static rate tables of a scenario
  validate   constraint-check an allocation file against a scenario

All outputs are plain CSV/JSON with floats at 12 significant digits.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import equilibrium, market
from .channel import build_rate_table
from .market import AllocationState
from .scenario import ScenarioError, load_scenario

ACCESS_THRESHOLD_BPS = 40e6
BACKHAUL_THRESHOLD_BPS = 1.6e9

_SUMMARY_COLUMNS = (
    "method", "sweep_param", "sweep_value", "seed", "converged", "iterations",
    "total_payoff", "mean_access_rate_bps", "mean_backhaul_rate_bps",
    "access_links_ge_threshold", "backhaul_links_ge_threshold",
)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


@dataclass
class ExperimentSpec:
    """One experiment: a scenario swept over methods, seeds, and at most one
    scenario parameter."""

    scenario_path: str
    methods: list
    seeds: list
    output_dir: str
    sweep_param: str | None = None       # drone_count | sbs_count | satellite
    sweep_values: list = field(default_factory=list)
    max_iters: int = 2000
    # Solver knobs: None defers to the scenario document's `solver` section,
    # then to the SolverConfig defaults.
    step0: float | None = None
    step_schedule: str | None = None
    price_init: str | None = None
    restart_every: int | None = None
    satellite_rate_mode: str = "exact"
    access_threshold: float = ACCESS_THRESHOLD_BPS
    backhaul_threshold: float = BACKHAUL_THRESHOLD_BPS

    def __post_init__(self):
        if not self.methods:
            raise ValueError("at least one method is required")
        if self.sweep_param not in (None, "drone_count", "sbs_count", "satellite"):
            raise ValueError(f"unknown sweep parameter {self.sweep_param!r}")
        if self.sweep_param and not self.sweep_values:
            raise ValueError("sweep_values required when sweep_param is set")

    def cells(self):
        values = self.sweep_values if self.sweep_param else [None]
        for method in self.methods:
            for value in values:
                for seed in self.seeds:
                    yield method, value, seed


def apply_sweep(doc: dict, param: str, value) -> dict:
    """Return a copy of a scenario document with one swept parameter applied.

    drone_count / sbs_count keep the first `value` configured nodes (the
    document must list at least that many); satellite toggles the link.
    """
    doc = copy.deepcopy(doc)
    nodes = doc.setdefault("nodes", {})
    if param == "drone_count":
        drones = nodes.get("drones", {})
        positions = drones.get("positions", [])
        if int(value) > len(positions):
            raise ValueError(
                f"sweep drone_count={value}: scenario lists only {len(positions)} drones"
            )
        drones["positions"] = positions[: int(value)]
        drones["hover_times"] = drones.get("hover_times", [])[: int(value)]
        nodes["drones"] = drones
    elif param == "sbs_count":
        cells = nodes.get("small_cells", {})
        positions = cells.get("positions", [])
        if int(value) > len(positions):
            raise ValueError(
                f"sweep sbs_count={value}: scenario lists only {len(positions)} cells"
            )
        cells["positions"] = positions[: int(value)]
        nodes["small_cells"] = cells
    elif param == "satellite":
        sat = nodes.setdefault("satellite", {})
        sat["enabled"] = bool(value)
    else:
        raise ValueError(f"unknown sweep parameter {param!r}")
    return doc


def _load_doc(path: str) -> dict:
    with open(path, "r") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ScenarioError(f"{path}: scenario document must be a mapping")
    return doc


def run_cell(doc: dict, spec: ExperimentSpec, method: str, sweep_value, seed: int):
    """Solve one (method, sweep value, seed) cell and return its report and
    summary row."""
    if spec.sweep_param is not None:
        doc = apply_sweep(doc, spec.sweep_param, sweep_value)
    else:
        doc = copy.deepcopy(doc)
    doc["seed"] = int(seed)
    scenario = load_scenario(doc)
    solver_doc = dict(doc.get("solver", {}) or {})
    overrides = {
        "step0": spec.step0,
        "step_schedule": spec.step_schedule,
        "price_init": spec.price_init,
        "restart_every": spec.restart_every,
    }
    solver_doc.update({k: v for k, v in overrides.items() if v is not None})
    config = equilibrium.SolverConfig(
        method=method,
        max_iters=spec.max_iters,
        satellite_rate_mode=spec.satellite_rate_mode,
        seed=int(seed),
        **solver_doc,
    )
    report = equilibrium.run(scenario, config)
    acc, bh = report.access_rate_samples, report.backhaul_rate_samples
    row = {
        "method": method,
        "sweep_param": spec.sweep_param or "",
        "sweep_value": "" if sweep_value is None else sweep_value,
        "seed": seed,
        "converged": report.converged,
        "iterations": report.iterations,
        "total_payoff": report.best_feasible_payoff,
        "mean_access_rate_bps": float(acc.mean()) if acc.size else 0.0,
        "mean_backhaul_rate_bps": float(bh.mean()) if bh.size else 0.0,
        "access_links_ge_threshold": int(np.sum(acc >= spec.access_threshold)),
        "backhaul_links_ge_threshold": int(np.sum(bh >= spec.backhaul_threshold)),
    }
    return report, row


def cmd_run(spec: ExperimentSpec) -> int:
    """Execute every experiment cell; write per-cell artifacts plus summary.csv."""
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = _load_doc(spec.scenario_path)

    rows = []
    for method, sweep_value, seed in spec.cells():
        report, row = run_cell(doc, spec, method, sweep_value, seed)
        tag = method if sweep_value is None else f"{method}_{sweep_value}"
        stem = out / f"{tag}_seed{seed}"
        with open(f"{stem}.json", "w") as fh:
            fh.write(report.to_json())
        with open(f"{stem}_trace.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([
                "k", "norm_s1", "norm_s2", "norm_s3", "dual_value",
                "best_payoff", "step", "cleared",
            ])
            for trow in report.trace_rows():
                writer.writerow([_fmt(trow[c]) for c in (
                    "k", "norm_s1", "norm_s2", "norm_s3", "dual_value",
                    "best_payoff", "step", "cleared",
                )])
        rows.append(row)

    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in _SUMMARY_COLUMNS])
    return 0


def _empirical_cdf(samples: np.ndarray):
    xs = np.sort(samples)
    cdf = np.arange(1, xs.size + 1) / xs.size
    return xs, cdf


def cmd_cdf(report_paths, output_dir: str) -> int:
    """Merge report JSONs into cdf_access.csv / cdf_backhaul.csv."""
    if not report_paths:
        print("cdf: at least one report file is required", file=sys.stderr)
        return 2
    access, backhaul = [], []
    for path in report_paths:
        with open(path, "r") as fh:
            data = json.load(fh)
        access.extend(data["access_rate_samples"])
        backhaul.extend(data["backhaul_rate_samples"])
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, samples in (("cdf_access", access), ("cdf_backhaul", backhaul)):
        xs, cdf = _empirical_cdf(np.asarray(samples, float))
        with open(out / f"{name}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["rate_bps", "cdf"])
            for x, c in zip(xs, cdf):
                writer.writerow([_fmt(x), _fmt(c)])
    return 0


def cmd_dump_rates(scenario_path: str, seed: int | None, out_path: str | None) -> int:
    doc = _load_doc(scenario_path)
    if seed is not None:
        doc["seed"] = int(seed)
    scenario = load_scenario(doc)
    table = build_rate_table(scenario)
    payload = {
        "access_rate_bps": table.access_rate.tolist(),
        "backhaul_rate_bps": table.backhaul_rate.tolist(),
        "satellite_rate_bps": table.sat_rate.tolist(),
    }
    text = json.dumps(payload)
    if out_path:
        Path(out_path).write_text(text)
    else:
        print(text)
    return 0


def cmd_validate(scenario_path: str, allocation_path: str, seed: int | None) -> int:
    """Constraint-check an allocation JSON (keys rho/delta/beta/theta/phi/epsilon)."""
    doc = _load_doc(scenario_path)
    if seed is not None:
        doc["seed"] = int(seed)
    scenario = load_scenario(doc)
    with open(allocation_path, "r") as fh:
        data = json.load(fh)
    alloc = AllocationState.zeros(scenario)
    for name in ("rho", "delta", "beta", "theta", "phi", "epsilon"):
        arr = np.asarray(data[name], dtype=np.int8)
        target = getattr(alloc, name)
        if arr.shape != target.shape:
            print(
                f"validate: {name} has shape {arr.shape}, expected {target.shape}",
                file=sys.stderr,
            )
            return 2
        target[:] = arr
    table = build_rate_table(scenario)
    report = market.check_constraints(alloc, table, scenario)
    print(report.to_json())
    return 0 if report.ok() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skymarket",
        description="Time-slot market solver for satellite-drone networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run solver/baselines on a scenario")
    run_p.add_argument("--scenario", required=True)
    run_p.add_argument("--seed", type=int, nargs="+", default=[0])
    run_p.add_argument(
        "--method", nargs="+", default=["heavy_ball"],
        choices=["heavy_ball", "subgradient", "random", "brute_force"],
    )
    run_p.add_argument("--out", required=True)
    run_p.add_argument("--max-iters", type=int, default=2000)
    run_p.add_argument("--step0", type=float, default=None)
    run_p.add_argument(
        "--step-schedule", default=None, choices=["sqrt", "linear"]
    )
    run_p.add_argument(
        "--price-init", default=None, choices=["cap", "midpoint", "zeros"]
    )
    run_p.add_argument("--restart-every", type=int, default=None)
    run_p.add_argument(
        "--satellite-rate-mode", default="exact", choices=["exact", "drift"]
    )
    run_p.add_argument(
        "--sweep", default=None, choices=["drone_count", "sbs_count", "satellite"]
    )
    run_p.add_argument("--sweep-values", type=int, nargs="+", default=[])
    run_p.add_argument("--access-threshold", type=float, default=ACCESS_THRESHOLD_BPS)
    run_p.add_argument(
        "--backhaul-threshold", type=float, default=BACKHAUL_THRESHOLD_BPS
    )

    cdf_p = sub.add_parser("cdf", help="emit achieved-rate CDF tables")
    cdf_p.add_argument("reports", nargs="+")
    cdf_p.add_argument("--out", required=True)

    dump_p = sub.add_parser("dump-rates", help="print static rate tables")
    dump_p.add_argument("--scenario", required=True)
    dump_p.add_argument("--seed", type=int, default=None)
    dump_p.add_argument("--out", default=None)

    val_p = sub.add_parser("validate", help="constraint-check an allocation file")
    val_p.add_argument("--scenario", required=True)
    val_p.add_argument("--allocation", required=True)
    val_p.add_argument("--seed", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            spec = ExperimentSpec(
                scenario_path=args.scenario,
                methods=args.method,
                seeds=args.seed,
                output_dir=args.out,
                sweep_param=args.sweep,
                sweep_values=list(args.sweep_values),
                max_iters=args.max_iters,
                step0=args.step0,
                step_schedule=args.step_schedule,
                price_init=args.price_init,
                restart_every=args.restart_every,
                satellite_rate_mode=args.satellite_rate_mode,
                access_threshold=args.access_threshold,
                backhaul_threshold=args.backhaul_threshold,
            )
            return cmd_run(spec)
        if args.command == "cdf":
            return cmd_cdf(args.reports, args.out)
        if args.command == "dump-rates":
            return cmd_dump_rates(args.scenario, args.seed, args.out)
        if args.command == "validate":
            return cmd_validate(args.scenario, args.allocation, args.seed)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
