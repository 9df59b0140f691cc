"""Command-line experiment runner: sweeps, CSV/JSON emission, presets.

Outputs per experiment directory:
  entity_trust.csv  epoch,user,true_score,estimated_trust,scheme,seed,pmu,f
  data_trust.csv    epoch,area,factor,interval,mass,scheme,seed,pmu
                    (interval 0 carries the residual universe mass)
  summary.json      seed-averaged convergence/final-trust/error per cell
  plot.gp           optional gnuplot script (--emit-plot-script)
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import metrics, simulator
from .config import (SCENARIOS, ExperimentSpec, apply_scenario, load_config,
                     parse_seeds)
from .errors import ConfigError, TrustFuseError

FLOAT_FMT = "{:.12g}"


def _fmt(x: float) -> str:
    return FLOAT_FMT.format(x)


def _run_cell(args: tuple) -> dict:
    """Worker: run one (pmu, f, seed) cell and flatten it to rows + metrics."""
    base, pmu, f, seed, scheme = args
    cfg = replace(base, pmu=pmu, f_p=f, f_n=f, seed=seed)
    ledger = simulator.run(cfg, scheme)

    entity_rows = []
    data_rows = []
    expected = {u.user_id: u.true_score for u in ledger.users}
    for name, reports in sorted(ledger.reports.items()):
        for report in reports:
            for uid in sorted(report.entity_trusts):
                entity_rows.append((report.epoch, uid, _fmt(expected[uid]),
                                    _fmt(report.entity_trusts[uid]),
                                    name, seed, _fmt(pmu), _fmt(f)))
            for (area, factor), vec in sorted(report.data_trust.items()):
                for gamma, mass in enumerate(vec.masses, start=1):
                    data_rows.append((report.epoch, area, factor, gamma,
                                      _fmt(mass), name, seed, _fmt(pmu)))
                data_rows.append((report.epoch, area, factor, 0,
                                  _fmt(vec.residual), name, seed, _fmt(pmu)))

    cell_metrics = {}
    for name in ledger.reports:
        good = metrics.trust_trajectory([ledger], metrics.good_users, name) \
            if metrics.good_users(ledger) else None
        mal = metrics.trust_trajectory([ledger], metrics.malicious_users, name) \
            if metrics.malicious_users(ledger) else None
        tracked = None
        if cfg.p_tracked > 0.0:
            tracked = metrics.true_mass_trajectory([ledger], cfg.tracked_area,
                                                   name)
        cell_metrics[name] = {
            "good_trust": good,
            "malicious_trust": mal,
            "error": metrics.trust_estimation_error([ledger], scheme=name),
            "tracked_true_mass": tracked,
        }
    return {"pmu": pmu, "f": f, "seed": seed,
            "entity_rows": entity_rows, "data_rows": data_rows,
            "metrics": cell_metrics}


def _mean_traj(trajs: list[list[float]]) -> list[float]:
    out = []
    for t in range(len(trajs[0])):
        vals = [tr[t] for tr in trajs if tr[t] == tr[t]]
        out.append(sum(vals) / len(vals) if vals else float("nan"))
    return out


def _summarize(results: list[dict], spec: ExperimentSpec) -> dict:
    """Seed-average each (pmu, f, scheme) cell's trajectories and errors."""
    cells: dict[tuple, list[dict]] = {}
    for res in results:
        cells.setdefault((res["pmu"], res["f"]), []).append(res)

    summary = {}
    for (pmu, f), group in sorted(cells.items()):
        schemes = sorted(group[0]["metrics"])
        for name in schemes:
            entry: dict = {"n_seeds": len(group)}
            for key, target in (("good_trust", spec.base.score_levels[-1]),
                                ("malicious_trust", spec.base.score_levels[0])):
                trajs = [g["metrics"][name][key] for g in group
                         if g["metrics"][name][key] is not None]
                if trajs:
                    traj = _mean_traj(trajs)
                    entry[f"final_{key}"] = sum(traj[-5:]) / len(traj[-5:])
                    entry[f"{key}_convergence_epoch"] = \
                        metrics.convergence_epoch(traj, target)
            entry["trust_estimation_error"] = (
                sum(g["metrics"][name]["error"] for g in group) / len(group))
            masses = [g["metrics"][name]["tracked_true_mass"] for g in group
                      if g["metrics"][name]["tracked_true_mass"] is not None]
            if masses:
                traj = _mean_traj(masses)
                tail = [v for v in traj[-5:] if v == v]
                entry["tracked_true_mass"] = (sum(tail) / len(tail)
                                              if tail else None)
            summary[f"pmu={_fmt(pmu)},f={_fmt(f)},scheme={name}"] = entry
    return summary


PLOT_SCRIPT = """\
set datafile separator ','
set key autotitle columnhead
set xlabel 'epoch'
set ylabel 'entity trust'
plot 'entity_trust.csv' using 1:4 with points title 'estimated trust'
"""


def run_experiment(spec: ExperimentSpec,
                   emit_plot_script: bool = False) -> list[Path]:
    """Run every sweep cell and write the result files; returns paths."""
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    cells = [(spec.base, pmu, f, seed, spec.scheme)
             for pmu in spec.pmu_list
             for f in spec.f_list
             for seed in spec.seeds]

    max_workers = int(os.environ.get("TRUSTFUSE_THREADS", "0")) or None
    if len(cells) > 1 and (max_workers is None or max_workers > 1):
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]

    entity_path = spec.out_dir / "entity_trust.csv"
    with entity_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "user", "true_score", "estimated_trust",
                         "scheme", "seed", "pmu", "f"])
        for res in results:
            writer.writerows(res["entity_rows"])

    data_path = spec.out_dir / "data_trust.csv"
    with data_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "area", "factor", "interval", "mass",
                         "scheme", "seed", "pmu"])
        for res in results:
            writer.writerows(res["data_rows"])

    summary = {
        "meta": {
            "scenario": spec.scenario,
            "scheme": spec.scheme,
            "seeds": spec.seeds,
            "pmu": spec.pmu_list,
            "f": spec.f_list,
            "sim": dataclasses.asdict(spec.base),
            "baseline_note": ("the baseline scheme is a reconstruction of the "
                              "majority/weighted-sum comparison method; its "
                              "EMA rate and normalized readout are choices of "
                              "this package"),
            "created_unix": time.time(),
        },
        "cells": _summarize(results, spec),
    }
    summary_path = spec.out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, allow_nan=True))

    written = [entity_path, data_path, summary_path]
    if emit_plot_script:
        plot_path = spec.out_dir / "plot.gp"
        plot_path.write_text(PLOT_SCRIPT)
        written.append(plot_path)
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trustfuse",
        description="Trust-management simulation experiments")
    parser.add_argument("--config", type=Path, help="YAML experiment file")
    parser.add_argument("--scenario", choices=sorted(SCENARIOS),
                        help="experiment preset")
    parser.add_argument("--seed", type=int, help="single seed")
    parser.add_argument("--seeds", help="seed range 'a..b' or comma list")
    parser.add_argument("--pmu", help="comma list of malicious fractions")
    parser.add_argument("--f", dest="f_values",
                        help="comma list of channel error rates")
    parser.add_argument("--scheme", choices=list(simulator.SCHEMES))
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--m-per-epoch", type=int,
                        help="observations per user per epoch")
    parser.add_argument("--epochs", type=int, help="run length in epochs")
    parser.add_argument("--emit-plot-script", action="store_true",
                        help="also write a gnuplot script")
    return parser


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}") from exc


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    spec = load_config(args.config) if args.config else ExperimentSpec()
    if args.scenario:
        spec.scenario = args.scenario
        spec = apply_scenario(spec)
    if args.pmu:
        spec.pmu_list = _float_list(args.pmu)
    if args.f_values:
        spec.f_list = _float_list(args.f_values)
    if args.seed is not None:
        spec.seeds = [args.seed]
    if args.seeds:
        spec.seeds = parse_seeds(args.seeds if ".." in args.seeds
                                 else [int(s) for s in args.seeds.split(",")])
    if args.scheme:
        spec.scheme = args.scheme
    if args.out:
        spec.out_dir = args.out
    overrides = {}
    if args.m_per_epoch is not None:
        overrides["m_per_epoch"] = args.m_per_epoch
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if overrides:
        spec.base = replace(spec.base, **overrides)
    # Revalidate after overrides.
    return dataclasses.replace(spec)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
        written = run_experiment(spec, emit_plot_script=args.emit_plot_script)
    except (ConfigError, TrustFuseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
