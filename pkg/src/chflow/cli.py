"""Batch front door: config-driven simulations, experiments, and audits.

One command per process; every run writes a manifest.json with the fully
resolved configuration and the package version, then deterministic CSV and
JSONL artifacts next to it.  Solver breakdown is recorded in the manifest
and exits 0: hitting wave breaking is a result, not a failure.
"""

from __future__ import annotations

import argparse
import ast
import copy
import datetime
import json
import sys
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from . import __version__
from .besov import build_filter_bank, inequality_audit, random_corpus, write_audit_csv
from .equations import EquationSpec
from .experiments import (
    continuous_dependence_experiment,
    stability_experiment,
    w1inf_discontinuity_demo,
    write_dependence_csv,
    write_discontinuity_csv,
    write_stability_csv,
    write_stability_jsonl,
)
from .fields import Grid1D, push_forward, to_lagrangian, write_field_csv, write_state_csv
from .lagrangian import SolverConfig, integrate, suggested_horizon, write_trajectory_jsonl
from .peakon import (
    PeakonEnsemble,
    integrate_multipeakon,
    write_ensemble_csv,
    write_peakon_jsonl,
)
from .profiles import build_initial
from .reference import picard_iterate, write_picard_csv

COMMANDS = ("simulate", "picard", "stability", "dependence", "besov-audit",
            "peakon", "w1inf-demo")

DEFAULTS = {
    "run": {"seed": 0, "out": "chflow-out"},
    "grid": {"length": 40.0, "count": 2048},
    "equation": {"family": "ch"},
    "initial": {"profile": "gaussian", "amplitude": 0.5},
    "solver": {"dt": 1e-3, "horizon": "auto", "theta_min": 0.25,
               "snapshot_stride": 25, "c_cal": 0.5, "p": 2.0},
    "picard": {"n_max": 20, "tol": 1e-8, "dt": 1e-3, "p": 2.0, "horizon": "auto"},
    "stability": {"eps": [1e-2, 1e-3, 1e-4], "p_values": [2.0, 3.0],
                  "dt": 1e-3, "horizon": "auto", "snapshot_stride": 25,
                  "perturbation": {"profile": "bump", "amplitude": 1.0,
                                   "width": 2.0, "center": 1.0}},
    "dependence": {"m_values": [1, 2, 3, 4], "p": 2.0, "dt": 1e-3,
                   "horizon": "auto", "snapshot_stride": 25},
    "besov": {"corpus_size": 100},
    "w1inf": {"c": 1.0, "eps": [1e-2, 1e-3, 1e-4], "t": 1.0, "count": 131072},
    "peakon": {"p": [1.0], "q": [0.0], "dt": 1e-3, "horizon": 5.0},
}

# sections whose keys are profile parameters and therefore open-ended
FREE_FORM = {"initial", "stability.perturbation"}


class ConfigError(Exception):
    pass


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        here = f"{path}.{key}" if path else key
        if path and path not in FREE_FORM and key not in base:
            raise ConfigError(f"unknown config key: {here}")
        if not path and key not in base:
            raise ConfigError(f"unknown config section: {here}")
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            if here in FREE_FORM and "profile" in value:
                # a new profile replaces the default one outright; stale
                # parameters of the default profile must not leak through
                out[key] = copy.deepcopy(value)
            else:
                out[key] = _merge(base[key], value, here)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _parse_set_value(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _apply_overrides(config: dict, pairs) -> dict:
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        dotted, raw = pair.split("=", 1)
        keys = dotted.strip().split(".")
        node = config
        for i, key in enumerate(keys[:-1]):
            prefix = ".".join(keys[: i + 1])
            if key not in node:
                if prefix in FREE_FORM or any(prefix.startswith(f) for f in FREE_FORM):
                    node[key] = {}
                else:
                    raise ConfigError(f"unknown config key: {prefix}")
            node = node[key]
            if not isinstance(node, dict):
                raise ConfigError(f"config key {prefix} is not a section")
        leaf = keys[-1]
        section = ".".join(keys[:-1])
        if leaf not in node and section not in FREE_FORM:
            raise ConfigError(f"unknown config key: {dotted.strip()}")
        if leaf == "profile" and section in FREE_FORM:
            node.clear()  # switching profiles discards the old parameters
        node[leaf] = _parse_set_value(raw)
    return config


def resolve_config(command: str, config_path=None, out=None, seed=None,
                   set_pairs=None) -> dict:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choices: {COMMANDS}")
    file_config = {}
    if config_path:
        with open(config_path, "rb") as fh:
            file_config = tomllib.load(fh)
    config = _merge(DEFAULTS, file_config)
    config = _apply_overrides(config, set_pairs)
    if out is not None:
        config["run"]["out"] = str(out)
    if seed is not None:
        config["run"]["seed"] = int(seed)
    config["run"]["command"] = command
    return config


def _build_problem(config: dict):
    grid = Grid1D(length=float(config["grid"]["length"]),
                  count=int(config["grid"]["count"]))
    spec = EquationSpec.from_tag(config["equation"]["family"])
    field = build_initial(grid, config["initial"], with_eta=spec.has_eta)
    return grid, spec, field


def _resolve_horizon(value, spec, field, solver_cfg) -> float:
    if value == "auto":
        return suggested_horizon(spec, field, p=float(solver_cfg["p"]),
                                 c_cal=float(solver_cfg["c_cal"]))
    return float(value)


def _cmd_simulate(config, outdir, manifest):
    grid, spec, field = _build_problem(config)
    sol = config["solver"]
    horizon = _resolve_horizon(sol["horizon"], spec, field, sol)
    manifest["horizon"] = horizon
    traj = integrate(spec, to_lagrangian(field), SolverConfig(
        dt=float(sol["dt"]), horizon=horizon,
        theta_min=float(sol["theta_min"]),
        snapshot_stride=int(sol["snapshot_stride"]),
    ))
    write_trajectory_jsonl(traj, outdir / "trajectory.jsonl")
    write_state_csv(traj.final, outdir / "final_state.csv")
    write_field_csv(push_forward(traj.final, grid), outdir / "final_field.csv")
    manifest["outputs"] = ["trajectory.jsonl", "final_state.csv", "final_field.csv"]
    manifest["final_time"] = traj.final.t
    if traj.broke_down:
        manifest["breakdown"] = {
            "time": traj.breakdown.time,
            "xi_star": traj.breakdown.xi_star,
            "min_y_xi": traj.breakdown.min_y_xi,
        }
    if traj.guaranteed_exit_time is not None:
        manifest["guaranteed_regime_exit_time"] = traj.guaranteed_exit_time


def _cmd_picard(config, outdir, manifest):
    grid, spec, field = _build_problem(config)
    pic = config["picard"]
    horizon = None if pic["horizon"] == "auto" else float(pic["horizon"])
    report = picard_iterate(spec, field, n_max=int(pic["n_max"]),
                            tol=float(pic["tol"]), dt=float(pic["dt"]),
                            horizon=horizon, p=float(pic["p"]))
    write_picard_csv(report, outdir / "picard.csv")
    write_field_csv(report.final, outdir / "final_field.csv")
    manifest["outputs"] = ["picard.csv", "final_field.csv"]
    manifest["converged"] = report.converged
    manifest["iterations"] = report.iterations
    manifest["horizon"] = float(report.times[-1])


def _cmd_stability(config, outdir, manifest):
    grid, spec, field = _build_problem(config)
    sta = config["stability"]
    horizon = _resolve_horizon(sta["horizon"], spec, field, config["solver"])
    manifest["horizon"] = horizon
    perturbation = build_initial(grid, sta["perturbation"])
    report = stability_experiment(
        spec, field, perturbation,
        eps_ladder=[float(e) for e in sta["eps"]],
        horizon=horizon, dt=float(sta["dt"]),
        p_values=[float(p) for p in sta["p_values"]],
        snapshot_stride=int(sta["snapshot_stride"]),
    )
    write_stability_csv(report, outdir / "stability.csv")
    write_stability_jsonl(report, outdir / "stability_series.jsonl")
    manifest["outputs"] = ["stability.csv", "stability_series.jsonl"]
    manifest["rho_spread"] = {str(p): report.rho_spread(float(p))
                              for p in sta["p_values"]}
    manifest["partial"] = any(r.partial for r in report.rows)


def _cmd_dependence(config, outdir, manifest):
    grid, spec, field = _build_problem(config)
    dep = config["dependence"]
    horizon = _resolve_horizon(dep["horizon"], spec, field, config["solver"])
    manifest["horizon"] = horizon
    rows = continuous_dependence_experiment(
        spec, field, m_values=[float(m) for m in dep["m_values"]],
        horizon=horizon, dt=float(dep["dt"]), p=float(dep["p"]),
        snapshot_stride=int(dep["snapshot_stride"]),
    )
    write_dependence_csv(rows, outdir / "dependence.csv")
    manifest["outputs"] = ["dependence.csv"]
    manifest["partial"] = any(r.partial for r in rows)


def _cmd_besov_audit(config, outdir, manifest):
    grid = Grid1D(length=float(config["grid"]["length"]),
                  count=int(config["grid"]["count"]))
    bank = build_filter_bank(grid)
    corpus = random_corpus(grid, int(config["besov"]["corpus_size"]),
                           seed=int(config["run"]["seed"]))
    rows = inequality_audit(corpus, bank)
    write_audit_csv(rows, outdir / "audit.csv")
    manifest["outputs"] = ["audit.csv"]
    manifest["corpus_size"] = len(corpus)


def _cmd_peakon(config, outdir, manifest):
    pk = config["peakon"]
    order = np.argsort(np.asarray(pk["q"], dtype=float))
    ens = PeakonEnsemble(p=np.asarray(pk["p"], dtype=float)[order],
                         q=np.asarray(pk["q"], dtype=float)[order])
    traj = integrate_multipeakon(ens, dt=float(pk["dt"]),
                                 horizon=float(pk["horizon"]))
    write_peakon_jsonl(traj, outdir / "peakon_trajectory.jsonl")
    write_ensemble_csv(traj.final, outdir / "ensemble_final.csv")
    manifest["outputs"] = ["peakon_trajectory.jsonl", "ensemble_final.csv"]
    if traj.collision is not None:
        manifest["collision"] = {"time": traj.collision.time,
                                 "gap": traj.collision.gap,
                                 "pair": traj.collision.pair}


def _cmd_w1inf(config, outdir, manifest):
    w = config["w1inf"]
    rows = w1inf_discontinuity_demo(
        c=float(w["c"]), eps_ladder=[float(e) for e in w["eps"]],
        t=float(w["t"]), length=float(config["grid"]["length"]),
        count=int(w["count"]),
    )
    write_discontinuity_csv(rows, outdir / "w1inf_demo.csv")
    manifest["outputs"] = ["w1inf_demo.csv"]


_RUNNERS = {
    "simulate": _cmd_simulate,
    "picard": _cmd_picard,
    "stability": _cmd_stability,
    "dependence": _cmd_dependence,
    "besov-audit": _cmd_besov_audit,
    "peakon": _cmd_peakon,
    "w1inf-demo": _cmd_w1inf,
}


def run(config: dict) -> int:
    """Execute one resolved config; returns the process exit status."""
    outdir = Path(config["run"]["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": config["run"]["command"],
        "version": __version__,
        "config": config,
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    _RUNNERS[config["run"]["command"]](config, outdir, manifest)
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chflow",
        description="Flow-map laboratory for Camassa-Holm type equations",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, default=None,
                        help="TOML config file; flags override it")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="seed for all randomness")
    parser.add_argument("--set", dest="set_pairs", action="append", default=[],
                        metavar="KEY=VALUE", help="override one config key (repeatable)")
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args.command, config_path=args.config,
                                out=args.out, seed=args.seed,
                                set_pairs=args.set_pairs)
        return run(config)
    except (ConfigError, KeyError, ValueError) as err:
        print(f"chflow: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
