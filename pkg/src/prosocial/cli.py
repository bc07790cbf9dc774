"""Command-line front end.

    prosocial SUBCOMMAND [--config PATH] [--seed N] [--out DIR] [--format {csv,json}]

Subcommands: beliefs, figure1, sweep, costs, calibrate, experiment. The
config file is JSON; unknown keys are rejected. The output directory is
``--out``, else ``$PROSOCIAL_OUT``, else the config's ``out``, else ``./out``.
"""
from __future__ import annotations

import argparse
import copy
import hashlib
import json
import logging
import os
import platform
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from . import __version__
from .beliefs import ParticipationRule, belief_profile, mc_oracle
from .equilibrium import UnattainableRateError, calibrate_norm, reputational_cost_curve, solve_threshold
from .experiment import INTERACTION, design_matrix
from .model import ModelParams
from .popsim import SweepSpec, fitted_boundary, lattice_population, simulate_grid, sweep
from .stats import SeparationError, logistic_fit
from .synthsurvey import CountrySettings, LinkSettings, generate_countries, generate_microdata
from .tables import json_bytes, write_atomic, write_countries, write_microdata, write_table
from ._seeding import sub_seed

log = logging.getLogger("prosocial")

OUT_ENV = "PROSOCIAL_OUT"
SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_DEGENERATE = 4
EXIT_IO = 5

STOCHASTIC = {"beliefs", "figure1", "sweep", "experiment"}

DEFAULTS: Dict[str, Any] = {
    "seed": None,
    "out": None,
    "format": "csv",
    "mode": "rational",
    "params": {"c": 0.5, "R": 1, "VIS": 1.0, "pref_va": 1.0, "pref_vv": 1.0, "S_va": 0.0, "S_vv": 0.0},
    "beliefs": {
        "R": [0, 1],
        "t_grid": [round(0.1 * i, 10) for i in range(20)],
        "n_samples": 1_000_000,
    },
    "figure1": {"S_vv": [-1.0, 0.0, 1.0], "c": [0.2, 0.4, 0.6, 0.8], "lattice_side": 200},
    "sweep": {"axes": {"c": [0.2, 0.4, 0.6, 0.8], "R": [0, 1]}, "n": 10_000, "max_cells": 10_000, "workers": 1},
    "costs": {"c_grid": [round(0.05 * i, 10) for i in range(1, 20)]},
    "calibrate": {"target_rate": [0.7, 0.8, 0.9]},
    "experiment": {
        "n_countries": 28,
        "n_per_country": 1000,
        "country_effects": False,
        "countries": {
            "fin_norm_range": [0.02, 0.39],
            "time_norm_range": [0.12, 0.70],
            "fin_incentive_probs": {"0": 0.82, "0.5": 0.04, "1": 0.14},
            "time_incentive_probs": {"0": 0.46, "0.5": 0.25, "1": 0.29},
            "cost_range": [0.6, 0.6],
        },
        "link": {
            "channel": "time",
            "VIS": 1.0,
            "pref_va": 1.0,
            "pref_vv": 1.0,
            "S_va": 0.0,
            "cost_spread": 0.1,
            "attenuate_partial": True,
            "intrinsic_cutoff": 0.37,
            "extrinsic_cutoff": 0.94,
        },
    },
}

# sections whose keys are free-form and validated downstream
FREE_FORM = {("sweep", "axes"), ("experiment", "countries", "fin_incentive_probs"),
             ("experiment", "countries", "time_incentive_probs")}


class ConfigError(ValueError):
    pass


def merge_config(base: Dict[str, Any], override: Dict[str, Any], path=()) -> Dict[str, Any]:
    """Recursively overlay ``override`` on ``base``; unknown keys raise."""
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = ".".join(path + (key,))
        if path in FREE_FORM:
            out[key] = value
            continue
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where!r} must be an object")
            if path + (key,) in FREE_FORM:
                out[key] = copy.deepcopy(value)
            else:
                out[key] = merge_config(base[key], value, path + (key,))
        else:
            out[key] = value
    return out


def load_config(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return copy.deepcopy(DEFAULTS)
    try:
        with open(path, encoding="utf-8") as fh:
            user = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(user, dict):
        raise ConfigError("config root must be an object")
    return merge_config(DEFAULTS, user)


def config_hash(cfg: Dict[str, Any]) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode("utf-8")).hexdigest()


def _params(cfg) -> ModelParams:
    try:
        return ModelParams(**cfg["params"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"params: {exc}") from exc


def _levels(probs: Dict[str, float]) -> Dict[float, float]:
    return {float(k): float(v) for k, v in probs.items()}


class Run:
    """Resolved configuration plus output helpers for one invocation."""

    def __init__(self, command: str, cfg: Dict[str, Any], out: Path):
        self.command = command
        self.cfg = cfg
        self.out = out
        self.fmt = cfg["format"]
        self.mode = cfg["mode"]
        self.seed = cfg["seed"]
        self.written: List[Path] = []

    def table(self, name: str, records, fields) -> Path:
        path = write_table(self.out / name, records, fields, self.fmt)
        self.written.append(path)
        return path


def cmd_beliefs(run: Run) -> int:
    sec = run.cfg["beliefs"]
    records = []
    for i, (R, t) in enumerate((R, t) for R in sec["R"] for t in sec["t_grid"]):
        rule = ParticipationRule(int(R), float(t))
        exact = belief_profile(rule)
        mc = mc_oracle(rule, int(sec["n_samples"]), sub_seed(run.seed, i))
        rec = {"R": rule.R, "t": rule.t}
        for f in ("mass_act", "E_va_act", "E_va_abstain", "E_vv_act", "E_vv_abstain"):
            rec[f] = getattr(exact, f)
            rec[f"mc_{f}"] = getattr(mc, f)
            rec[f"gap_{f}"] = abs(getattr(exact, f) - getattr(mc, f))
        rec["act_empty"] = exact.act_empty
        rec["abstain_empty"] = exact.abstain_empty
        records.append(rec)
    run.table("beliefs", records, list(records[0]))
    return EXIT_OK


def cmd_figure1(run: Run) -> int:
    sec = run.cfg["figure1"]
    base = _params(run.cfg).replace(R=1)
    pop = lattice_population(int(sec["lattice_side"]), run.seed)
    summary = []
    status = EXIT_OK
    for S in sec["S_vv"]:
        for c in sec["c"]:
            params = base.replace(S_vv=float(S), c=float(c))
            sim = simulate_grid(params, pop, run.mode)
            eq = sim.equilibrium
            panel = [
                {"v_a": float(a), "v_v": float(v), "B": int(b)}
                for a, v, b in zip(pop.v_a, pop.v_v, sim.B)
            ]
            name = f"figure1_S{float(S):+.2f}_c{float(c):.2f}"
            run.table(name, panel, ["v_a", "v_v", "B"])
            boundary = fitted_boundary(sim)
            summary.append(
                {
                    "S_vv": float(S),
                    "c": float(c),
                    "t_star": eq.t_star,
                    "participation_rate": eq.participation_rate,
                    "acting_fraction": sim.acting_fraction,
                    "boundary_intercept": boundary.intercept,
                    "residual": eq.residual,
                    "converged": eq.converged,
                    "panel": name,
                }
            )
            if not eq.converged:
                status = EXIT_CONVERGENCE
    run.table("figure1_summary", summary, list(summary[0]))
    return status


def cmd_sweep(run: Run) -> int:
    sec = run.cfg["sweep"]
    try:
        spec = SweepSpec(
            axes={k: list(v) for k, v in sec["axes"].items()},
            n=int(sec["n"]),
            seed=run.seed,
            mode=run.mode,
            base=_params(run.cfg),
            max_cells=int(sec["max_cells"]),
        )
    except ValueError as exc:
        raise ConfigError(f"sweep: {exc}") from exc
    cells = sweep(spec, workers=int(sec["workers"]))
    axes = list(spec.axes)
    records = [
        {
            "index": cell.index,
            **{k: cell.point[k] for k in axes},
            "t_star": cell.t_star,
            "rate_analytic": cell.participation_rate_analytic,
            "rate_empirical": cell.participation_rate_empirical,
            "stderr": cell.stderr,
            "converged": cell.converged,
        }
        for cell in cells
    ]
    run.table("sweep", records, list(records[0]))
    return EXIT_OK if all(c.converged for c in cells) else EXIT_CONVERGENCE


def cmd_costs(run: Run) -> int:
    points = reputational_cost_curve(run.cfg["costs"]["c_grid"])
    records = [p.__dict__ for p in points]
    run.table("costs", records, ["c", "intrinsic_cost", "extrinsic_cost"])
    return EXIT_OK


def cmd_calibrate(run: Run) -> int:
    targets = run.cfg["calibrate"]["target_rate"]
    if not isinstance(targets, list):
        targets = [targets]
    params = _params(run.cfg)
    records = []
    for target in targets:
        try:
            S = calibrate_norm(float(target), params, run.mode)
        except UnattainableRateError as exc:
            raise ConfigError(str(exc)) from exc
        eq = solve_threshold(params.replace(S_vv=S), run.mode)
        records.append({"target_rate": float(target), "S_vv": S, "t_star": eq.t_star,
                        "participation_rate": eq.participation_rate})
    run.table("calibrate", records, list(records[0]))
    return EXIT_OK


def cmd_experiment(run: Run) -> int:
    sec = run.cfg["experiment"]
    cs = sec["countries"]
    try:
        settings = CountrySettings(
            fin_norm_range=tuple(cs["fin_norm_range"]),
            time_norm_range=tuple(cs["time_norm_range"]),
            fin_incentive_probs=_levels(cs["fin_incentive_probs"]),
            time_incentive_probs=_levels(cs["time_incentive_probs"]),
            cost_range=tuple(cs["cost_range"]),
        )
        link = LinkSettings(mode=run.mode, **sec["link"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"experiment: {exc}") from exc

    countries = generate_countries(int(sec["n_countries"]), settings, seed=sub_seed(run.seed, 0))
    rows = generate_microdata(countries, int(sec["n_per_country"]), link, seed=sub_seed(run.seed, 1))
    run.written.append(write_countries(run.out / "countries", countries, run.fmt))
    run.written.append(write_microdata(run.out / "microdata", rows, run.fmt))

    X, y, names = design_matrix(rows, countries, link.channel, bool(sec["country_effects"]))
    try:
        fit = logistic_fit(X, y, names)
    except (SeparationError, ValueError) as exc:
        log.error("%s; try a larger n_per_country or more countries", exc)
        return EXIT_DEGENERATE
    run.table("coefficients", fit.table(), ["term", "estimate", "std_error", "z", "p_value"])
    if fit.dropped:
        log.warning("dropped collinear columns: %s", ", ".join(fit.dropped))

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "command": run.command,
        "seed": run.seed,
        "config_sha256": config_hash(run.cfg),
        "config": run.cfg,
        "versions": {
            "prosocial": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "fit": {
            "converged": fit.converged,
            "iterations": fit.iterations,
            "n": fit.n,
            "loglik": fit.loglik,
            "dropped": list(fit.dropped),
            "interaction_term": INTERACTION,
        },
        "outputs": {
            p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(run.written)
        },
    }
    path = run.out / "manifest.json"
    write_atomic(path, json_bytes(manifest))
    return EXIT_OK if fit.converged else EXIT_CONVERGENCE


COMMANDS = {
    "beliefs": cmd_beliefs,
    "figure1": cmd_figure1,
    "sweep": cmd_sweep,
    "costs": cmd_costs,
    "calibrate": cmd_calibrate,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prosocial", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="overrides the config seed")
    parser.add_argument("--out", help=f"output directory (default: ${OUT_ENV}, config 'out', ./out)")
    parser.add_argument("--format", choices=("csv", "json"), help="table format")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve(args) -> Run:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.format is not None:
        cfg["format"] = args.format
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg['format']!r}")
    if cfg["mode"] not in ("rational", "naive"):
        raise ConfigError(f"mode must be rational or naive, got {cfg['mode']!r}")
    if args.command in STOCHASTIC and cfg["seed"] is None:
        raise ConfigError(f"'{args.command}' is stochastic: set a seed (--seed or config 'seed')")
    if cfg["seed"] is not None and (not isinstance(cfg["seed"], int) or cfg["seed"] < 0):
        raise ConfigError("seed must be a non-negative integer")
    out = args.out or os.environ.get(OUT_ENV) or cfg["out"] or "out"
    return Run(args.command, cfg, Path(out))


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        run = resolve(args)
        status = COMMANDS[args.command](run)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_IO
    for path in run.written:
        log.info("wrote %s", path)
    return status


if __name__ == "__main__":
    sys.exit(main())
