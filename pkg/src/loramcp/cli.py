"""Batch front-end: scenario ingestion, analytic / simulate / compare / figure.

Outputs are plot-ready CSV files (UTF-8, '\\n' endings, '.' decimals) with a
timing-free reproducibility header, plus a manifest.json per run directory
that additionally records wall-clock duration.  Exit codes: 0 success,
1 comparison beyond tolerance, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict

import numpy as np

from . import __version__
from .analytic import curve
from .config import (
    DEFAULT_PARAMS,
    FULL,
    PERFECT_ORTHOGONALITY,
    NetworkParams,
    ScenarioError,
    Variant,
    build_sf_table,
    load_scenario,
    parse_variant,
    single_interfering_sf,
    validate_window,
)
from .simulator import SimConfig, SimResult, simulate

DEFAULT_GRID = "-12:6:1"
DEFAULT_TOLERANCE = (0.03, 0.06)
ALL_Q = tuple(range(1, 7))

FIGURE_IDS = ("fig2a", "fig2b", "fig3", "fig4", "fig5")


class InputError(ValueError):
    pass


def parse_grid(text: str) -> tuple[float, ...]:
    """'a:b:step' inclusive dB grid, ascending."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"grid must be 'a:b:step', got {text!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError as e:
        raise InputError(f"grid values must be numbers: {e}") from e
    if step <= 0 or b < a:
        raise InputError(f"grid needs step > 0 and b >= a, got {text!r}")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return tuple(a + i * step for i in range(n))


def parse_q0_list(text: str) -> tuple[int, ...]:
    try:
        qs = tuple(int(p) for p in text.split(","))
    except ValueError as e:
        raise InputError(f"--q0 must be a comma list of SF indexes, got {text!r}") from e
    for q in qs:
        if not 1 <= q <= 6:
            raise InputError(f"--q0 entries must be in 1..6, got {q}")
    return qs


def parse_tolerance(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"--tolerance must be 'mean,max', got {text!r}")
    mean_tol, max_tol = (float(p) for p in parts)
    if mean_tol <= 0 or max_tol <= 0:
        raise InputError("tolerances must be positive")
    return mean_tol, max_tol


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_csv(path: str, header: list[str], rows, meta: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for key, value in meta.items():
            f.write(f"# {key}: {value}\n")
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _base_meta(args, command: str) -> dict:
    return {
        "tool": f"loramcp {__version__}",
        "command": command,
        "scenario": getattr(args, "scenario", None) or "(built-in defaults)",
        "seed": getattr(args, "seed", None),
        "grid": getattr(args, "grid", None),
        "variant": getattr(args, "variant", None),
    }


def _write_manifest(out_dir: str, args, command: str, params: NetworkParams, outputs: list[str], t0: float) -> None:
    doc = {
        "tool": "loramcp",
        "version": __version__,
        "command": command,
        "argv": [a for a in sys.argv[1:]],
        "scenario": getattr(args, "scenario", None),
        "params": asdict(params),
        "seed": getattr(args, "seed", None),
        "variant": getattr(args, "variant", None),
        "grid": getattr(args, "grid", None),
        "outputs": sorted(outputs),
        "duration_s": time.perf_counter() - t0,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8", newline="\n") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def _load_params(args) -> NetworkParams:
    params = load_scenario(args.scenario) if args.scenario else DEFAULT_PARAMS
    if getattr(args, "no_noise", False):
        params = params.without_noise()
    return params


def _sf_name(q: int) -> str:
    return f"sf{q + 6}"


def _analytic_rows(q0: int, grid, params, table, variant: Variant):
    return [
        (r.gamma_db, r.p_succ, r.noise_factor, r.laplace_intra, r.laplace_inter)
        for r in curve(q0, grid, params, table, variant)
    ]


ANALYTIC_HEADER = ["gamma_db", "p_succ", "noise_factor", "laplace_intra", "laplace_inter"]
SIM_HEADER = ["gamma_db", "p_hat", "ci_half_width", "n_trials"]


def _sim_rows(res: SimResult):
    return [
        (g, res.p_hat[i], res.ci_half_width[i], res.n_trials)
        for i, g in enumerate(res.gamma_grid_db)
    ]


def cmd_analytic(args) -> int:
    t0 = time.perf_counter()
    params = _load_params(args)
    table = build_sf_table(25, params.power_scheme)
    validate_window(params, table)
    variant = parse_variant(args.variant)
    grid = parse_grid(args.grid)
    os.makedirs(args.out, exist_ok=True)
    outputs = []
    meta = _base_meta(args, "analytic")
    for q0 in parse_q0_list(args.q0):
        name = f"analytic_{_sf_name(q0)}_{variant.label()}.csv"
        _write_csv(os.path.join(args.out, name), ANALYTIC_HEADER, _analytic_rows(q0, grid, params, table, variant), meta)
        outputs.append(name)
    _write_manifest(args.out, args, "analytic", params, outputs, t0)
    return 0


def _make_sim_config(args, params, table, q0: int, variant: Variant, grid) -> SimConfig:
    return SimConfig(
        params=params,
        table=table,
        q0=q0,
        gamma_grid_db=grid,
        n_deployments=args.deployments,
        n_frames_per_deployment=args.frames,
        window_radius=args.window_radius,
        seed=args.seed,
        deployment_mode=args.mode,
        variant=variant,
        n_workers=args.workers,
    )


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    params = _load_params(args)
    table = build_sf_table(25, params.power_scheme)
    variant = parse_variant(args.variant)
    grid = parse_grid(args.grid)
    os.makedirs(args.out, exist_ok=True)
    outputs = []
    meta = _base_meta(args, "simulate")
    for q0 in parse_q0_list(args.q0):
        res = simulate(_make_sim_config(args, params, table, q0, variant, grid))
        name = f"sim_{_sf_name(q0)}_{variant.label()}.csv"
        _write_csv(os.path.join(args.out, name), SIM_HEADER, _sim_rows(res), meta)
        outputs.append(name)
    _write_manifest(args.out, args, "simulate", params, outputs, t0)
    return 0


def cmd_compare(args) -> int:
    t0 = time.perf_counter()
    params = _load_params(args)
    table = build_sf_table(25, params.power_scheme)
    variant = parse_variant(args.variant)
    grid = parse_grid(args.grid)
    mean_tol, max_tol = parse_tolerance(args.tolerance)
    os.makedirs(args.out, exist_ok=True)
    outputs = []
    meta = _base_meta(args, "compare")
    all_pass = True
    for q0 in parse_q0_list(args.q0):
        analytic_rows = _analytic_rows(q0, grid, params, table, variant)
        res = simulate(_make_sim_config(args, params, table, q0, variant, grid))
        p_succ = [row[1] for row in analytic_rows]
        dev = [abs(p - float(ph)) for p, ph in zip(p_succ, res.p_hat)]
        mean_dev = sum(dev) / len(dev)
        max_dev = max(dev)
        ok = bool(mean_dev <= mean_tol and max_dev <= max_tol)
        all_pass = all_pass and ok
        report = {
            "q0": q0,
            "sf_label": q0 + 6,
            "variant": variant.label(),
            "gamma_db": list(grid),
            "p_succ": p_succ,
            "p_hat": res.p_hat.tolist(),
            "abs_dev": dev,
            "ci_half_width": res.ci_half_width.tolist(),
            "n_trials": res.n_trials,
            "mean_abs_dev": mean_dev,
            "max_abs_dev": max_dev,
            "tolerance": {"mean": mean_tol, "max": max_tol},
            "flagged_gamma_db": [g for g, d in zip(grid, dev) if d > max_tol],
            "pass": ok,
        }
        name = f"compare_{_sf_name(q0)}_{variant.label()}.json"
        with open(os.path.join(args.out, name), "w", encoding="utf-8", newline="\n") as f:
            json.dump(report, f, indent=2, sort_keys=True)
            f.write("\n")
        csv_name = f"compare_{_sf_name(q0)}_{variant.label()}.csv"
        _write_csv(
            os.path.join(args.out, csv_name),
            ["gamma_db", "p_succ", "p_hat", "abs_dev"],
            [(g, p, ph, d) for g, p, ph, d in zip(grid, p_succ, res.p_hat, dev)],
            meta,
        )
        outputs.extend([name, csv_name])
        status = "pass" if ok else "FAIL"
        print(f"compare {_sf_name(q0)} {variant.label()}: mean|dev|={mean_dev:.4f} max|dev|={max_dev:.4f} [{status}]")
        if not ok and res.n_trials * mean_tol**2 < 4.0:
            print(
                f"  note: with n_trials={res.n_trials} the MC noise floor "
                f"(~{1.96 * math.sqrt(0.25 / res.n_trials):.4f}) may exceed the requested tolerance",
                file=sys.stderr,
            )
    _write_manifest(args.out, args, "compare", params, outputs, t0)
    return 0 if all_pass else 1


def _figure_runs(figure_id: str, args):
    """(subdir, params, q0, variant) setups behind each named dataset."""
    base = _load_params(args)
    runs = []
    if figure_id in ("fig2a", "fig2b"):
        lam_g = 0.0 if figure_id == "fig2a" else base.lambda_g
        params = NetworkParams(
            lambda_g=lam_g, lambda_ed=100.0, r_cluster=base.r_cluster, eta=base.eta,
            alpha=base.alpha, a=base.a, t_c=base.t_c, noise_mw=base.noise_mw, power_scheme="SamePower",
        )
        for q0 in ALL_Q:
            for variant in (FULL, PERFECT_ORTHOGONALITY):
                runs.append(("", params, q0, variant))
    elif figure_id == "fig3":
        for lam_ed in (50.0, 100.0, 200.0):
            params = NetworkParams(
                lambda_g=0.0, lambda_ed=lam_ed, r_cluster=base.r_cluster, eta=base.eta,
                alpha=base.alpha, a=base.a, t_c=base.t_c, noise_mw=base.noise_mw, power_scheme="SamePower",
            )
            for q0 in ALL_Q:
                for variant in (FULL, PERFECT_ORTHOGONALITY):
                    runs.append((f"led{int(lam_ed)}_", params, q0, variant))
    elif figure_id in ("fig4", "fig5"):
        scheme = "SamePower" if figure_id == "fig4" else "SfBased"
        params = NetworkParams(
            lambda_g=0.0, lambda_ed=200.0, r_cluster=base.r_cluster, eta=base.eta,
            alpha=base.alpha, a=base.a, t_c=base.t_c, noise_mw=base.noise_mw, power_scheme=scheme,
        )
        for q0 in ALL_Q:
            for q_star in ALL_Q:
                runs.append(("", params, q0, single_interfering_sf(q_star)))
    else:
        raise InputError(f"unknown figure id {figure_id!r}; expected one of {FIGURE_IDS}")
    return runs


def cmd_figure(args) -> int:
    t0 = time.perf_counter()
    runs = _figure_runs(args.figure_id, args)
    grid = parse_grid(args.grid)
    out_dir = os.path.join(args.out, args.figure_id)
    os.makedirs(out_dir, exist_ok=True)
    outputs = []
    meta = _base_meta(args, f"figure {args.figure_id}")
    last_params = runs[0][1]
    for prefix, params, q0, variant in runs:
        table = build_sf_table(25, params.power_scheme)
        tag = f"{prefix}{_sf_name(q0)}_{variant.label()}"
        a_name = f"analytic_{tag}.csv"
        _write_csv(os.path.join(out_dir, a_name), ANALYTIC_HEADER, _analytic_rows(q0, grid, params, table, variant), meta)
        res = simulate(_make_sim_config(args, params, table, q0, variant, grid))
        s_name = f"sim_{tag}.csv"
        _write_csv(os.path.join(out_dir, s_name), SIM_HEADER, _sim_rows(res), meta)
        outputs.extend([a_name, s_name])
        last_params = params
    _write_manifest(out_dir, args, f"figure {args.figure_id}", last_params, outputs, t0)
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", help="scenario file (TOML key/value); defaults to the built-in paper scenario")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--grid", default=DEFAULT_GRID, help="threshold grid in dB as a:b:step (default %(default)s)")
    p.add_argument("--q0", default="1,2,3,4,5,6", help="comma list of desired SF indexes 1..6 (default all)")
    p.add_argument("--no-noise", action="store_true", help="force sigma^2 = 0 (pure interference)")


def _add_sim_options(p: argparse.ArgumentParser, seed_required: bool = True) -> None:
    p.add_argument("--seed", type=int, required=seed_required, help="master RNG seed")
    p.add_argument("--deployments", type=int, default=200, help="replications (default %(default)s)")
    p.add_argument("--frames", type=int, default=100, help="frames per replication (default %(default)s)")
    p.add_argument("--window-radius", type=float, default=15.0, help="simulation disc radius, km (default %(default)s)")
    p.add_argument("--mode", choices=("Redraw", "Fixed"), default="Redraw", help="deployment averaging mode")
    p.add_argument("--workers", type=int, default=1, help="parallel workers (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loramcp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"loramcp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="closed-form success-probability curves")
    _add_common(p)
    p.add_argument("--variant", default="Full", help="model variant (Full, PerfectOrthogonality, SingleGateway, SingleInterferingSf:<q>, SamePowerOverride)")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", help="Monte Carlo success-probability curves")
    _add_common(p)
    p.add_argument("--variant", default="Full")
    _add_sim_options(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="run both paths and report deviations")
    _add_common(p)
    p.add_argument("--variant", default="Full")
    _add_sim_options(p)
    p.add_argument("--tolerance", default="0.03,0.06", help="mean,max deviation bounds (default %(default)s)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("figure", help="emit the dataset bundle behind a named figure")
    p.add_argument("figure_id", help=f"one of {', '.join(FIGURE_IDS)}")
    _add_common(p)
    _add_sim_options(p)
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, InputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
