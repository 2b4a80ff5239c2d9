"""Experiment runner CLI.

One subcommand per solver family, each driven by an INI configuration and
emitting deterministic CSV: ``delayheat <subcommand> --config FILE
[--out DIR] [--workers N]``.  Floats are written with 17 significant digits
(round-trip exact), so identical configs produce byte-identical files
regardless of the worker count.  Exit codes: 0 success, 2 configuration
error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import delay_ode, illposed, laser, spectral, stability
from .config import ConfigError, RunConfig, parse_config
from .delayed_exp import DelayedExp
from .numerics import BracketError, ConvergenceError, UniformGrid

__all__ = ["main", "ordered_map", "write_csv", "write_keyvalues"]

OUTPUT_DIR_ENV = "DELAYHEAT_OUT"


def _format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header, rows) -> None:
    """Write rows as deterministic CSV: one header line, '\\n' endings,
    floats at 17 significant digits."""
    header = list(header)
    lines = [",".join(str(name) for name in header)]
    for row in rows:
        row = list(row)
        if len(row) != len(header):
            raise ValueError(
                f"row arity {len(row)} does not match header arity {len(header)}"
            )
        lines.append(",".join(_format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="")


def write_keyvalues(path, mapping) -> None:
    """Flat key=value listing with the CSV float formatting rule."""
    lines = [f"{key}={_format_value(value)}" for key, value in mapping.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="")


def ordered_map(fn, items, workers: int = 1) -> list:
    """Map preserving input order, optionally on a thread pool."""
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _run_delayed_exp(cfg: RunConfig, out: Path, workers: int) -> list[Path]:
    p = cfg.parameters
    t0 = p["t0"] if p.get("t0") is not None else -p["tau"]
    grid = UniformGrid(t0, p["t1"], p["cells"])
    dexp = DelayedExp(p["b"], p["tau"])
    rows = [(t, dexp.value(t)) for t in grid.nodes]
    path = out / "delayed_exp.csv"
    write_csv(path, ("t", "value"), rows)
    return [path]


def _run_ode(cfg: RunConfig, out: Path, workers: int) -> list[Path]:
    p = cfg.parameters
    a_values = p["a"]

    def solve_one(a):
        problem = delay_ode.DelayOdeProblem.from_callables(
            a, p["b"], p["tau"], p["T"], p["u0"],
            history=p["history"], forcing=p["forcing"],
            cells_per_tau=p["cells_per_tau"],
        )
        if p["method"] == "steps":
            return delay_ode.solve_step_method(problem)
        return delay_ode.solve_closed_form(problem)

    trajectories = ordered_map(solve_one, a_values, workers)
    paths = []
    for idx, traj in enumerate(trajectories):
        nodes = traj.grid.nodes
        live = nodes <= p["T"] * (1 + 1e-12)
        path = out / f"ode_{idx:02d}.csv"
        write_csv(path, ("t", "u"), zip(nodes[live], traj.values[live]))
        paths.append(path)
    return paths


def _run_heat(cfg: RunConfig, out: Path, workers: int) -> list[Path]:
    p = cfg.parameters
    basis = spectral.SpectralBasis(p["kind"], p["L"], p["n_modes"])
    u0_fn = p["u0"]
    hist_fn = p["history"]
    ft, fs = p["forcing_time"], p["forcing_space"]
    forcing = None
    if ft is not None or fs is not None:
        ft = ft if ft is not None else (lambda t: 1.0)
        fs = fs if fs is not None else (lambda x: 1.0 + 0.0 * np.asarray(x))

        def forcing(t, x):
            return float(ft(t)) * np.asarray(fs(x), dtype=float)

    problem = spectral.assemble_from_pde(
        p["c_a"], p["c0"], p["c_a_delay"], p["c0_delay"],
        basis, p["tau"], p["T"], p["cells_per_tau"],
        initial=lambda x: np.asarray(u0_fn(x), dtype=float),
        history=lambda t, x: np.asarray(hist_fn(x), dtype=float),
        forcing=forcing,
        gamma_left=p["gamma_left"],
        gamma_right=p["gamma_right"],
        x_cells=p["x_cells"],
    )
    trajectories = spectral.solve(problem, workers=workers)
    times = trajectories[0].grid.nodes
    mode_values = np.vstack([traj.values for traj in trajectories])
    live = times <= p["T"] * (1 + 1e-12)
    times, mode_values = times[live], mode_values[:, live]
    paths = []
    path = out / "heat_modes.csv"
    header = ["t"] + [f"u_{n}" for n in range(1, basis.n_modes + 1)]
    write_csv(path, header, np.column_stack([times, mode_values.T]))
    paths.append(path)
    x_nodes = np.linspace(0.0, p["L"], p["x_out"])
    modes_at_x = basis.mode_matrix(x_nodes)
    for idx, t_snap in enumerate(p["snapshot_times"]):
        i = int(np.argmin(np.abs(times - t_snap)))
        snap = mode_values[:, i] @ modes_at_x
        path = out / f"heat_field_{idx:02d}.csv"
        write_csv(path, ("x", "u"), zip(x_nodes, snap))
        paths.append(path)
    return paths


def _run_stability(cfg: RunConfig, out: Path, workers: int) -> list[Path]:
    p = cfg.parameters
    bounds = stability.CoefficientBounds(
        p["kappa"], p["tilde_kappa"], p["tilde_lambda"], p["tau"])
    cert = stability.build_certificate(bounds, margin=p["margin"], eps=p["eps"])
    record = {
        "feasible": cert.feasible,
        "eps": cert.eps,
        "rho_at_0": cert.rho_at_0,
        "rho_at_tau": cert.rho_at_tau,
        "rho0": cert.rho0,
        "alpha1": cert.alpha1,
        "alpha2": cert.alpha2,
        "beta": cert.beta,
        "omega": cert.omega,
        "C": cert.C,
        "C_equiv": cert.C_equiv,
    }
    for key, value in record.items():
        print(f"{key}={_format_value(value)}")
    path = out / "stability_certificate.txt"
    write_keyvalues(path, record)
    paths = [path]
    if p["empirical"]:
        rng = np.random.default_rng(p["seed"])
        trace, bound, _ = stability.empirical_energy_check(
            bounds, rng, margin=p["margin"],
            n_modes=p["n_modes"], length=p["length"],
            cells_per_tau=p["cells_per_tau"],
            horizon_intervals=p["horizon_intervals"],
        )
        path = out / "stability_empirical.csv"
        write_csv(path, ("t", "energy", "bound"), zip(trace.times, trace.values, bound))
        paths.append(path)
    return paths


def _run_illposed(cfg: RunConfig, out: Path, workers: int) -> list[Path]:
    p = cfg.parameters
    tol = cfg.numerics["lambert_tol"]
    max_iter = cfg.numerics["lambert_max_iter"]
    bisect_tol = cfg.numerics["bisect_tol"]
    mode = p["mode"]
    if mode == "scan-m1":
        def one(lam):
            return illposed.root_m1(
                illposed.CharProblem(1, p["alpha"], p["eps"], p["tau"], lam),
                tol=tol, max_iter=max_iter)
        roots = ordered_map(one, p["lambdas"], workers)
        rows = [
            (r.problem.lam, r.omega.real, r.omega.imag, r.v.real, r.v.imag,
             abs(r.v) / r.problem.lam, r.residual)
            for r in roots
        ]
        path = out / "illposed_scan.csv"
        write_csv(path, ("lambda", "re_omega", "im_omega", "re_v", "im_v",
                         "abs_v_over_lambda", "residual"), rows)
        paths = [path]
        if p["blowup_time"] is not None:
            table = illposed.blowup_table(roots, p["blowup_time"])
            path = out / "illposed_blowup.csv"
            write_csv(path, ("lambda", "norm"), table)
            paths.append(path)
        return paths
    if mode == "root-m2":
        root = illposed.root_m2(p["lam"], p["alpha"], bisect_tol=bisect_tol)
        path = out / "illposed_root_m2.csv"
        write_csv(path, ("lambda", "re_omega", "im_omega", "residual"),
                  [(p["lam"], root.omega.real, root.omega.imag, root.residual)])
        return [path]
    rows = [
        (c.k, c.x, c.lam, c.residual)
        for c in illposed.construct_eigenvalues(
            p["m"], p["alpha"], p["eps"], p["tau"],
            range(1, p["k_max"] + 1), bisect_tol=bisect_tol)
    ]
    path = out / "illposed_construct.csv"
    write_csv(path, ("k", "x_k", "lambda_k", "residual"), rows)
    return [path]


def _laser_config(p: dict) -> laser.LaserConfig:
    overrides = {
        key: p[key]
        for key in ("gamma_heat", "c_e", "tau", "lambda_th", "G", "r_f", "t_p",
                    "alpha_pen", "J_fluence", "L", "theta_l", "theta0")
        if p.get(key) is not None
    }
    return laser.LaserConfig(eps=p["eps"], **overrides)


def _run_laser(cfg: RunConfig, out: Path, workers: int) -> list[Path]:
    p = cfg.parameters
    lcfg = _laser_config(p)
    result = laser.simulate(
        lcfg, n_modes=p["n_modes"], horizon=p["T"],
        cells_per_tau=p["cells_per_tau"], x_cells=p["x_cells"],
        n_x_out=p["x_out"], workers=workers,
    )
    paths = []
    path = out / "laser_modes.csv"
    header = ["t"] + [f"u_{n}" for n in range(1, p["n_modes"] + 1)]
    write_csv(path, header, np.column_stack([result.times, result.mode_values.T]))
    paths.append(path)
    path = out / "laser_field.csv"
    rows = (
        (t, x, result.field[i, j])
        for i, t in enumerate(result.times)
        for j, x in enumerate(result.x_nodes)
    )
    write_csv(path, ("t", "x", "theta"), rows)
    paths.append(path)

    live = result.times >= 0.0
    surface = laser.find_peak(result.times[live], result.trace_at(0.0)[live])
    averaged = laser.find_peak(result.times[live], result.mean_trace()[live])
    summary = {
        "t_peak_surface": surface.t_peak,
        "theta_peak_surface": surface.value,
        "t_peak_surface_refined": surface.t_refined,
        "theta_peak_surface_refined": surface.value_refined,
        "t_peak_film_average": averaged.t_peak,
        "theta_peak_film_average": averaged.value,
        "high_mode_norm_at_peak": laser.high_mode_norm(result, surface.t_peak),
    }
    path = out / "laser_summary.txt"
    write_keyvalues(path, summary)
    paths.append(path)

    times = [k * lcfg.t_p for k in range(5)]
    rows = [
        (n, t, laser.modal_source(lcfg, n, t, x_cells=p["x_cells"]),
         laser.printed_modal_coefficient(lcfg, n, t))
        for n in range(1, p["n_modes"] + 1)
        for t in times
    ]
    path = out / "laser_source_comparison.csv"
    write_csv(path, ("n", "t", "quadrature", "printed_form"), rows)
    paths.append(path)
    return paths


_RUNNERS = {
    "delayed-exp": _run_delayed_exp,
    "ode": _run_ode,
    "heat": _run_heat,
    "stability": _run_stability,
    "illposed": _run_illposed,
    "laser": _run_laser,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delayheat",
        description="Delay heat-equation experiment runner (deterministic CSV output).",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _RUNNERS:
        s = sub.add_parser(name, help=f"run the {name} experiment")
        s.add_argument("--config", required=True, help="INI configuration file")
        s.add_argument("--out", default=None,
                       help=f"output directory (default: ${OUTPUT_DIR_ENV} or cwd)")
        s.add_argument("--workers", type=int, default=1,
                       help="thread workers for independent solves")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    out = Path(args.out or os.environ.get(OUTPUT_DIR_ENV) or ".")
    try:
        config_path = Path(args.config)
        try:
            text = config_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        cfg = parse_config(text, args.subcommand, base_dir=config_path.parent)
        out.mkdir(parents=True, exist_ok=True)
        paths = _RUNNERS[args.subcommand](cfg, out, max(1, args.workers))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, BracketError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
