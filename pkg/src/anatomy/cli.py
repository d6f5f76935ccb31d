"""Command-line front end: trajectories, sweeps, phase-space grids, validation.

Subcommands write CSV data files plus simple SVG figures into an output
directory, together with a manifest listing every output with its checksum.
Data files are byte-deterministic for identical inputs; the manifest also
records wall-clock time and input hashes, which is why determinism is
asserted on the data files and not on the manifest itself.

Exit codes: 0 success, 1 validation or physics failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .collision import UnlikelyPostselectionError, compute_trajectory
from .amplitudes import emission_probabilities
from .config import ConfigError, build_config, load_config_file
from .husimi import husimi_effect_route, husimi_wavefunction_route
from .svg import heatmap, line_plot
from .sweep import default_theta_grid, run_sweep, sweep_table
from .validate import run_validation
from .wigner import reduced_mode_state, wigner_eval
from .oracle import CapOverflowError, MAX_BINS

ENV_OUT_DIR = "ANATOMY_OUT_DIR"


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    """Comma-separated, dot-decimal, LF line endings, header mandatory."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_value(v) for v in row) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class _Run:
    """Collects outputs and writes the manifest at the end."""

    def __init__(self, args, subcommand: str):
        self.t0 = time.monotonic()
        self.subcommand = subcommand
        self.out_dir = Path(
            args.out_dir or os.environ.get(ENV_OUT_DIR) or "anatomy_out"
        )
        self.input_hashes = {}
        file_values = {}
        if args.config:
            cfg_path = Path(args.config)
            file_values = load_config_file(cfg_path)
            self.input_hashes[str(cfg_path)] = _sha256(cfg_path)
        overrides = {
            "gamma_tau": args.gamma_tau,
            "theta_over_pi": args.theta_over_pi,
            "n_bins": args.n_bins,
            "photon_cap": args.photon_cap,
            "grid_half_width": getattr(args, "grid_half_width", None),
            "grid_step": getattr(args, "grid_step", None),
        }
        self.cfg = build_config(file_values, overrides)
        self.outputs: list[Path] = []

    def prepare_dir(self) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        probe = self.out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        self.outputs.append(p)
        return p

    def finish(self) -> None:
        manifest = {
            "tool": "anatomy",
            "version": __version__,
            "subcommand": self.subcommand,
            "config": {
                "gamma_tau": self.cfg.gamma_tau,
                "theta_over_pi": self.cfg.theta_over_pi,
                "n_bins": self.cfg.n_bins,
                "photon_cap": self.cfg.photon_cap,
                "grid_half_width": self.cfg.grid_half_width,
                "grid_step": self.cfg.grid_step,
            },
            "out_dir": str(self.out_dir),
            "wall_clock_seconds": time.monotonic() - self.t0,
            "input_hashes": self.input_hashes,
            "outputs": {p.name: _sha256(p) for p in self.outputs},
        }
        (self.out_dir / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def cmd_trajectory(run: _Run, args) -> int:
    cfg = run.cfg
    traj = compute_trajectory(cfg)
    for eps in ("g", "e"):
        traj.require_outcome(eps)
    header = [
        "t", "rho_gg", "rho_ee", "re_rho_ge", "im_rho_ge",
        "sigma_wv_g", "sigma_wv_e", "J_g", "J_e", "cum_dN_g", "cum_dN_e",
    ]
    rho = traj.rho
    rows = []
    for n in range(cfg.n_bins + 1):
        rows.append([
            float(traj.times[n]),
            float(np.real(rho[n, 0, 0])), float(np.real(rho[n, 1, 1])),
            float(np.real(rho[n, 0, 1])), float(np.imag(rho[n, 0, 1])),
            float(np.real(traj.sigma_wv["g"][n])), float(np.real(traj.sigma_wv["e"][n])),
            float(traj.J["g"][n]), float(traj.J["e"][n]),
            float(traj.cum_dN["g"][n]), float(traj.cum_dN["e"][n]),
        ])
    write_csv(run.path("trajectory.csv"), header, rows)

    unconditional = (
        traj.P["g"] * traj.cum_dN["g"] + traj.P["e"] * traj.cum_dN["e"]
    )
    line_plot(
        run.path("trajectory.svg"),
        traj.times / cfg.tau,
        {
            "cond. on g": traj.cum_dN["g"],
            "cond. on e": traj.cum_dN["e"],
            "unconditional": unconditional,
        },
        xlabel="t / tau",
        ylabel="field excitation change",
        title=f"gamma*tau={cfg.gamma_tau:.4g}, theta/pi={cfg.theta_over_pi:.4g}",
    )
    return 0


def cmd_sweep(run: _Run, args) -> int:
    if args.points < 2:
        print("error: --points must be at least 2", file=sys.stderr)
        return 2
    thetas = default_theta_grid(args.points)
    rows = run_sweep(
        run.cfg, thetas, compare_truncation=args.compare_truncation, jobs=args.jobs
    )
    header, table = sweep_table(rows, compare_truncation=args.compare_truncation)
    write_csv(run.path("sweep.csv"), header, table)
    x = [r.theta / math.pi for r in rows]
    line_plot(
        run.path("sweep_delta_n.svg"),
        x,
        {
            "dN_g": [r.delta_n["g"] for r in rows],
            "dN_e": [r.delta_n["e"] for r in rows],
            "dN_g (carrier mode)": [r.delta_n_mode["g"] for r in rows],
            "dN_e (carrier mode)": [r.delta_n_mode["e"] for r in rows],
        },
        xlabel="theta / pi",
        ylabel="excitation change",
        title=f"gamma*tau={run.cfg.gamma_tau:.4g}",
    )
    line_plot(
        run.path("sweep_negativity.svg"),
        x,
        {
            "N(W_g)": [r.neg["g"] for r in rows],
            "N(W_e)": [r.neg["e"] for r in rows],
        },
        xlabel="theta / pi",
        ylabel="Wigner negativity",
    )
    return 0


def cmd_wigner(run: _Run, args) -> int:
    cfg = run.cfg
    amps = emission_probabilities(cfg)
    for eps in ("g", "e"):
        state = reduced_mode_state(amps, cfg, eps)
        grid = wigner_eval(
            state,
            half_width=cfg.grid_half_width or 3.5,
            step=cfg.grid_step or 0.02,
        )
        pts = grid.points()
        rows = [
            [float(np.real(p)), float(np.imag(p)), float(v)]
            for p, v in zip(pts.ravel(), grid.values.ravel())
        ]
        write_csv(run.path(f"wigner_{eps}.csv"), ["re_mu", "im_mu", "W"], rows)
        heatmap(
            run.path(f"wigner_{eps}.svg"),
            np.real(pts[0, :]), np.imag(pts[:, 0]), grid.values,
            xlabel="Re mu", ylabel="Im mu",
            title=f"W_{eps}, negativity={grid.negativity:.3e}",
        )
    return 0


def cmd_husimi_slice(run: _Run, args) -> int:
    cfg = run.cfg
    n = args.bin if args.bin is not None else cfg.n_bins // 2
    if not 0 <= n <= cfg.n_bins - 1:
        print(f"error: bin must be in [0, {cfg.n_bins - 1}]", file=sys.stderr)
        return 2
    traj = compute_trajectory(cfg)
    amps = emission_probabilities(cfg)
    for eps in ("g", "e"):
        if args.route == "effect":
            sl = husimi_effect_route(traj, cfg, eps, n)
        else:
            sl = husimi_wavefunction_route(amps, cfg, eps, n)
        pts = sl.points()
        rows = [
            [float(np.real(p)), float(np.imag(p)), float(v)]
            for p, v in zip(pts.ravel(), sl.values.ravel())
        ]
        stem = f"husimi_{eps}_bin{n}_{sl.route}"
        write_csv(run.path(f"{stem}.csv"), ["re_s", "im_s", "Q"], rows)
        sidecar = {
            "bin": n,
            "alpha_n": sl.alpha_n,
            "route": sl.route,
            "grid": {"half_width": sl.half_width, "step": sl.step, "cells": sl.values.shape[0]},
            "dt": sl.dt,
            "riemann_norm": sl.norm(),
        }
        run.path(f"{stem}.json").write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0


def cmd_validate(run: _Run, args) -> int:
    oracle_bins = 200 if args.quick else min(args.oracle_bins, MAX_BINS)
    report = run_validation(run.cfg, oracle_bins=oracle_bins)
    run.path("validation.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for check in report["checks"]:
        status = "PASS" if check["pass"] else "FAIL"
        print(
            f"{status}  {check['name']}: max_error={check['max_error']:.3e} "
            f"tol={check['tolerance']:.3e}"
        )
    return 0 if report["all_pass"] else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anatomy",
        description="Conditional energetics of a resonant single-qubit gate in a waveguide",
    )
    parser.add_argument("--version", action="version", version=f"anatomy {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value parameter file")
    common.add_argument("--gamma-tau", dest="gamma_tau", type=float)
    common.add_argument("--theta-over-pi", dest="theta_over_pi", type=float)
    common.add_argument("--n-bins", dest="n_bins", type=int)
    common.add_argument("--photon-cap", dest="photon_cap", type=int, choices=(1, 2))
    common.add_argument("--grid-half-width", dest="grid_half_width", type=float)
    common.add_argument("--grid-step", dest="grid_step", type=float)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out-dir", dest="out_dir")

    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("trajectory", parents=[common], help="conditional time series")
    p_sweep = sub.add_parser("sweep", parents=[common], help="gate-angle sweep")
    p_sweep.add_argument("--points", type=int, default=64)
    p_sweep.add_argument("--compare-truncation", action="store_true")
    p_wig = sub.add_parser("wigner", parents=[common], help="carrier-mode Wigner grids")
    p_hus = sub.add_parser("husimi-slice", parents=[common], help="one bin's Husimi grid")
    p_hus.add_argument("--bin", type=int)
    p_hus.add_argument("--route", choices=("effect", "wavefunction"), default="effect")
    p_val = sub.add_parser("validate", parents=[common], help="run the validation suite")
    p_val.add_argument("--oracle-bins", dest="oracle_bins", type=int, default=800)
    p_val.add_argument("--quick", action="store_true")
    return parser


_COMMANDS = {
    "trajectory": cmd_trajectory,
    "sweep": cmd_sweep,
    "wigner": cmd_wigner,
    "husimi-slice": cmd_husimi_slice,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        run = _Run(args, args.subcommand)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        run.prepare_dir()
    except OSError as exc:
        print(f"error: cannot write to {run.out_dir}: {exc}", file=sys.stderr)
        return 2
    try:
        code = _COMMANDS[args.subcommand](run, args)
    except (UnlikelyPostselectionError, CapOverflowError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    run.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
