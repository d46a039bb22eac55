"""Command-line driver: exact, trajectory and mean-field runs over (omega, delta) grids.

Every run writes CSV files plus ``manifest.json`` into the output directory.
Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 partial
sweep (some grid points failed, the rest were written).
"""

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .config import OUT_ENV, parse_config
from .errors import NumericalError, ValidationError
from .lattice import PRESETS, build_coupling_matrices, get_preset
from .meanfield import bistable_region_scan, mean_field_sums
from .observables import build_histogram, coherence_identity_residual, summarize
from .operators import build_model
from .qjmc import run_ensemble, stationary_window_samples, write_record
from .steady import solve_model

__all__ = ["main", "build_parser", "run"]

OBS_HEADER = ["omega", "delta", "n_s", "k_s_over_N_gamma", "c_1", "c_2", "c_3",
              "identity_residual"]
HIST_HEADER = ["bin_left", "bin_right", "weight"]
MF_HEADER = ["omega", "delta", "n_roots_stable", "n_low", "n_high"]

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_PARTIAL = 0, 1, 2, 3


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "" if math.isnan(x) else repr(x)


class _Output:
    """Collects files written in one run so the manifest lists all of them."""

    def __init__(self, root):
        self.root = root
        self.files = []
        try:
            os.makedirs(root, exist_ok=True)
        except OSError as exc:
            raise ValidationError(f"cannot create '{root}': {exc.strerror}",
                                  field="out") from None
        if not os.access(root, os.W_OK):
            raise ValidationError(f"'{root}' is not writable", field="out")

    def path(self, name):
        full = os.path.join(self.root, name)
        os.makedirs(os.path.dirname(full), exist_ok=True)
        self.files.append(name)
        return full

    def csv(self, name, header, rows):
        with open(self.path(name), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])


# -- per-point work (top level so worker processes can pickle it) ----------

def _steady_point(cfg, omega, delta):
    try:
        model = build_model(cfg.system_params(omega, delta))
        rho, info = solve_model(model, return_info=True)
        s = summarize(rho, model)
    except (ValidationError, NumericalError) as exc:
        return {"omega": omega, "delta": delta, "status": "failed",
                "error": f"{type(exc).__name__}: {exc}"}
    c = list(s.c_d[:3]) + [None] * (3 - min(3, s.c_d.size))
    return {"omega": omega, "delta": delta, "status": "ok",
            "row": [omega, delta, s.n_s, s.k_s_over_n, *c, s.identity_residual],
            "k_s": s.k_s, "liouvillian_residual": info.residual, "gap": info.gap}


def _run_steady(cfg, out):
    grid = cfg.grid()
    if cfg.threads > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_steady_point, [cfg] * len(grid),
                                    [g[0] for g in grid], [g[1] for g in grid]))
    else:
        results = [_steady_point(cfg, o, d) for o, d in grid]
    _write_observables(cfg, out, results)
    return results


def _write_observables(cfg, out, results):
    header = list(OBS_HEADER)
    gamma_si = get_preset(cfg.preset).gamma_si if cfg.preset else None
    if gamma_si:
        header.append("k_s_per_second")
    rows = []
    for r in results:
        if r["status"] != "ok":
            continue
        row = list(r["row"])
        if gamma_si:
            row.append(r["k_s"] * gamma_si)
        rows.append(row)
    out.csv("observables.csv", header, rows)


def _run_qjmc(cfg, out):
    qcfg = cfg.qjmc_config()
    results = []
    for p, (omega, delta) in enumerate(cfg.grid()):
        tag = f"p{p:03d}"
        try:
            model = build_model(cfg.system_params(omega, delta))
            ens = run_ensemble(model, qcfg, workers=cfg.threads)
            win = stationary_window_samples(ens.records, qcfg)
        except (ValidationError, NumericalError) as exc:
            results.append({"omega": omega, "delta": delta, "status": "failed",
                            "error": f"{type(exc).__name__}: {exc}"})
            continue
        n = model.n_atoms
        k_s = ens.k_mean
        c = [None, None, None]
        ident = None
        if ens.coherence_mean is not None:
            c = list(ens.coherence_mean[:3]) + [None] * (3 - min(3, n - 1))
            ident = coherence_identity_residual(ens.n_mean, k_s, ens.coherence_mean,
                                                model.coupling)
        dens = build_histogram(win.density, n_bins=cfg.density_bins,
                               value_range=(0.0, 1.0))
        rate = build_histogram(win.rate, bin_width=1.0 / qcfg.bin_width)
        out.csv(f"density_hist_{tag}.csv", HIST_HEADER, dens.rows())
        out.csv(f"rate_hist_{tag}.csv", HIST_HEADER, rate.rows())
        if cfg.write_trajectories:
            for rec in ens.records:
                write_record(rec, out.path(f"trajectories/{tag}/traj_{rec.index:05d}.txt.gz"))
        results.append({
            "omega": omega, "delta": delta, "status": "ok", "point": tag,
            "row": [omega, delta, ens.n_mean, k_s / n, *c, ident], "k_s": k_s,
            "n_sem": ens.n_sem, "k_over_n_sem": ens.k_sem / n,
            "density_modes": dens.mode_count(), "rate_modes": rate.mode_count(),
            "mean_jumps": float(ens.jumps_per_trajectory.mean()),
            "max_jump_norm_error": float(max(
                (r.jump_norm_errors.max() for r in ens.records if r.jump_norm_errors.size),
                default=0.0)),
        })
    _write_observables(cfg, out, results)
    return results


def _run_meanfield(cfg, out):
    params = cfg.system_params()
    sums = mean_field_sums(build_coupling_matrices(params))
    scan = bistable_region_scan(cfg.axis("omega"), cfg.axis("delta"), sums)
    out.csv("meanfield.csv", MF_HEADER, scan.rows())
    if scan.bistable.any():
        out.csv("bistable_boundary.csv", ["omega", "delta"],
                scan.boundary_polyline().tolist())
    return [{"omega": float(o), "delta": float(d), "status": "ok",
             "n_roots_stable": int(k)} for o, d, k, _, _ in scan.rows()], {
        "v_tilde": sums.v_tilde, "r_tilde": sums.r_tilde,
        "bistable_cells": int(scan.bistable.sum())}


def run(cfg):
    """Execute a validated :class:`RunConfig`; returns (exit code, manifest)."""
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    out = _Output(cfg.out)
    solver = cfg.effective_solver
    extra = {}
    if solver == "steady":
        results = _run_steady(cfg, out)
    elif solver == "qjmc":
        results = _run_qjmc(cfg, out)
    else:
        results, extra = _run_meanfield(cfg, out)
    failures = [r for r in results if r["status"] != "ok"]
    points = [{k: v for k, v in r.items() if k != "row"} for r in results]
    manifest = {
        "version": __version__,
        "mode": cfg.mode,
        "solver": solver,
        "config": cfg.echo(),
        "master_seed": cfg.seed,
        "started_utc": started.isoformat(timespec="seconds"),
        "wall_time_s": time.perf_counter() - t0,
        "points": points,
        "failures": failures,
        "files": sorted(out.files),
    }
    if cfg.preset:
        p = get_preset(cfg.preset)
        manifest["preset"] = {"name": p.name, "a_over_lambda": p.a_over_lambda,
                              "rounded_a_over_lambda": p.rounded_a_over_lambda,
                              "gamma_si": p.gamma_si, "note": p.note}
    manifest.update(extra)
    with open(os.path.join(cfg.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, default=_json_default)
        fh.write("\n")
    if not failures:
        code = EXIT_OK
    elif len(failures) < len(results):
        code = EXIT_PARTIAL
    else:
        code = EXIT_NUMERICAL
    return code, manifest


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(type(obj).__name__)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--n-atoms", type=int)
    common.add_argument("--omega", type=float, help="Rabi frequency / Gamma")
    common.add_argument("--delta", type=float, help="detuning / Gamma")
    common.add_argument("--a-over-lambda", type=float)
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--seed", type=int)
    common.add_argument("--trajectories", type=int)
    common.add_argument("--t-final", type=float)
    common.add_argument("--t-stationary", type=float)
    common.add_argument("--bin-width", type=float)
    common.add_argument("--out", help=f"output directory (env {OUT_ENV})")
    common.add_argument("--threads", type=int, help="worker processes")

    parser = argparse.ArgumentParser(
        prog="collective-decay",
        description="Driven atom chains with collective decay.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("steady", parents=[common], help="exact steady states")
    sub.add_parser("qjmc", parents=[common], help="quantum-jump trajectories")
    sub.add_parser("meanfield", parents=[common], help="mean-field fixed points")
    sw = sub.add_parser("sweep", parents=[common], help="grid run of any solver")
    sw.add_argument("--solver", choices=["steady", "qjmc", "meanfield"])
    sub.add_parser("presets", help="list physical presets")
    return parser


def _list_presets(stream):
    for p in PRESETS.values():
        rounded = "" if p.rounded_a_over_lambda is None else \
            f" (rounded {p.rounded_a_over_lambda})"
        print(f"{p.name}: a/lambda = {p.a_over_lambda:.4f}{rounded}, "
              f"Gamma = {p.gamma_si:g} s^-1, lambda = {p.wavelength:g} m", file=stream)
        print(f"  {p.note}", file=stream)


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        _list_presets(sys.stdout)
        return EXIT_OK
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config")}
    overrides["mode"] = args.command
    try:
        cfg = parse_config(args.config, overrides)
        code, manifest = run(cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for f in manifest["failures"]:
        print(f"point omega={f['omega']} delta={f['delta']} failed: {f['error']}",
              file=sys.stderr)
    print(f"{len(manifest['points']) - len(manifest['failures'])}/"
          f"{len(manifest['points'])} points, {len(manifest['files'])} files in "
          f"{cfg.out} ({manifest['wall_time_s']:.1f} s)")
    if cfg.preset:
        print(f"preset {cfg.preset}: {get_preset(cfg.preset).note}")
    return code


if __name__ == "__main__":
    sys.exit(main())
