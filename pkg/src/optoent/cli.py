"""Command-line interface: ``optoent point|sweep|preset``.

Exit codes: 0 success, 1 error, 2 the single point requested by ``point``
is dynamically unstable.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import kernels
from .config import RunConfig, dumps, load
from .dynamics import build_diffusion, build_drift
from .entanglement import symplectic_form
from .errors import ConfigError, OptoEntError
from .lyapunov import lyapunov_residual
from .presets import PRESETS, preset
from .sweep import STATUS_ERROR, STATUS_UNSTABLE, SweepSpec, evaluate_point, run_sweep

log = logging.getLogger("optoent")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSTABLE = 2

NORMALIZED_COLUMNS = tuple(
    [f"{name}{k}" for k in (1, 2)
     for name in ("mech_freq", "gamma_m", "kappa", "detuning", "coupling", "n_th")]
    + ["hopping"])


def csv_header(spec: SweepSpec) -> list[str]:
    """Column names; a pure function of the axes and requested bipartitions."""
    cols = [f"index_{k}" for k in range(len(spec.axes))]
    cols += [ax.path for ax in spec.axes]
    cols += ["omega_m_rad_s", *NORMALIZED_COLUMNS, "stable", "spectral_abscissa_rad_s"]
    for b in spec.bipartitions:
        cols += [f"theta_minus_{b.name}", f"EN_{b.name}"]
    cols += ["status", "message"]
    return cols


def _fmt(x, precision):
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return repr(x) if precision is None else f"{x:.{precision}g}"


def csv_rows(records, spec: SweepSpec, precision=None):
    for r in records:
        row = [str(i) for i in r.grid_index]
        row += [_fmt(v, precision) for v in r.axis_values]
        if r.resolved_params is None:
            row += [""] * (1 + len(NORMALIZED_COLUMNS))
        else:
            norm = r.resolved_params.normalized()
            row.append(_fmt(r.resolved_params.reference_freq, precision))
            row += [_fmt(norm[c], precision) for c in NORMALIZED_COLUMNS]
        row.append("true" if r.stable else "false")
        row.append(_fmt(r.spectral_abscissa, precision))
        for b in spec.bipartitions:
            res = r.entanglement.get(b)
            row += ([_fmt(res.theta_minus, precision), _fmt(res.log_negativity, precision)]
                    if res is not None else ["", ""])
        row += [r.status, r.message]
        yield row


def write_csv(path, records, spec: SweepSpec, precision=None) -> None:
    """UTF-8, comma-separated, LF-terminated, rows in row-major grid order."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_header(spec))
        w.writerows(csv_rows(records, spec, precision))


def _run_and_write(cfg: RunConfig, out, threads, formal) -> int:
    if formal:
        cfg = replace(cfg, unstable_policy="formal")
    spec = cfg.sweep_spec()
    t0 = time.perf_counter()
    records = run_sweep(spec, threads=threads)
    elapsed = time.perf_counter() - t0
    try:
        write_csv(out, records, spec, cfg.precision)
    except OSError as exc:
        log.error("cannot write %s: %s", out, exc.strerror)
        return EXIT_ERROR
    n_unst = sum(r.status == STATUS_UNSTABLE for r in records)
    n_err = sum(r.status == STATUS_ERROR for r in records)
    log.info("%d points in %.2f s (%d unstable, %d solver errors) -> %s",
             len(records), elapsed, n_unst, n_err, out)
    return EXIT_OK


def cmd_point(cfg: RunConfig, formal: bool = False, out=None) -> int:
    """Print a report for the single parameter point in ``cfg``."""
    if cfg.axes:
        raise ConfigError("config defines sweep axes; use `sweep` or drop [[sweep.axis]]")
    policy = "formal" if formal else cfg.unstable_policy
    rec = evaluate_point(cfg.model, cfg.bipartitions, policy, keep_covariance=True)
    p = (out or sys.stdout).write
    if rec.status == STATUS_ERROR:
        p(f"error: {rec.message}\n")
        return EXIT_ERROR
    params = rec.resolved_params
    p(f"omega_m = {params.reference_freq!r} rad/s\n")
    p("resolved parameters (rates / omega_m):\n")
    for key, val in params.normalized().items():
        p(f"  {key:<12} {val!r}\n")
    p(f"stable: {'yes' if rec.stable else 'no'}\n")
    p(f"spectral abscissa: {rec.spectral_abscissa!r} rad/s "
      f"({rec.spectral_abscissa / params.reference_freq!r} omega_m)\n")
    if rec.message:
        p(f"note: {rec.message}\n")
    z = rec.covariance
    if z is not None:
        c, d = build_drift(params), build_diffusion(params)
        heis = float(np.linalg.eigvalsh(z + 0.5j * symplectic_form(4)).min())
        label = "" if rec.stable else " (formal solution of an unstable point)"
        p(f"covariance diagnostics{label}:\n")
        p(f"  min eigenvalue of Z:             {float(np.linalg.eigvalsh(z).min())!r}\n")
        p(f"  min eigenvalue of Z + i Omega/2: {heis!r}\n")
        p(f"  physical (tol 1e-10):            {'yes' if heis >= -1e-10 else 'no'}\n")
        p(f"  relative Lyapunov residual:      "
          f"{lyapunov_residual(c, d, z) / float(np.linalg.norm(d))!r}\n")
    p("entanglement:\n")
    p(f"  {'bipartition':<14} {'theta_minus':>22} {'EN':>22}  simon\n")
    for b in cfg.bipartitions:
        res = rec.entanglement.get(b)
        if res is None:
            p(f"  {b.name:<14} {'-':>22} {'-':>22}  -\n")
        else:
            simon = "entangled" if res.simon_entangled else "separable"
            if res.boundary:
                simon += " (boundary)"
            p(f"  {b.name:<14} {res.theta_minus!r:>22} {res.log_negativity!r:>22}  {simon}\n")
    return EXIT_OK if rec.stable else EXIT_UNSTABLE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="optoent",
        description="Stationary entanglement in two hopping-coupled optomechanical cavities.")
    ap.add_argument("--threads", type=int, default=1, metavar="N",
                    help="worker threads for sweeps (default 1)")
    ap.add_argument("--quiet", action="store_true", help="suppress progress messages")
    ap.add_argument("--formal-unstable", action="store_true",
                    help="also report entanglement of the formal Lyapunov solution at unstable "
                         "points (diagnostic; not a physical steady state)")
    sub = ap.add_subparsers(dest="command", required=True)
    pt = sub.add_parser("point", help="evaluate a single parameter point")
    pt.add_argument("--config", required=True, type=Path)
    sw = sub.add_parser("sweep", help="evaluate a parameter grid and write CSV")
    sw.add_argument("--config", required=True, type=Path)
    sw.add_argument("--out", type=Path, help="CSV path (default: [output].path)")
    pr = sub.add_parser("preset", help="run a figure preset")
    pr.add_argument("name", choices=sorted(PRESETS))
    grp = pr.add_mutually_exclusive_group(required=True)
    grp.add_argument("--out", type=Path, help="CSV path")
    grp.add_argument("--show-config", action="store_true",
                     help="print the preset as a TOML config instead of running it")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for h in list(log.handlers):
        log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.addHandler(handler)
    log.propagate = False
    log.setLevel(logging.WARNING if args.quiet else logging.INFO)
    if args.threads < 1:
        log.error("--threads must be >= 1")
        return EXIT_ERROR
    log.debug("kernel backend: %s", kernels.BACKEND)
    try:
        if args.command == "point":
            return cmd_point(load(args.config), formal=args.formal_unstable)
        if args.command == "sweep":
            cfg = load(args.config)
            out = args.out or cfg.output_path
            if out is None:
                raise ConfigError("no output path: pass --out or set [output].path")
            return _run_and_write(cfg, out, args.threads, args.formal_unstable)
        cfg = preset(args.name)
        if args.show_config:
            sys.stdout.write(dumps(cfg))
            return EXIT_OK
        return _run_and_write(cfg, args.out, args.threads, args.formal_unstable)
    except OptoEntError as exc:
        log.error("error: %s", exc)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
