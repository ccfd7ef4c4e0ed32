"""Command-line front end: configuration, scan orchestration, report emission.

One plain-text key-value config file plus flag overrides (flags win) drives
every pipeline; reruns with the same configuration produce byte-identical
CSV artifacts.  Exit codes: 0 success, 2 configuration error, 3 numerical or
I/O failure, 4 inadmissible parameters (for example a packet below n0).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import subprocess
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .eigen2d import compute_modes_2d, mode_table_2d
from .eigen3d import BallGeometry, compute_modes_3d, mode_table_3d
from .memory_modes import (
    MemoryParams,
    NegativeDiscriminantError,
    StabilityError,
    first_admissible_index,
)
from .modetable import ModeTable, table_from_modes_2d, table_from_modes_3d
from .observability import (
    contradiction_report,
    fit_power_law,
    observability_scan,
)
from .packet import PacketAdmissibilityError, packet_boundedness_scan, select_packet
from .simulate import (
    ControlSignal,
    modal_duality_check,
    observability_constant_scan,
    simulate_distributed,
)
from .specfun import ConvergenceError, NoSignChangeError, QuadratureError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INADMISSIBLE = 4

OUTPUT_DIR_ENV = "STOKESMEM_OUTPUT_DIR"

# slope windows mirrored by the acceptance suite
ACCEPTANCE_THRESHOLDS = {
    "initial_norm_slope": [-6.6, -5.4],
    "boundary_weighted_slope_max": -9.0,
    "quotient_slope_min": 3.4,
    "pairing_slope": [-4.1, -3.5],
    "bound_slope_max": -4.6,
}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    R: float = 1.0
    a: float = 1.0
    b: float = 1.0
    T: float = 2.0
    dimension: int = 3
    n_max: int = 8 * 56 + 8
    M_min: int = 24
    M_max: int = 56
    L_truncation: int = 512
    gramian_N_max: int = 160
    steps: int = 4000
    seed: int = 1234
    workers: int = 0  # 0 means all available cores
    output_dir: str = "out"
    tolerances: Dict[str, float] = field(default_factory=lambda: {
        "root_abs": 1e-13,
        "quadrature_rel": 1e-11,
        "svd_residual": 1e-9,
        "moment_rel": 1e-8,
    })

    def validate(self) -> None:
        for name in ("R", "a", "b", "T"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"field {name} must be positive, got {v}")
        if self.dimension not in (2, 3):
            raise ConfigError(f"field dimension must be 2 or 3, got {self.dimension}")
        for name in ("n_max", "M_min", "M_max", "L_truncation",
                     "gramian_N_max", "steps"):
            v = getattr(self, name)
            if not (isinstance(v, int) and v > 0):
                raise ConfigError(f"field {name} must be a positive integer, got {v}")
        if self.M_min > self.M_max:
            raise ConfigError(
                f"field M_min={self.M_min} exceeds M_max={self.M_max}")
        if 8 * self.M_max + 8 > self.n_max:
            raise ConfigError(
                f"field n_max={self.n_max} too small: need 8*M_max+8 = "
                f"{8 * self.M_max + 8}")
        if self.gramian_N_max > self.n_max:
            raise ConfigError(
                f"field gramian_N_max={self.gramian_N_max} exceeds n_max")
        if self.L_truncation < self.M_max:
            raise ConfigError(
                f"field L_truncation={self.L_truncation} below M_max")
        if self.workers < 0:
            raise ConfigError(f"field workers must be >= 0, got {self.workers}")
        for key, val in self.tolerances.items():
            if not (isinstance(val, (int, float)) and val > 0):
                raise ConfigError(f"tolerance {key} must be positive, got {val}")

    def memory_params(self) -> MemoryParams:
        return MemoryParams(a=self.a, b=self.b, T=self.T)

    def mode_table(self) -> ModeTable:
        if self.dimension == 3:
            return mode_table_3d(BallGeometry(self.R), self.n_max)
        return mode_table_2d(self.R, self.n_max)

    def effective_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_INT_FIELDS = {"dimension", "n_max", "M_min", "M_max", "L_truncation",
               "gramian_N_max", "steps", "seed", "workers"}
_FLOAT_FIELDS = {"R", "a", "b", "T"}


def _assign(cfg: RunConfig, key: str, raw: str) -> None:
    if key.startswith("tol."):
        try:
            cfg.tolerances[key[4:]] = float(raw)
        except ValueError as exc:
            raise ConfigError(f"field {key}: cannot parse {raw!r}") from exc
        return
    if key in _INT_FIELDS:
        try:
            setattr(cfg, key, int(raw))
        except ValueError as exc:
            raise ConfigError(f"field {key}: cannot parse {raw!r} as integer") from exc
    elif key in _FLOAT_FIELDS:
        try:
            setattr(cfg, key, float(raw))
        except ValueError as exc:
            raise ConfigError(f"field {key}: cannot parse {raw!r} as number") from exc
    elif key == "output_dir":
        cfg.output_dir = raw
    else:
        raise ConfigError(f"unknown configuration field {key!r}")


def load_config(path: Optional[str], overrides: Sequence[str],
                args: argparse.Namespace) -> RunConfig:
    """Config file first, then --set overrides, then dedicated flags."""
    cfg = RunConfig()
    if env_dir := os.environ.get(OUTPUT_DIR_ENV):
        cfg.output_dir = env_dir
    if path is not None:
        text = Path(path).read_text()
        for lineno, line in enumerate(text.splitlines(), 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, raw = (part.strip() for part in stripped.split("=", 1))
            _assign(cfg, key, raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set needs key=value, got {item!r}")
        key, raw = (part.strip() for part in item.split("=", 1))
        _assign(cfg, key, raw)
    for key in (*_FLOAT_FIELDS, *_INT_FIELDS, "output_dir"):
        flag = getattr(args, key, None)
        if flag is not None:
            setattr(cfg, key, flag)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# Deterministic writers
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def version_string() -> str:
    try:
        described = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, check=False,
            cwd=Path(__file__).resolve().parent,
        ).stdout.strip()
    except OSError:
        described = ""
    return f"{__version__}+g{described}" if described else __version__


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------


def _cmd_eigs3d(cfg: RunConfig) -> int:
    modes = compute_modes_3d(BallGeometry(cfg.R), cfg.n_max)
    out = _outdir(cfg)
    write_csv(out / "modes3d.csv",
              ["n", "lambda", "eps_n", "norm_sq", "gamma_n"],
              [(m.n, m.lam, m.eps_n, m.norm_sq, m.gamma_n) for m in modes])
    print(f"wrote {out / 'modes3d.csv'} ({len(modes)} modes, "
          f"lambda_1={modes[0].lam:.9g})")
    return EXIT_OK


def _cmd_eigs2d(cfg: RunConfig) -> int:
    modes = compute_modes_2d(cfg.R, min(cfg.n_max, 200) if cfg.dimension == 3
                             else cfg.n_max)
    out = _outdir(cfg)
    write_csv(out / "modes2d.csv",
              ["n", "j1n", "lambda", "norm_sq", "gamma_n"],
              [(m.n, m.j1n, m.lam, m.norm_sq, m.gamma_n) for m in modes])
    print(f"wrote {out / 'modes2d.csv'} ({len(modes)} modes, "
          f"lambda_1={modes[0].lam:.9g})")
    return EXIT_OK


def _cmd_packet(cfg: RunConfig, M: int) -> int:
    table = cfg.mode_table()
    params = cfg.memory_params()
    sel = select_packet(M, table, params)
    out = _outdir(cfg)
    rows = [(M, k + 1, int(sel.indices[k]), sel.betas[k], sel.C1s[k],
             sel.nodes[k], sel.gammas[k], sel.residual)
            for k in range(len(sel.indices))]
    path = out / f"packet_M{M}.csv"
    write_csv(path, ["M", "k", "index", "beta_k", "C1_k", "node_k",
                     "gamma_k", "residual"], rows)
    print(f"wrote {path} (residual {sel.residual:.3e})")
    return EXIT_OK


def _scan_payload(cfg: RunConfig, table: ModeTable, params: MemoryParams):
    Ms = list(range(cfg.M_min, cfg.M_max + 1))
    reports = observability_scan(Ms, table, params,
                                 workers=cfg.effective_workers())
    fits = {
        "initial_norm_sq": fit_power_law(
            [(r.M, r.initial_norm_sq) for r in reports]),
        "boundary_norm_weighted": fit_power_law(
            [(r.M, r.boundary_norm_weighted) for r in reports]),
        "boundary_norm_unweighted": fit_power_law(
            [(r.M, r.boundary_norm_unweighted) for r in reports]),
        "quotient": fit_power_law([(r.M, r.quotient) for r in reports]),
    }
    return reports, fits


def _scan_verdicts(reports, fits) -> dict:
    lo, hi = ACCEPTANCE_THRESHOLDS["initial_norm_slope"]
    quotients = [r.quotient for r in reports]
    return {
        "initial_norm_slope_in_window":
            lo <= fits["initial_norm_sq"].slope <= hi,
        "boundary_weighted_slope_below_max":
            fits["boundary_norm_weighted"].slope
            <= ACCEPTANCE_THRESHOLDS["boundary_weighted_slope_max"],
        "quotient_slope_above_min":
            fits["quotient"].slope >= ACCEPTANCE_THRESHOLDS["quotient_slope_min"],
        "quotient_strictly_increasing":
            all(b > a for a, b in zip(quotients, quotients[1:])),
    }


def _print_violated_constant(reports, fits) -> None:
    first, last = reports[0], reports[-1]
    growth = last.quotient / first.quotient
    print("observability quotient ||phi(.,0)||^2 / boundary norm grows from "
          f"{first.quotient:.6e} (M={first.M}) to {last.quotient:.6e} "
          f"(M={last.M}), factor {growth:.3e}, fitted slope "
          f"{fits['quotient'].slope:+.3f}:")
    print("no single constant C can close the observability inequality "
          "across the scan.")


def _write_scan(cfg: RunConfig, out: Path, reports, fits, emit_plots: bool):
    write_csv(out / "scan.csv",
              ["M", "initial_norm_sq", "A1", "A2", "boundary_weighted",
               "boundary_unweighted", "quotient"],
              [(r.M, r.initial_norm_sq, r.A1, r.A2, r.boundary_norm_weighted,
                r.boundary_norm_unweighted, r.quotient) for r in reports])
    if emit_plots:
        gp = (
            "set logscale xy\n"
            "set xlabel 'M'\n"
            "set datafile separator ','\n"
            "plot 'scan.csv' using 1:2 with linespoints title 'initial norm', \\\n"
            "     'scan.csv' using 1:5 with linespoints title 'boundary (weighted)', \\\n"
            "     'scan.csv' using 1:7 with linespoints title 'quotient'\n"
        )
        (out / "scan.gp").write_text(gp)


def _fit_dict(fit) -> dict:
    return {"slope": fit.slope, "intercept": fit.intercept,
            "r_squared": fit.r_squared, "M_window": list(fit.M_window)}


def _cmd_scan(cfg: RunConfig, emit_plots: bool) -> int:
    table = cfg.mode_table()
    params = cfg.memory_params()
    reports, fits = _scan_payload(cfg, table, params)
    out = _outdir(cfg)
    _write_scan(cfg, out, reports, fits, emit_plots)
    verdicts = _scan_verdicts(reports, fits)
    write_json(out / "summary.json", {
        "config": cfg.as_dict(),
        "version": version_string(),
        "slopes": {k: _fit_dict(v) for k, v in fits.items()},
        "thresholds": ACCEPTANCE_THRESHOLDS,
        "verdicts": verdicts,
        "quotient_growth": {
            "first_M": reports[0].M,
            "first": reports[0].quotient,
            "last_M": reports[-1].M,
            "last": reports[-1].quotient,
            "factor": reports[-1].quotient / reports[0].quotient,
        },
    })
    _print_violated_constant(reports, fits)
    print(f"wrote {out / 'scan.csv'} and {out / 'summary.json'}")
    return EXIT_OK


def _cmd_contradiction(cfg: RunConfig) -> int:
    table = cfg.mode_table()
    params = cfg.memory_params()
    rep = contradiction_report(table, params,
                               range(cfg.M_min, cfg.M_max + 1),
                               L_truncation=cfg.L_truncation, v_norm=1.0)
    out = _outdir(cfg)
    write_csv(out / "contradiction.csv",
              ["M", "k0", "pairing", "bound"],
              [(int(m), int(k), p, b) for m, k, p, b in
               zip(rep.M_values, rep.k0, rep.pairing, rep.bound)])
    write_json(out / "contradiction.json", {
        "config": cfg.as_dict(),
        "version": version_string(),
        "pairing_fit": _fit_dict(rep.pairing_fit),
        "bound_fit": _fit_dict(rep.bound_fit),
        "M_star": rep.M_star,
        "M_star_extrapolated": rep.M_star_extrapolated,
        "v_norm": rep.v_norm,
        "L_truncation": rep.L_truncation,
        "y0_norm_sq_truncated": rep.y0_norm_sq_truncated,
        "tail_bound": rep.tail_bound,
    })
    print(f"pairing slope {rep.pairing_fit.slope:+.3f}, bound slope "
          f"{rep.bound_fit.slope:+.3f}, crossover M* = {rep.M_star:g}"
          f"{' (extrapolated)' if rep.M_star_extrapolated else ''}")
    print(f"wrote {out / 'contradiction.csv'} and {out / 'contradiction.json'}")
    return EXIT_OK


def _cmd_simulate(cfg: RunConfig, M: int, control_amplitude: float,
                  stride: int) -> int:
    table = cfg.mode_table()
    params = cfg.memory_params()
    sel = select_packet(M, table, params)
    y0 = np.zeros(table.size)
    y0[sel.indices - 1] = sel.betas
    lam_max = float(table.lam[sel.indices - 1].max())
    steps = max(cfg.steps, int(math.ceil(10.0 * lam_max * cfg.T)))
    v = None
    if control_amplitude != 0.0:
        betas = dict(zip((int(n) for n in sel.indices), sel.betas))
        v = ControlSignal.from_callable(
            lambda n, ts: control_amplitude * betas[n] * np.ones_like(ts),
            sel.indices, cfg.T, steps)
    traj = simulate_distributed(y0, v, params, table, steps)
    out = _outdir(cfg)
    stride = max(1, stride if stride > 0 else steps // 500)
    rows = []
    for i, n in enumerate(traj.indices):
        for j in range(0, len(traj.t), stride):
            rows.append((traj.t[j], int(n), traj.y[i, j], traj.z[i, j]))
    write_csv(out / "trajectory.csv", ["t", "mode", "y", "z"], rows)

    duality_rows = []
    for i, n in enumerate(sel.indices):
        lam = float(table.lam[n - 1])
        vn = None
        if v is not None:
            vn = v.values[i]
        res = modal_duality_check(float(y0[n - 1]), vn, float(sel.betas[i]),
                                  params, lam, steps)
        duality_rows.append((int(n), res))
    write_csv(out / "duality.csv", ["mode", "residual"], duality_rows)
    worst = max(r for _, r in duality_rows)
    print(f"simulated packet M={M} with {steps} steps; worst duality "
          f"residual {worst:.3e}")
    print(f"wrote {out / 'trajectory.csv'} and {out / 'duality.csv'}")
    return EXIT_OK


def _cmd_gramian(cfg: RunConfig, eig_threshold: float) -> int:
    table = cfg.mode_table()
    params = cfg.memory_params()
    Ns = list(range(8, cfg.gramian_N_max + 1, 8))
    scan = observability_constant_scan(Ns, params, table, weighted=False)
    out = _outdir(cfg)
    write_csv(out / "gramian.csv", ["N", "min_generalized_eigenvalue"], scan)
    crossing = next((N for N, v in scan if v < eig_threshold), None)
    if crossing is None:
        print(f"best observability constant stayed above {eig_threshold:g} "
              f"over N <= {cfg.gramian_N_max}")
    else:
        print(f"best observability constant falls below {eig_threshold:g} "
              f"at N = {crossing}")
    print(f"wrote {out / 'gramian.csv'}")
    return EXIT_OK


def _cmd_boundedness(cfg: RunConfig) -> int:
    table = cfg.mode_table()
    params = cfg.memory_params()
    rows = packet_boundedness_scan(range(cfg.M_min, cfg.M_max + 1), table, params)
    out = _outdir(cfg)
    write_csv(out / "packets.csv",
              ["M", "c1_inf", "residual", "sigma_smallest",
               "sigma_second_smallest"],
              [(r.M, r.c1_inf, r.residual, r.sigma_smallest,
                r.sigma_second_smallest) for r in rows])
    sup = max(r.c1_inf for r in rows)
    med = float(np.median([r.c1_inf for r in rows]))
    print(f"sup |C1|_inf = {sup:.6g}, median = {med:.6g}, ratio {sup / med:.3f}")
    print(f"wrote {out / 'packets.csv'}")
    return EXIT_OK


def _cmd_report(cfg: RunConfig, emit_plots: bool) -> int:
    table = cfg.mode_table()
    params = cfg.memory_params()
    reports, fits = _scan_payload(cfg, table, params)
    con = contradiction_report(table, params, range(cfg.M_min, cfg.M_max + 1),
                               L_truncation=cfg.L_truncation, v_norm=1.0)
    Ns = list(range(8, cfg.gramian_N_max + 1, 8))
    gram = observability_constant_scan(Ns, params, table, weighted=False)

    out = _outdir(cfg)
    _write_scan(cfg, out, reports, fits, emit_plots)
    write_csv(out / "contradiction.csv", ["M", "k0", "pairing", "bound"],
              [(int(m), int(k), p, b) for m, k, p, b in
               zip(con.M_values, con.k0, con.pairing, con.bound)])
    write_csv(out / "gramian.csv", ["N", "min_generalized_eigenvalue"], gram)

    verdicts = _scan_verdicts(reports, fits)
    lo, hi = ACCEPTANCE_THRESHOLDS["pairing_slope"]
    verdicts["pairing_slope_in_window"] = lo <= con.pairing_fit.slope <= hi
    verdicts["bound_slope_below_max"] = (
        con.bound_fit.slope <= ACCEPTANCE_THRESHOLDS["bound_slope_max"])
    verdicts["crossover_finite"] = math.isfinite(con.M_star)
    gvals = [v for _, v in gram]
    verdicts["gramian_nonincreasing"] = all(
        b <= a for a, b in zip(gvals, gvals[1:]))

    write_json(out / "summary.json", {
        "config": cfg.as_dict(),
        "version": version_string(),
        "slopes": {
            **{k: _fit_dict(v) for k, v in fits.items()},
            "pairing": _fit_dict(con.pairing_fit),
            "bound": _fit_dict(con.bound_fit),
        },
        "thresholds": ACCEPTANCE_THRESHOLDS,
        "verdicts": verdicts,
        "quotient_growth": {
            "first_M": reports[0].M,
            "first": reports[0].quotient,
            "last_M": reports[-1].M,
            "last": reports[-1].quotient,
            "factor": reports[-1].quotient / reports[0].quotient,
        },
        "contradiction": {
            "M_star": con.M_star,
            "M_star_extrapolated": con.M_star_extrapolated,
            "y0_norm_sq_truncated": con.y0_norm_sq_truncated,
            "tail_bound": con.tail_bound,
        },
        "gramian": {"N": [n for n, _ in gram],
                    "min_generalized_eigenvalue": gvals},
    })
    _print_violated_constant(reports, fits)
    print(f"contradiction: pairing slope {con.pairing_fit.slope:+.3f}, bound "
          f"slope {con.bound_fit.slope:+.3f}, M* = {con.M_star:g}")
    print(f"wrote scan.csv, contradiction.csv, gramian.csv, summary.json "
          f"in {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stokesmem",
        allow_abbrev=False,
        description="Spectral laboratory for the observability blow-up of "
                    "Stokes flow with exponential memory on a ball.")
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration field")
    parser.add_argument("--output-dir", dest="output_dir")
    for name in sorted(_FLOAT_FIELDS):
        parser.add_argument(f"--{name}", type=float, dest=name)
    for name in sorted(_INT_FIELDS):
        parser.add_argument(f"--{name.replace('_', '-').lower()}", type=int,
                            dest=name)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eigs3d", help="export the 3D eigenmode table")
    sub.add_parser("eigs2d", help="export the 2D eigenmode table")
    p_packet = sub.add_parser("packet", help="select one 8-mode packet")
    p_packet.add_argument("--M", type=int, required=True)
    p_scan = sub.add_parser("scan", help="observability scan over M")
    p_scan.add_argument("--emit-plots", action="store_true")
    sub.add_parser("contradiction", help="non-controllable-datum report")
    p_sim = sub.add_parser("simulate", help="forward packet simulation")
    p_sim.add_argument("--M", type=int, default=1)
    p_sim.add_argument("--control-amplitude", type=float, default=0.0)
    p_sim.add_argument("--stride", type=int, default=0)
    p_gram = sub.add_parser("gramian", help="finite-family Gramian scan")
    p_gram.add_argument("--eig-threshold", type=float, default=1e-6)
    sub.add_parser("packets", help="packet boundedness/conditioning scan")
    p_rep = sub.add_parser("report", help="full pipeline with verdicts")
    p_rep.add_argument("--emit-plots", action="store_true")
    return parser


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.set, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "eigs3d":
            return _cmd_eigs3d(cfg)
        if args.command == "eigs2d":
            return _cmd_eigs2d(cfg)
        if args.command == "packet":
            return _cmd_packet(cfg, args.M)
        if args.command == "scan":
            return _cmd_scan(cfg, args.emit_plots)
        if args.command == "contradiction":
            return _cmd_contradiction(cfg)
        if args.command == "simulate":
            return _cmd_simulate(cfg, args.M, args.control_amplitude, args.stride)
        if args.command == "gramian":
            return _cmd_gramian(cfg, args.eig_threshold)
        if args.command == "packets":
            return _cmd_boundedness(cfg)
        if args.command == "report":
            return _cmd_report(cfg, args.emit_plots)
        raise AssertionError(f"unhandled command {args.command}")
    except (PacketAdmissibilityError, NegativeDiscriminantError,
            StabilityError) as exc:
        print(f"inadmissible parameters: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except (ConvergenceError, NoSignChangeError, QuadratureError,
            ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    raise SystemExit(run_command())
