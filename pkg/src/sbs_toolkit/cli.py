"""`sbs` command line: seeded experiments emitting CSV sweeps and a run manifest.

Every output file carries `#`-prefixed metadata (config hash, seed, tool
version) and is byte-identical across runs with the same config and seed.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .beamforming import azimuth_cut, beam_pattern, compare_with_superposition
from .config import ToolkitConfig, default_config, load_config
from .errors import ConfigError, NumericalError
from .frame_scheduler import UserRequest, allocate, build_frame, check_interference_free
from .link_budget import (
    max_comm_range,
    max_sensing_range,
    outage_capacity,
    outage_probability,
    range_crossover,
)
from .radar_mc import run_sweep
from .scanning import scanning_period


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def _write_csv(path: Path, meta: dict, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}={value}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(outdir: Path, cfg: ToolkitConfig, seed: int, files) -> None:
    manifest = {
        "config_sha256": cfg.sha256(),
        "master_seed": seed,
        "toolkit_version": __version__,
        "outputs": {f.name: _sha256_file(f) for f in sorted(files)},
    }
    with open(outdir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_beamform(cfg: ToolkitConfig, seed: int, outdir: Path, args) -> list:
    array = cfg.array_config()
    spec = cfg.beam_spec()
    meta = {"config_sha256": cfg.sha256(), "seed": seed, "tool": f"sbs {__version__}"}

    comparison = compare_with_superposition(
        array, spec, cfg.beam_grid(), eval_step_deg=args.pattern_step_deg
    )
    cut = azimuth_cut(spec.fdb.theta_deg, args.pattern_step_deg)
    pattern = beam_pattern(array, comparison.solution.w_opt, cut)
    pattern_rows = [
        (d.phi_deg, d.theta_deg, float(g)) for d, g in zip(pattern.grid, pattern.gain_db)
    ]
    pattern_path = outdir / "pattern.csv"
    _write_csv(pattern_path, meta, ("phi_deg", "theta_deg", "gain_db"), pattern_rows)

    names = ["fdb"] + [f"dcb{i + 1}" for i in range(spec.n_dcb)]
    dth, dph = comparison.fdb_width_deg
    summary_rows = []
    for i, (name, d) in enumerate(zip(names, spec.directions)):
        summary_rows.append((
            name, d.phi_deg, d.theta_deg,
            float(comparison.joint_gain_db[i]),
            float(comparison.superposition_gain_db[i]),
            float(comparison.improvement_db[i]),
            dth if name == "fdb" else math.nan,
            dph if name == "fdb" else math.nan,
        ))
    summary_meta = dict(meta)
    summary_meta["worst_beam_improvement_db"] = _fmt(comparison.worst_beam_improvement_db)
    summary_meta["joint_objective"] = _fmt(comparison.joint_objective)
    summary_meta["superposition_objective"] = _fmt(comparison.superposition_objective)
    summary_path = outdir / "summary.csv"
    _write_csv(
        summary_path, summary_meta,
        ("beam", "phi_deg", "theta_deg", "joint_gain_db", "superposition_gain_db",
         "improvement_db", "fdb_delta_theta_deg", "fdb_delta_phi_deg"),
        summary_rows,
    )
    return [pattern_path, summary_path]


def cmd_linkbudget(cfg: ToolkitConfig, seed: int, outdir: Path, args) -> list:
    meta = {"config_sha256": cfg.sha256(), "seed": seed, "tool": f"sbs {__version__}"}
    step = cfg["sweep.rho_step"]
    n = int(round(1.0 / step))
    rows = []
    for i in range(n + 1):
        rho = min(i * step, 1.0)
        p = cfg.radio_params(rho=rho)
        r_c = max_comm_range(p) if rho > 0 else math.nan
        r_s = max_sensing_range(p) if rho < 1 else math.nan
        rows.append((rho, r_c, r_s))
    ranges_meta = dict(meta)
    cross = range_crossover(cfg.radio_params())
    if cross is not None:
        ranges_meta["crossover_rho"] = _fmt(cross.rho)
        ranges_meta["crossover_range_m"] = _fmt(cross.common_range_m)
    else:
        ranges_meta["crossover_rho"] = "none"
    ranges_path = outdir / "ranges.csv"
    _write_csv(ranges_path, ranges_meta,
               ("rho", "r_max_comm_m", "r_max_sense_m"), rows)

    p = cfg.radio_params()
    x0, x1 = cfg["sweep.x_start_m"], cfg["sweep.x_stop_m"]
    dx = cfg["sweep.x_step_m"]
    xs = []
    x = x0
    while x <= x1 + 1e-9:
        xs.append(x)
        x += dx
    cap_rows = [
        (x, outage_probability(p, x), outage_capacity(p, x)) for x in xs
    ]
    capacity_path = outdir / "capacity.csv"
    _write_csv(capacity_path, meta,
               ("x_m", "outage_prob", "capacity_bps"), cap_rows)
    return [ranges_path, capacity_path]


def cmd_radar_mc(cfg: ToolkitConfig, seed: int, outdir: Path, args) -> list:
    meta = {"config_sha256": cfg.sha256(), "seed": seed, "tool": f"sbs {__version__}"}
    ofdm = cfg.mc_ofdm_config()
    if args.m or args.n:
        from .ofdm_isac import OfdmConfig

        ofdm = OfdmConfig(
            m_symbols=args.m or ofdm.m_symbols,
            n_subcarriers=args.n or ofdm.n_subcarriers,
            delta_f=ofdm.delta_f,
            f_c=ofdm.f_c,
            t_guard=ofdm.t_guard,
        )
    gammas = cfg.mc_gammas_db()
    if args.gamma_start_db is not None or args.gamma_stop_db is not None:
        start = args.gamma_start_db if args.gamma_start_db is not None \
            else cfg["mc.gamma_db_start"]
        stop = args.gamma_stop_db if args.gamma_stop_db is not None \
            else cfg["mc.gamma_db_stop"]
        step = args.gamma_step_db or cfg["mc.gamma_db_step"]
        if stop < start:
            raise ConfigError("gamma sweep stop must be >= start")
        gammas = [start + i * step
                  for i in range(int(math.floor((stop - start) / step + 1e-9)) + 1)]
    trials = args.trials or cfg["mc.trials"]
    points = run_sweep(ofdm, gammas, cfg["mc.v_true_mps"], cfg["mc.r_true_m"],
                       trials, seed)
    mc_meta = dict(meta)
    mc_meta["trials"] = trials
    mc_meta["m"] = ofdm.m_symbols
    mc_meta["n"] = ofdm.n_subcarriers
    rows = [
        (pt.gamma_db, pt.rmse_range_mc, pt.rmse_range_theory,
         pt.rmse_vel_mc, pt.rmse_vel_theory, pt.p_correct_mc, pt.p_correct_theory)
        for pt in points
    ]
    path = outdir / "rmse.csv"
    _write_csv(path, mc_meta,
               ("gamma_db", "rmse_range_mc", "rmse_range_theory",
                "rmse_vel_mc", "rmse_vel_theory", "p_correct_mc",
                "p_correct_theory"), rows)
    return [path]


def _parse_widths(text: str) -> list:
    pairs = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            dth, dph = token.split("x")
            pairs.append((float(dth), float(dph)))
        except ValueError as exc:
            raise ConfigError(
                f"--widths expects 'dthetaxdphi[,...]' in degrees, got {token!r}"
            ) from exc
    if not pairs:
        raise ConfigError("--widths is empty")
    return pairs


def cmd_scan_period(cfg: ToolkitConfig, seed: int, outdir: Path, args) -> list:
    meta = {"config_sha256": cfg.sha256(), "seed": seed, "tool": f"sbs {__version__}"}
    if args.widths:
        width_pairs = _parse_widths(args.widths)
    else:
        width_pairs = [(cfg["scene.delta_theta_deg"], cfg["scene.delta_phi_deg"])]
    dcbs = cfg.beam_spec().dcbs
    rho_step = args.rho_step
    n = int(round(1.0 / rho_step))
    rows = []
    for dth, dph in width_pairs:
        for i in range(n + 1):
            rho = min(i * rho_step, 1.0)
            if rho >= 1.0:
                rows.append((rho, dth, dph, 0.0, 0))
                continue
            r_max = max_sensing_range(cfg.radio_params(rho=rho))
            geom = cfg.scene_geometry(r_max)
            result = scanning_period(geom, (dth, dph), dcbs)
            rows.append((rho, dth, dph, result.t_sc, result.n_dwells))
    path = outdir / "scan.csv"
    _write_csv(path, meta,
               ("rho", "delta_theta_deg", "delta_phi_deg", "T_sc_s",
                "cells_visited"), rows)
    return [path]


def _read_requests(path: Path) -> list:
    if not path.exists():
        raise ConfigError(f"request file {path} does not exist")
    requests = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"user_id", "beam_id", "demand"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ConfigError(
                f"request file {path} needs columns user_id,beam_id,demand"
            )
        for row in reader:
            try:
                requests.append(UserRequest(row["user_id"], row["beam_id"],
                                            int(row["demand"])))
            except ValueError as exc:
                raise ConfigError(f"bad request row {row}: {exc}") from exc
    return requests


def cmd_frame_plan(cfg: ToolkitConfig, seed: int, outdir: Path, args) -> list:
    meta = {"config_sha256": cfg.sha256(), "seed": seed, "tool": f"sbs {__version__}"}
    if not args.requests:
        raise ConfigError("frame-plan requires --requests CSV (user_id,beam_id,demand)")
    requests = _read_requests(Path(args.requests))
    grid = cfg.resource_grid()
    try:
        report = allocate(grid, requests)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    frame = build_frame(cfg.frame_config())
    violations = []
    interference = check_interference_free(grid)
    violations.extend(("double_booking", v) for v in interference.violations)
    for user_id, missing in report.shortfalls:
        violations.append(("shortfall", f"user {user_id} short {missing} cells"))
    r_max_worst = max_sensing_range(cfg.radio_params(rho=0.0))
    if not cfg.frame_config().guard_covers_range(r_max_worst):
        violations.append((
            "guard_interval",
            f"guard shorter than the {2 * r_max_worst / 299792458.0:.3e} s "
            f"round trip at {r_max_worst:.1f} m",
        ))

    alloc_meta = dict(meta)
    alloc_meta["frame_intervals"] = ";".join(
        f"{iv.label}:{iv.start_ns}-{iv.end_ns}" for iv in frame
    )
    alloc_path = outdir / "allocation.csv"
    _write_csv(alloc_path, alloc_meta,
               ("user_id", "beam_id", "subframe", "block"),
               [(a.user_id, a.beam_id, a.subframe, a.block)
                for a in report.assignments])
    viol_path = outdir / "violations.csv"
    _write_csv(viol_path, meta, ("kind", "detail"), violations)
    return [alloc_path, viol_path]


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbs",
        description="Sensing base station simulation toolkit",
    )
    parser.add_argument("--config", help="configuration file (default: bundled paper.cfg)")
    parser.add_argument("--seed", type=int, help="master seed (default: mc.seed)")
    parser.add_argument("--out", default="sbs_out", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("beamform", help="joint FDB/DCB pattern and summary")
    p.add_argument("--pattern-step-deg", type=float, default=0.1)

    sub.add_parser("linkbudget", help="range trade-off and outage capacity sweeps")

    p = sub.add_parser("radar-mc", help="bin-error Monte Carlo vs closed-form theory")
    p.add_argument("--trials", type=int)
    p.add_argument("--m", type=int, help="override symbol count")
    p.add_argument("--n", type=int, help="override subcarrier count")
    p.add_argument("--gamma-start-db", type=float)
    p.add_argument("--gamma-stop-db", type=float)
    p.add_argument("--gamma-step-db", type=float)

    p = sub.add_parser("scan-period", help="FDB scanning period sweep")
    p.add_argument("--rho-step", type=float, default=0.1)
    p.add_argument("--widths", help="beamwidth pairs, e.g. '2x3,4x6' (deg)")

    p = sub.add_parser("frame-plan", help="TDD frame and TSF-DMA allocation")
    p.add_argument("--requests", help="CSV of user_id,beam_id,demand")

    return parser


COMMANDS = {
    "beamform": cmd_beamform,
    "linkbudget": cmd_linkbudget,
    "radar-mc": cmd_radar_mc,
    "scan-period": cmd_scan_period,
    "frame-plan": cmd_frame_plan,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else default_config()
        seed = args.seed if args.seed is not None else cfg["mc.seed"]
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        files = COMMANDS[args.command](cfg, seed, outdir, args)
        _write_manifest(outdir, cfg, seed, files)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
