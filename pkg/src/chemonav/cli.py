"""Command line entry point: ``chemonav <subcommand> [options]``."""

from __future__ import annotations

import argparse
import dataclasses as dc
import json
import sys
from pathlib import Path

from .ase import Side
from .config import ExperimentConfig, from_dict, load_config, to_dict
from . import harness as H


def _floats(text: str):
    return [float(v) for v in text.split(",") if v.strip()]


def _profile(text: str):
    out = []
    for part in text.split(","):
        t, c = part.split(":")
        out.append((float(t), float(c)))
    return out


def resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    kw = {}
    if args.duration is not None:
        kw["duration"] = args.duration
    if args.dt is not None:
        kw["dt"] = args.dt
    if kw:
        cfg = dc.replace(cfg, **kw)
    if args.noise is not None:
        cfg = cfg.with_noise(True, None if args.noise < 0 else args.noise)
    # round trip through the dict form so bad values fail here, before any run
    return from_dict(to_dict(cfg))


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}_{suffix}.csv")


def cmd_simulate(args, cfg):
    traj, res = H.run_single(cfg, args.seed, "snn")
    out = Path(args.out or f"trajectory_seed{args.seed}.{args.format}")
    H.export_trajectory(traj, out, args.format)
    written = [out]
    if args.format == "csv":
        H.export_raster(traj, _sibling(out, "raster"))
        written.append(_sibling(out, "raster"))
    return {"result": res.to_dict(), "written": [str(p) for p in written]}


def _batch(args, cfg, kind):
    stats, records = H.run_batch(kind, args.trials, args.seed, cfg, args.workers)
    out = Path(args.out or f"{kind}_stats.{args.format}")
    H.export_stats(stats, records, cfg, out, args.format, kind)
    return {"stats": stats.to_dict(), "written": [str(out)]}


def cmd_batch(args, cfg):
    return _batch(args, cfg, "snn")


def cmd_levy(args, cfg):
    return _batch(args, cfg, "levy")


def cmd_step_response(args, cfg):
    p = cfg.network
    sides = {"L": [Side.LEFT], "R": [Side.RIGHT], "both": [Side.LEFT, Side.RIGHT]}[args.side]
    responses = [H.step_response(_profile(args.profile), args.span, s,
                                 p.ase_left if s == Side.LEFT else p.ase_right, cfg.dt)
                 for s in sides]
    header, rows = H.step_response_rows(responses)
    rows = rows[::max(1, args.every)]
    out = Path(args.out or f"step_response.{args.format}")
    H.export_table(header, rows, out, args.format)
    return {"rows": len(rows), "written": [str(out)]}


def cmd_freq_curve(args, cfg):
    rows = H.freq_curve(_floats(args.gradients), _floats(args.vt), cfg.network.ase_left,
                        args.span, cfg.dt)
    out = Path(args.out or f"freq_curve.{args.format}")
    H.export_table(("gradient_mM_s", "V_T_mV", "side", "rate_hz"), rows, out, args.format)
    return {"rows": len(rows), "written": [str(out)]}


def cmd_field_export(args, cfg):
    out = Path(args.out or "field.csv")
    if args.format != "csv":
        raise SystemExit("field-export writes CSV only")
    H.export_field(cfg.arena, out, args.step)
    return {"written": [str(out)]}


COMMANDS = {
    "simulate": (cmd_simulate, "run one network trial; writes trajectory and spike raster"),
    "batch": (cmd_batch, "run seeded network trials and write statistics"),
    "levy": (cmd_levy, "run seeded Levy-walk baseline trials"),
    "step-response": (cmd_step_response, "ASE internal states under a concentration schedule"),
    "freq-curve": (cmd_freq_curve, "ASE spike rate against ramp gradient and threshold"),
    "field-export": (cmd_field_export, "sample the concentration field on a grid"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chemonav", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (missing keys use defaults)")
    common.add_argument("--seed", type=int, default=0, help="trial seed, or first seed of a batch")
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--duration", type=float, help="trial length in s")
    common.add_argument("--dt", type=float, help="integration step in s")
    common.add_argument("--noise", type=float, nargs="?", const=-1.0,
                        help="enable sensor noise, optionally with amplitude in mM")
    common.add_argument("--out", help="output file")
    common.add_argument("--format", choices=("csv", "json"),
                        help="default json for batch/levy, csv otherwise")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_)
        if name in ("batch", "levy"):
            p.add_argument("--workers", type=int, default=1)
        if name == "step-response":
            p.add_argument("--profile", default="0:40,10:50",
                           help="schedule as t:C pairs, e.g. 0:40,10:50")
            p.add_argument("--span", type=float, default=60.0, help="simulated time in s")
            p.add_argument("--side", choices=("L", "R", "both"), default="both")
            p.add_argument("--every", type=int, default=10, help="keep every n-th step")
        if name == "freq-curve":
            p.add_argument("--gradients", default="0,0.01,0.02,0.05,0.1,0.2,0.5")
            p.add_argument("--vt", default="12,10,8")
            p.add_argument("--span", type=float, default=40.0, help="ramp length in s")
        if name == "field-export":
            p.add_argument("--step", type=float, default=1.0, help="grid spacing in mm")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "json" if args.command in ("batch", "levy") else "csv"
    try:
        cfg = resolve_config(args)
        summary = COMMANDS[args.command][0](args, cfg)
    except (OSError, ValueError) as e:
        print(f"chemonav: error: {e}", file=sys.stderr)
        return 2
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
