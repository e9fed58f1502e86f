"""Command-line entry point.

Subcommands: run, sweep, calibrate, presets.  Exit codes: 0 success,
1 validation/usage error, 2 runtime or solver error.
"""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

from . import presets
from .electrochem import OperatingPointError
from .harness import (CalibrationError, ConfigError, calibrate_resistance,
                      load_scenario, run_scenario, sweep)
from .scene import SceneError
from .solver import SolverError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="hesstherm",
                     description="Transient thermal simulation of battery "
                                 "pack / fuel cell layouts")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("--scenario", required=True,
                       help="scenario file or preset name")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--dump-fields", action="store_true",
                       help="write a field dump at each record interval")
    p_run.add_argument("--workers", type=int, default=1)

    p_sweep = sub.add_parser("sweep", help="cartesian sweep over operating points")
    p_sweep.add_argument("--scenario", required=True,
                         help="scenario file or preset name (base settings)")
    p_sweep.add_argument("--c-rates", required=True,
                         help="comma-separated C-rates, e.g. 4,6,8")
    p_sweep.add_argument("--voltages", default=None,
                         help="comma-separated PEM voltages, e.g. 1.0,0.8,0.4")
    p_sweep.add_argument("--out", default="out")
    p_sweep.add_argument("--workers", type=int, default=1)

    p_cal = sub.add_parser("calibrate",
                           help="fit the battery reference resistance")
    p_cal.add_argument("--scenario", required=True)
    p_cal.add_argument("--target-dt", type=float, required=True,
                       help="target center-cell rise above ambient, K")

    p_pre = sub.add_parser("presets", help="write the shipped preset files")
    p_pre.add_argument("--out", default=".", help="target directory")
    return parser


def _resolve_scenario(name: str):
    path = Path(name)
    if path.exists():
        return load_scenario(path)
    if path.stem in presets.PRESET_SCENARIOS:
        tmp = Path(tempfile.mkdtemp(prefix="hesstherm_"))
        return load_scenario(presets.scenario_path(path.stem, tmp))
    raise ConfigError(f"scenario file not found: {name}")


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}: {exc}") from exc


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = _resolve_scenario(args.scenario)
            cfg.sim.workers = args.workers
            report = run_scenario(cfg, out_dir=Path(args.out),
                                  dump_fields=args.dump_fields)
            finals = ", ".join(
                f"{e}={report.final_mean_c(e):.3f}C"
                for e in sorted(report.entities))
            print(f"{report.label}: t={report.times[-1]:.0f}s {finals} "
                  f"hotspot={report.hotspot_entity}@{report.hotspot_c:.3f}C")
        elif args.command == "sweep":
            cfg = _resolve_scenario(args.scenario)
            cfg.sim.workers = args.workers
            c_rates = _parse_floats(args.c_rates)
            voltages = _parse_floats(args.voltages) if args.voltages else [None]
            if not c_rates:
                raise ConfigError("--c-rates must list at least one value")
            reports = sweep(cfg.scene, c_rates, voltages, cfg.sim,
                            out_dir=Path(args.out),
                            battery_params=cfg.battery_params,
                            pem_params=cfg.pem_params,
                            spacing=cfg.spacing)
            print(f"{len(reports)} runs written to {args.out}")
        elif args.command == "calibrate":
            cfg = _resolve_scenario(args.scenario)
            if args.target_dt <= 0:
                raise ConfigError("--target-dt must be > 0")
            r_ref = calibrate_resistance(
                args.target_dt, cfg.c_rate, cfg.sim.duration, cfg.scene,
                cfg.sim, battery_params=cfg.battery_params)
            print(f"calibrated reference resistance: {r_ref:.6g} ohm")
        elif args.command == "presets":
            written = presets.write_presets(Path(args.out))
            for p in written:
                print(p)
    except (ConfigError, SceneError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, CalibrationError, OperatingPointError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
