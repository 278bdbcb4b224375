"""Command-line entry point.

Subcommands: validate, run, equilibrate, sweep, reproduce.

Exit codes: 0 success, 2 configuration error, 3 energy-audit failure,
4 no equilibrium, 5 output conflict (existing files and no ``--force``).
The output directory defaults to ``$HOTLOOP_OUT`` or ``./hotloop-out``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .analysis import solve_equilibrium, sweep_temperature
from .config import PlantConfig, config_hash, load_config, save_config, with_overrides
from .errors import HotloopError, InvalidConfig
from .figures import reproduce_figures, write_bundle
from .plant import build_plant, initial_state, run
from .scenario import load_scenario
from .telemetry import SensorSpec, apply_sensor_noise, write_timeseries

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_AUDIT = 3
EXIT_NO_EQUILIBRIUM = 4
EXIT_CONFLICT = 5

AUDIT_TOL = 1e-6
OUT_ENV = "HOTLOOP_OUT"


class _Conflict(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON configuration file")
    common.add_argument("--out", metavar="DIR", help=f"output directory (default ${OUT_ENV} or ./hotloop-out)")
    common.add_argument("--seed", type=int, help="override seed")
    common.add_argument("--dt", type=float, help="override time step, s")
    common.add_argument("--duration", type=float, help="override simulated duration, s")
    common.add_argument("--force", action="store_true", help="overwrite existing output files")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field by dotted path, e.g. chiller.capacity_scale=0.2")

    p = argparse.ArgumentParser(prog="hotloop", description="Hot-water cooled cluster plant simulator")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="validate and print the effective config")
    r = sub.add_parser("run", parents=[common], help="simulate and write time series")
    r.add_argument("--scenario", metavar="PATH", help="JSON list of timed events")
    sub.add_parser("equilibrate", parents=[common], help="solve for the equilibrium temperature")
    s = sub.add_parser("sweep", parents=[common], help="steady-state rows over outlet setpoints")
    s.add_argument("--setpoints", default="50,55,60,65,70",
                   help="comma list of degC, or start:stop:step (stop inclusive)")
    sub.add_parser("reproduce", parents=[common], help="write the figure dataset bundle")
    return p


def _config(args) -> PlantConfig:
    if args.config:
        try:
            with open(args.config, "rb") as fh:
                text = fh.read()
        except OSError as exc:
            raise InvalidConfig(f"cannot read config: {exc.strerror}", args.config) from None
        cfg = load_config(text)
    else:
        cfg = PlantConfig()
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidConfig("expected KEY=VALUE", item)
        overrides[key.strip()] = value.strip()
    for key in ("seed", "dt", "duration"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    return with_overrides(cfg, overrides) if overrides else cfg


def _parse_setpoints(text: str) -> list[float]:
    try:
        if ":" in text:
            a, b, c = (float(v) for v in text.split(":"))
            if c <= 0:
                raise ValueError
            return [float(v) for v in np.round(np.arange(a, b + c / 2, c), 9)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidConfig(f"cannot parse setpoints {text!r}", "--setpoints") from None


def _outdir(args) -> str:
    return args.out or os.environ.get(OUT_ENV) or "hotloop-out"


def _claim(directory: str, names, force: bool) -> None:
    """Refuse to overwrite existing artifacts unless forced."""
    existing = [n for n in names if os.path.exists(os.path.join(directory, n))]
    if existing and not force:
        raise _Conflict(f"{os.path.join(directory, existing[0])} exists (use --force to overwrite)")
    os.makedirs(directory, exist_ok=True)


def cmd_validate(args) -> int:
    cfg = _config(args)
    sys.stdout.write(save_config(cfg))
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    events = ()
    if args.scenario:
        try:
            with open(args.scenario, "rb") as fh:
                events = load_scenario(fh.read())
        except OSError as exc:
            raise InvalidConfig(f"cannot read scenario: {exc.strerror}", args.scenario) from None
    out = _outdir(args)
    names = ("timeseries_true.csv", "timeseries_noisy.csv", "run.json")
    _claim(out, names, args.force)
    plant = build_plant(cfg)
    series = run(plant, initial_state(plant), cfg.duration, cfg.dt, events)
    noise_seed = cfg.seed + 1
    noisy = apply_sensor_noise(series, SensorSpec(), noise_seed)
    write_timeseries(series, os.path.join(out, names[0]))
    write_timeseries(noisy, os.path.join(out, names[1]))
    max_res = float(np.max(series["audit_residual"]))
    summary = {
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "noise_seed": noise_seed,
        "dt": cfg.dt,
        "duration": cfg.duration,
        "samples": len(series),
        "max_audit_residual": max_res,
        "final_t_rack_out_C": series.last("t_rack_out_C"),
        "events": [e.__dict__ for e in events],
    }
    with open(os.path.join(out, names[2]), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{len(series)} samples written to {out}")
    print(f"final rack outlet {summary['final_t_rack_out_C']:.3f} degC, max audit residual {max_res:.3g}")
    if not max_res < AUDIT_TOL:
        print(f"energy audit failed: residual {max_res:.3g} >= {AUDIT_TOL:g}", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_OK


def cmd_equilibrate(args) -> int:
    cfg = _config(args)
    eq = solve_equilibrium(build_plant(cfg))
    print(eq.format_table())
    if eq.t_eq is None:
        print(f"no equilibrium: {eq.diagnosis}")
        return EXIT_NO_EQUILIBRIUM
    print(f"T_eq = {eq.t_eq:.2f} degC ({eq.diagnosis})")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    setpoints = _parse_setpoints(args.setpoints)
    out = _outdir(args)
    _claim(out, ("sweep.csv",), args.force)
    table = sweep_temperature(build_plant(cfg), setpoints)
    with open(os.path.join(out, "sweep.csv"), "w", encoding="ascii", newline="\n") as fh:
        fh.write(table.to_csv())
    sys.stdout.write(table.to_csv())
    bad = [r[0] for r in table.rows if not r[-1]]
    if bad:
        print(f"not converged: {', '.join(f'{v:g}' for v in bad)}", file=sys.stderr)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    cfg = _config(args)
    out = _outdir(args)
    bundle = reproduce_figures(build_plant(cfg))
    _claim(out, [f"{d.name}.csv" for d in bundle.datasets] + ["manifest.json"], args.force)
    names = write_bundle(bundle, out)
    print(f"{len(names) - 1} datasets and manifest written to {out}")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "run": cmd_run,
    "equilibrate": cmd_equilibrate,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InvalidConfig as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _Conflict as exc:
        print(f"output conflict: {exc}", file=sys.stderr)
        return EXIT_CONFLICT
    except HotloopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
