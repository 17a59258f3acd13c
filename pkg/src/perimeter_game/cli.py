"""Command line entry point.

Exit codes: 0 success, 1 runtime failure, 2 configuration error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .core import ScenarioConfig, theta_p, validate, wrap_angle
from .scenario_file import ScenarioFileError, dumps_scenario, load_scenario
from .simulator import ScenarioError, run_batch, run_scenario
from .strategies import StageLabel, critical_theta, theta_G
from .export import write_run_outputs

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2, 3

PRESETS = ("fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b")
SWEEP_PARAMS = ("nu", "rA", "R0", "theta0")
SWEEP_HEADER = ("index", "param", "value", "verdict", "stages", "full_info", "t_f")


class ConfigError(Exception):
    pass


def preset_path(name: str) -> Path:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset '{name}' (choose from {', '.join(PRESETS)})")
    seed_dir = os.environ.get("PERIMETER_GAME_SEED_DIR")
    if seed_dir:
        path = Path(seed_dir) / f"{name}.json"
        if not path.is_file():
            raise ConfigError(f"preset '{name}' not found in {seed_dir}")
        return path
    return Path(str(resources.files("perimeter_game") / "presets" / f"{name}.json"))


def load_preset(name: str) -> ScenarioConfig:
    return load_scenario(preset_path(name))


def swept_config(base: ScenarioConfig, param: str, value: float) -> ScenarioConfig:
    """Copy of ``base`` with one axis replaced. ``theta0`` rotates the defender."""
    if param == "theta0":
        x, y = base.attacker_start
        angle = wrap_angle(math.atan2(y, x) - value)
        return dataclasses.replace(base, defender_start_angle=angle)
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"cannot sweep '{param}' (choose from {', '.join(SWEEP_PARAMS)})")
    return dataclasses.replace(base, **{param: value})


def sweep_rows(base: ScenarioConfig, param: str, lo: float, hi: float, n: int, jobs: int = 1) -> list:
    if n < 2:
        raise ConfigError("sweep needs n >= 2")
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ConfigError("sweep needs finite lo < hi")
    values = [float(v) for v in np.linspace(lo, hi, n)]
    configs = [swept_config(base, param, v) for v in values]
    valid = [i for i, c in enumerate(configs) if not validate(c)]
    trajs = run_batch([configs[i] for i in valid], max_workers=jobs) if jobs > 1 else \
        [run_scenario(configs[i]) for i in valid]
    by_index = dict(zip(valid, trajs))
    rows = []
    for i, v in enumerate(values):
        traj = by_index.get(i)
        if traj is None:
            rows.append((i, param, repr(v), "Invalid", "", "", ""))
            continue
        stages = [st for st, _ in traj.outcome.stages_visited]
        rows.append((i, param, repr(v), traj.outcome.verdict.value,
                     "|".join(st.value for st in stages),
                     int(StageLabel.FULL_INFO in stages),
                     repr(traj.outcome.terminal_state.t)))
    return rows


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def barrier_rows(nu: float, R0: float, n: int, rA: float) -> list:
    if n < 2:
        raise ConfigError("barrier table needs n >= 2")
    if not R0 > 1.0 or not 0.0 < nu < 1.0 or not rA > 0.0:
        raise ConfigError("barrier table needs R0 > 1, 0 < nu < 1 and rA > 0")
    rows = []
    for R in np.linspace(1.0, R0, n):
        R = float(R)
        tp = theta_p(R, rA)
        rows.append((repr(R), repr(theta_G(R, nu)), "" if tp is None else repr(tp),
                     repr(critical_theta(R, nu))))
    return rows


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _report_run(traj, out_dir):
    files = write_run_outputs(traj, out_dir)
    o = traj.outcome
    print(f"verdict: {o.verdict.value}")
    print("stages: " + " -> ".join(st.value for st, _ in o.stages_visited))
    print(f"wrote {', '.join(str(p) for p in files.values())}")


def cmd_run(args) -> int:
    config = load_scenario(args.scenario)
    _report_run(run_scenario(config), args.output)
    return EXIT_OK


def cmd_figures(args) -> int:
    config = load_preset(args.name)
    out = Path(args.output or args.name)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scenario.json").write_text(dumps_scenario(config), encoding="utf-8")
    _report_run(run_scenario(config), out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = load_scenario(args.scenario)
    rows = sweep_rows(base, args.param, args.lo, args.hi, args.n, args.jobs)
    path = Path(args.output) / "sweep.csv"
    write_csv(path, SWEEP_HEADER, rows)
    print(f"wrote {path} ({len(rows)} runs)")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_verification

    report = run_verification(grid=args.grid)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verification.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                           encoding="utf-8")
    wm, dev, bar = report["winner_map"], report["deviations"], report["barrier_invariance"]
    lines = [
        (wm["passed"], f"winner map agreement {wm['agreement']:.4%} on {wm['grid']}x{wm['grid']}"),
        (dev["passed"], f"dominating deviations: {dev['dominating_deviations']}"),
        (bar["passed"], f"barrier invariance max |theta - theta_G| = {bar['max_barrier_gap']:.3e}"),
    ]
    for ok, text in lines:
        print(f"{'PASS' if ok else 'FAIL'}  {text}")
    print(f"wrote {out / 'verification.json'}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_barrier_table(args) -> int:
    rA = args.ra if args.ra is not None else min(args.r0 - 1.0, 1.0)
    rows = barrier_rows(args.nu, args.r0, args.n, rA)
    write_csv(Path(args.path), ("R", "theta_G", "theta_p", "theta_c"), rows)
    print(f"wrote {args.path} ({len(rows)} rows)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perimeter-game", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario file")
    p.add_argument("scenario")
    p.add_argument("-o", "--output", default=".")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("figures", help="run one of the built-in presets")
    p.add_argument("name")
    p.add_argument("-o", "--output", default=None, help="output directory (default: the preset name)")
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("sweep", help="vary one parameter over a grid")
    p.add_argument("scenario")
    p.add_argument("--param", required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", default=".")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the oracle suites")
    p.add_argument("-o", "--output", default=".")
    p.add_argument("--grid", type=int, default=200)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("barrier-table", help="tabulate the barrier and related curves")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ra", type=float, default=None, help="ASR radius for the theta_p column")
    p.add_argument("path")
    p.set_defaults(func=cmd_barrier_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ScenarioFileError, ScenarioError) as exc:
        problems = getattr(exc, "problems", None) or getattr(exc, "violations", None) or [str(exc)]
        for msg in problems:
            print(f"error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
