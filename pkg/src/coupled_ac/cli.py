"""Command-line entry point: ``coupled-ac <subcommand> [--config FILE] [--seed N] [--out DIR]``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dynamics, persist
from .config import emit_config, load_config
from .errors import ConfigurationError
from .verify import SUITES

EPILOG = """\
artifacts (under OUT/SUBCOMMAND/):
  simulate       m1.bin, m2.bin   header (nx, nt, dx, dt, seed) as little-endian
                                  int64, int64, float64, float64, uint64, then
                                  row-major float64 rows, one per time step
                 params.txt       the effective config (key = value) minus 'out'
                 trajectory.csv   columns t,x,m1,m2: time, grid point and both
                                  fields; every csv_every-th step plus the last
  verify-*, cauchy-study, uniqueness
                 report.txt       one PASS/FAIL line per check naming the result
                 summary.csv      columns suite,lemma,check,value,target,status
                 <table>.csv      the numbers behind the checks

exit status: 0 iff every check passes; 1 if any check fails; 2 for a
malformed or physically invalid config.
"""


def _parser():
    ap = argparse.ArgumentParser(
        prog="coupled-ac",
        description="Simulate and verify the coupled stochastic Allen-Cahn system.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("subcommand", choices=["simulate", *SUITES, "print-config"])
    ap.add_argument("--config", type=Path, help="key = value config file (defaults: packaged default.conf)")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--out", type=Path, help="override the output directory")
    return ap


def run(subcommand, cfg):
    """Run one subcommand on a validated config; returns the exit status."""
    out = Path(cfg.out) / subcommand
    if subcommand == "print-config":
        sys.stdout.write(emit_config(cfg))
        return 0
    if subcommand == "simulate":
        grid = cfg.grid()
        traj = dynamics.simulate(cfg.model(grid), grid, seeds=cfg.seeds)
        # the sidecar leaves out the output path so reruns elsewhere stay byte-identical
        persist.write_trajectory(out, traj, emit_config(cfg, exclude=("out",)), cfg.csv_every)
        print(f"wrote {out} ({grid.nt} steps, {grid.nx} points)")
        return 0
    report = SUITES[subcommand](cfg)
    persist.atomic_write(out / "report.txt", report.text())
    persist.atomic_write(out / "summary.csv", report.summary_csv())
    for name, text in report.tables.items():
        persist.atomic_write(out / f"{name}.csv", text)
    sys.stdout.write(report.text())
    return 0 if report.passed else 1


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed)
        if args.out is not None:
            cfg = cfg.replace(out=str(args.out))
        cfg.validate()
        return run(args.subcommand, cfg)
    except ConfigurationError as exc:
        print(f"coupled-ac: config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
