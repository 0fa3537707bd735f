"""Command-line entry point: ``gpris <preset> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace

from .config import PRESETS, ConfigError, load_config, preset_config
from .experiments import calibrate, run_preset, write_tables

log = logging.getLogger("gpris")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gpris", description=__doc__)
    p.add_argument("command", choices=PRESETS + ("calibrate",))
    p.add_argument("--config", help="INI file with [experiment]/[music]/[geometry]/[ris]/[ofdm] sections")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials per cell")
    p.add_argument("--out", default="results", help="output directory for CSV tables")
    p.add_argument("--full-scale", action="store_true", help="500-row RIS and the long trial counts")
    p.add_argument("--workers", type=int, default=1, help="worker processes (output is identical for any value)")
    p.add_argument("--check-trials", type=int, default=10000, help="calibrate: independent noise-only trials")
    p.add_argument("--preset", default="pd-snr", help="calibrate: preset whose MUSIC settings are calibrated")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    preset = args.preset if args.command == "calibrate" else args.command
    try:
        if args.config:
            cfg = load_config(args.config, preset, full_scale=args.full_scale or None)
        else:
            cfg = preset_config(preset, full_scale=args.full_scale)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("seed must be an unsigned 64-bit integer")
            cfg = replace(cfg, seed=args.seed)
        if args.trials is not None:
            cfg = replace(cfg, trials=args.trials)
    except (ConfigError, ValueError) as exc:
        print(f"gpris: configuration error: {exc}", file=sys.stderr)
        return 2

    t0 = time.perf_counter()
    if args.command == "calibrate":
        table = calibrate(cfg, args.check_trials, args.out)
        row = dict(zip(table.columns, table.rows[0]))
        print(f"threshold={row['threshold']:.4f} measured_pfa={row['measured_pfa']:.4f}")
    else:
        tables = run_preset(cfg, workers=args.workers)
        for path in write_tables(tables, args.out):
            print(path)
    log.info("done in %.1f s", time.perf_counter() - t0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
