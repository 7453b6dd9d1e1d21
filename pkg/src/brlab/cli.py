"""Command line front end: ``brlab <experiment> --config <path>``.

Exit codes: 0 success, 2 validation failure, 1 runtime error.  The worker
count comes from --threads or the BRLAB_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import fourier
from .harness import EXPERIMENTS, ExperimentConfig, run, validate


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="brlab",
        description="Run one numerical experiment from a flat-text config.")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, help="flat key = value file")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="master seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="fft workers (default: BRLAB_THREADS or 1)")
    args = parser.parse_args(argv)

    try:
        config = ExperimentConfig.from_file(args.config, args.experiment)
    except (OSError, ValueError) as exc:
        print(f"brlab: cannot read config: {exc}", file=sys.stderr)
        return 2
    if config.raw.get("experiment") and config.raw["experiment"] != args.experiment:
        print(f"brlab: config names experiment {config.raw['experiment']!r} "
              f"but the command line says {args.experiment!r}", file=sys.stderr)
        return 2
    if args.seed is not None:
        config.raw["seed"] = str(args.seed)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("BRLAB_THREADS", "1"))
    config.raw["threads"] = str(threads)

    violations = validate(config)
    if violations:
        for v in violations:
            print(f"brlab: {v}", file=sys.stderr)
        return 2
    try:
        record = run(config, out_dir=args.out)
    except Exception as exc:  # runtime failure after validation
        print(f"brlab: experiment failed: {exc}", file=sys.stderr)
        return 1
    print(f"{record.experiment}: ok ({record.wall_time:.1f}s) -> {record.out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
