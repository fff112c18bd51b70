"""Command line front end.

    qimcf run --config FILE [--out DIR]
    qimcf sweep --config FILE --vary KEY=V1,V2,... [--vary ...] [--out DIR]
    qimcf verify-ambient [--n N] [--samples K]

The QIMCF_OUT environment variable overrides the configured output
directory; an explicit --out overrides both.
"""

import argparse
import logging
import sys

from .config import ConfigError, parse_config
from .harness import (EXIT_CONFIG, EXIT_OK, run_experiment, sweep,
                      verify_ambient_report)

logger = logging.getLogger(__name__)


def _load_config(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _parse_vary(entries):
    vary = []
    for entry in entries:
        key, sep, values = entry.partition("=")
        if not sep or not key or not values:
            raise ConfigError(f"--vary expects KEY=V1,V2,..., got {entry!r}")
        vary.append((key.strip(), [v.strip() for v in values.split(",")]))
    return vary


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    result = run_experiment(cfg, out_dir=args.out)
    if result.exit_code == EXIT_OK:
        rep = result.report
        print(f"run complete: {result.out_dir}")
        print(f"  Q_final = {rep['Q_final']:.6g}, limit_Q = "
              f"{rep['limit_Q']:.6g}, verdict = {rep['verdict']}")
    else:
        print(f"run failed with exit code {result.exit_code}; partial "
              f"diagnostics in {result.out_dir}", file=sys.stderr)
    return result.exit_code


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    rows = sweep(cfg, _parse_vary(args.vary), out_dir=args.out)
    failed = sum(1 for row in rows if row["verdict"] == "FAILED")
    print(f"sweep complete: {len(rows)} cells, {failed} failed")
    for row in rows:
        print("  " + ", ".join(f"{c}={row[c]}" for c in
                               ("tau", "amplitude", "Q_final", "limit_Q",
                                "verdict")))
    return EXIT_OK if failed == 0 else EXIT_CONFIG


def _cmd_verify_ambient(args) -> int:
    report, checks, ok = verify_ambient_report(args.n, args.samples)
    print(f"ambient verification, n={args.n}, {args.samples} samples:")
    print(f"  sectional range observed [{report['sectional_min']:.6f}, "
          f"{report['sectional_max']:.6f}]")
    for name, value, tol, passed in checks:
        status = "PASS" if passed else "FAIL"
        print(f"  {status}  {name} = {value:.3e} (tol {tol:g})")
    return EXIT_OK if ok else EXIT_CONFIG


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qimcf",
        description="Inverse mean curvature flow of invariant star-shaped "
                    "hypersurfaces in quaternionic hyperbolic space")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configured experiment")
    p_run.add_argument("--config", required=True, help="config file path")
    p_run.add_argument("--out", help="output directory override")

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    p_sweep.add_argument("--config", required=True, help="config file path")
    p_sweep.add_argument("--vary", action="append", required=True,
                         metavar="KEY=V1,V2,...",
                         help="axis to vary; repeat for a product sweep")
    p_sweep.add_argument("--out", help="output directory override")

    p_ver = sub.add_parser("verify-ambient",
                           help="verify ambient curvature identities")
    p_ver.add_argument("--n", type=int, default=2,
                       help="quaternionic dimension (default 2)")
    p_ver.add_argument("--samples", type=int, default=1000,
                       help="random samples per check (default 1000)")

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_verify_ambient(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
