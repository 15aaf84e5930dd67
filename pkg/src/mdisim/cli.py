"""Command-line interface: ``mdisim sweep|verify|point``.

Exit codes: 0 success, 1 configuration error, 2 oracle mismatch,
3 numerical-conditioning failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import load_config
from .errors import CapacityError, ConfigError, DomainError, IllConditionedError, \
    UndefinedBoundError
from .sweep import COLUMNS, gain_table_rows, run_point, run_sweep, run_verify, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_MISMATCH, EXIT_NUMERICAL = 0, 1, 2, 3


def _open_output(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    rows = run_sweep(cfg, jobs=args.jobs)
    out, close = _open_output(args.output or cfg.path)
    try:
        write_csv(rows, out)
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_point(args) -> int:
    cfg = load_config(args.config)
    point = run_point(cfg, args.loss_db, per_arm_override=True, mu_prime=args.mu_prime)
    out, close = _open_output(args.output)
    try:
        out.write(f"# loss_db_alice={point.channel.loss_db_a:.12g} "
                  f"loss_db_bob={point.channel.loss_db_b:.12g} "
                  f"mu={point.decoy.mu:.12g} mu_prime={point.mu_prime:.12g}\n")
        write_csv(gain_table_rows(point), out,
                  ("alice", "bob", "basis", "gain", "raw_error", "error"))
        out.write("\n")
        write_csv([point.row()], out, COLUMNS)
        unweighted = point.bounds["X"].e11_upper_unweighted
        out.write("# e11_X_upper_unweighted="
                  f"{'' if unweighted is None else format(unweighted, '.12g')}\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_verify(args.max_photons, args.dark)
    for d, orient, event, k1, k2, closed, brute in report.mismatches:
        print(f"MISMATCH d={d:g} {orient} {event} k=({k1},{k2}): "
              f"closed={closed:.17g} oracle={brute:.17g}")
    status = "PASS" if report.passed else "FAIL"
    print(f"{status}: {report.comparisons} comparisons, {len(report.mismatches)} mismatches, "
          f"max |diff| = {report.max_abs_error:.3g} (tolerance {report.tolerance:g})")
    return EXIT_OK if report.passed else EXIT_MISMATCH


def _dark_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdisim", description="MDI-QKD gain, error-rate and decoy key-rate simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="sweep channel loss and write a CSV")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="CSV path (default: [output] path or stdout)")
    p.add_argument("-j", "--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check closed forms against the Fock-space oracle")
    p.add_argument("--max-photons", type=int, default=4)
    p.add_argument("--dark", type=_dark_list, default=[0.0, 1e-3, 0.05],
                   help="comma-separated dark-count probabilities")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("point", help="dump the full gain table at one loss value")
    p.add_argument("config")
    p.add_argument("--loss-db", type=float, required=True, help="total channel loss")
    p.add_argument("--mu-prime", type=float, help="fix the signal intensity")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_point)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DomainError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IllConditionedError, UndefinedBoundError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
