"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (or a failed
determinism check), 4 metrics-assertion failure in --assert-metrics mode.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ._backend import backend_name
from .config import load_scenario
from .errors import ConfigError, NumericalFailureError, TrajectoryTooShortError
from .harness import compare_scenarios, estimate_from_files, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_ASSERT = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="utcontrol",
        description="Sigma-point predictive tracking controller: run scenarios, "
                    "compare them, or estimate inputs from recorded trajectories.",
    )
    parser.add_argument("--version-info", action="store_true",
                        help="print the active kernel backend and exit")
    sub = parser.add_subparsers(dest="command")

    run_p = sub.add_parser("run", help="run one scenario config")
    run_p.add_argument("config", type=Path)
    run_p.add_argument("--out-dir", type=Path, default=Path("out"))
    run_p.add_argument("--duration", type=float, default=None,
                       help="override the configured duration (seconds)")
    run_p.add_argument("--seedless-check", action="store_true",
                       help="run twice and require bit-identical trace files")
    run_p.add_argument("--assert-metrics", action="store_true",
                       help="fail (exit 4) if the config's assert.* limits are violated")

    cmp_p = sub.add_parser("compare", help="run several configs and tabulate their metrics")
    cmp_p.add_argument("configs", type=Path, nargs="+")
    cmp_p.add_argument("--out-dir", type=Path, default=Path("out"))
    cmp_p.add_argument("--duration", type=float, default=None)

    est_p = sub.add_parser("estimate", help="estimate inputs explaining a recorded trajectory")
    est_p.add_argument("trajectory", type=Path)
    est_p.add_argument("config", type=Path)
    est_p.add_argument("--out-dir", type=Path, default=Path("out"))
    return parser


def _cmd_run(args) -> int:
    scenario = load_scenario(args.config)
    outcome = run_scenario(scenario, args.out_dir, duration=args.duration,
                           check_asserts=args.assert_metrics)
    if args.seedless_check:
        second_dir = Path(args.out_dir) / "seedless_check"
        repeat = run_scenario(load_scenario(args.config), second_dir, duration=args.duration)
        if outcome.trace_path.read_bytes() != repeat.trace_path.read_bytes():
            print("seedless check FAILED: traces differ between runs", file=sys.stderr)
            return EXIT_NUMERICAL
        print("seedless check passed: traces are bit-identical")
    for line in outcome.metrics.lines():
        print(line)
    print(f"trace: {outcome.trace_path}")
    print(f"plot:  {outcome.plot_path}")
    if outcome.assert_failures:
        for failure in outcome.assert_failures:
            print(f"metrics assertion failed: {failure}", file=sys.stderr)
        return EXIT_ASSERT
    return EXIT_OK


def _cmd_compare(args) -> int:
    scenarios = [load_scenario(p) for p in args.configs]
    table, text_path, csv_path = compare_scenarios(scenarios, args.out_dir,
                                                   duration=args.duration)
    print(table)
    print(f"written: {text_path}, {csv_path}")
    return EXIT_OK


def _cmd_estimate(args) -> int:
    scenario = load_scenario(args.config)
    out_path = estimate_from_files(args.trajectory, scenario, args.out_dir)
    print(f"estimates: {out_path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.version_info:
        print(f"utcontrol kernel backend: {backend_name()}")
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_estimate(args)
    except (ConfigError, TrajectoryTooShortError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
