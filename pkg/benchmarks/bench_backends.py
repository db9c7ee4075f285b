"""Benchmark the compiled propagation kernels against the pure-Python fallback.

Runs the fast-turn tracking scenario end to end on each available backend and
reports wall time, speedup, and the largest trace discrepancy (expected to be
exactly zero: both backends evaluate identical floating-point expressions).

Usage: python benchmarks/bench_backends.py [--duration SECONDS] [--config PATH]
"""

import argparse
import time
from pathlib import Path

import numpy as np

from utcontrol import available_backends, estimate_inputs, load_scenario, replay_trajectory, set_backend
from utcontrol.harness import execute_scenario

DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "fast_turn_utc.cfg"


def _bench(backends, repeats, runner):
    results = {}
    for name in backends:
        set_backend(name)
        best = float("inf")
        trace = None
        for _ in range(repeats):
            start = time.perf_counter()
            trace = runner()
            best = min(best, time.perf_counter() - start)
        results[name] = (best, trace)
    return results


def _summarize(results, per_run_steps):
    for name, (best, _) in results.items():
        print(f"{name:>9}: {best:8.3f} s ({per_run_steps / best / 1e6:.2f} M plant steps/s)")
    if len(results) == 2:
        t_py, a = results["python"]
        t_c, b = results["compiled"]
        print(f"speedup: {t_py / t_c:.1f}x")
        diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        print(f"max discrepancy: {diff:.3e}")
        if diff != 0.0:
            print("WARNING: backends disagree; kernel twins are out of sync")
            return 1
    return 0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--duration", type=float, default=30.0)
    parser.add_argument("--config", type=Path, default=DEFAULT_CONFIG)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")
    if "compiled" not in backends:
        print("compiled extension not built; benchmarking the python backend only")

    scenario = load_scenario(args.config)
    n_pts = 2 * scenario.belief0.dim + 1

    print(f"\nclosed loop ({scenario.utc.t_pred_steps}-step horizon, "
          f"{args.duration:g} s simulated):")
    results = _bench(
        backends, args.repeats,
        lambda: execute_scenario(scenario, duration=args.duration)[0].u_cmd,
    )
    n_outer = results[backends[0]][1].shape[0]
    status = _summarize(results, n_outer * n_pts * scenario.utc.t_pred_steps)

    est_cfg = scenario.estimation_config()
    est_cfg.t_pred_steps = round(0.25 / est_cfg.dt)
    plant = scenario.build_plant()
    inputs = execute_scenario(scenario, duration=args.duration)[0].u_cmd
    traj = replay_trajectory(plant, inputs, est_cfg.dt)

    print(f"\ninput estimation ({est_cfg.t_pred_steps}-step horizon, same recording):")
    results = _bench(
        backends, args.repeats,
        lambda: estimate_inputs(traj, plant, est_cfg, belief0=scenario.belief0)[0],
    )
    n_est = results[backends[0]][1].shape[0]
    status |= _summarize(results, n_est * n_pts * est_cfg.t_pred_steps)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
