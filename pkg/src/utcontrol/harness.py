"""Scenario execution: trace/trajectory file IO, the baseline pose controller, run and compare."""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import Scenario
from .core import ClosedLoopResult, n_loop_steps, run_closed_loop
from .errors import ConfigError
from .estimator import RecordedTrajectory, estimate_inputs
from .metrics import MetricsReport, compute_metrics
from .svgplot import write_scenario_svg

TRACE_COLUMNS = (
    "k", "t", "yr_ref", "yr_real",
    "u_cmdamp", "u_kright", "u_kleft", "u_alpha",
    "ypred", "pu_trace", "k_gain_norm",
)

BASELINE_DAMPING = 0.5
BASELINE_KP = 1.5
BASELINE_KFF = 0.1
BASELINE_LIMIT = 1.5
BASELINE_SLEW = 3.5


def _fmt(x: float) -> str:
    # 17 significant digits round-trips float64 exactly
    return format(float(x), ".17g")


def baseline_pose_controller(yr_ref: float, yr_real: float) -> float:
    """Pose-only proportional + feed-forward command, clamped to its actuation range.

    The slew limit is applied by the loop against the previously issued
    command; this function is the pure per-sample law.
    """
    raw = BASELINE_KP * (yr_ref - yr_real) + BASELINE_KFF * yr_ref
    if raw > BASELINE_LIMIT:
        return BASELINE_LIMIT
    if raw < -BASELINE_LIMIT:
        return -BASELINE_LIMIT
    return raw


def run_baseline_loop(plant, ref, dt: float, duration: float,
                      x0: np.ndarray | None = None) -> ClosedLoopResult:
    """Closed loop with the pose-only controller and fixed moment coefficients."""
    n = n_loop_steps(duration, dt)
    x = np.array(plant.initial_state() if x0 is None else x0, dtype=float)
    out = ClosedLoopResult(
        t=np.arange(n) * dt,
        yr_ref=np.empty(n),
        yr_real=np.empty(n),
        u_cmd=np.empty((n, 4)),
        y_pred=np.zeros(n),
        pu_trace=np.zeros(n),
        gain_norm=np.zeros(n),
        states=np.empty((n, x.shape[0])),
        records=[],
        dt=dt,
    )
    prev_cmd = 0.0
    bound = BASELINE_SLEW * dt
    for k in range(n):
        t = k * dt
        r = ref.value(t)
        y = float(plant.output(x)[0])
        out.yr_ref[k] = r
        out.yr_real[k] = y
        out.states[k] = x
        raw = baseline_pose_controller(r, y)
        delta = raw - prev_cmd
        if delta > bound:
            delta = bound
        elif delta < -bound:
            delta = -bound
        cmd = prev_cmd + delta
        prev_cmd = cmd
        u = np.array([BASELINE_DAMPING, 0.0, 0.0, cmd])
        out.u_cmd[k] = u
        x = plant.step(x, u, dt)
    return out


def write_trace_csv(path: str | Path, result: ClosedLoopResult) -> None:
    """Exact-column trace file; floats at 17 significant digits (lossless)."""
    n = result.n_steps
    m = result.u_cmd.shape[1]
    u4 = np.zeros((n, 4))
    u4[:, :min(m, 4)] = result.u_cmd[:, :4]
    with open(path, "w") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for k in range(n):
            row = [
                str(k), _fmt(result.t[k]), _fmt(result.yr_ref[k]), _fmt(result.yr_real[k]),
                _fmt(u4[k, 0]), _fmt(u4[k, 1]), _fmt(u4[k, 2]), _fmt(u4[k, 3]),
                _fmt(result.y_pred[k]), _fmt(result.pu_trace[k]), _fmt(result.gain_norm[k]),
            ]
            fh.write(",".join(row) + "\n")


def read_trace_csv(path: str | Path) -> dict[str, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != TRACE_COLUMNS:
            raise ConfigError(f"unexpected trace columns in {path}: {header}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(TRACE_COLUMNS)}


def write_trajectory_csv(path: str | Path, result: ClosedLoopResult) -> None:
    """State recording consumable by the estimator: t, output, state columns."""
    d = result.states.shape[1]
    header = ["t", "y"] + [f"x{i}" for i in range(d)]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for k in range(result.n_steps):
            row = [_fmt(result.t[k]), _fmt(result.yr_real[k])]
            row += [_fmt(v) for v in result.states[k]]
            fh.write(",".join(row) + "\n")


def read_trajectory_csv(path: str | Path) -> RecordedTrajectory:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if len(header) < 3 or header[0] != "t" or header[1] != "y":
            raise ConfigError(f"unexpected trajectory columns in {path}: {header}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    times = data[:, 0]
    if times.shape[0] < 2:
        raise ConfigError(f"trajectory {path} needs at least two samples")
    dt = float(times[1] - times[0])
    return RecordedTrajectory(times, data[:, 1], data[:, 2:], dt)


def write_estimates_csv(path: str | Path, estimates: np.ndarray, dt: float) -> None:
    m = estimates.shape[1]
    if m == 4:
        names = ["u_cmdamp", "u_kright", "u_kleft", "u_alpha"]
    else:
        names = [f"u_{j}" for j in range(m)]
    with open(path, "w") as fh:
        fh.write(",".join(["k", "t"] + names) + "\n")
        for k in range(estimates.shape[0]):
            row = [str(k), _fmt(k * dt)] + [_fmt(v) for v in estimates[k]]
            fh.write(",".join(row) + "\n")


@dataclass
class ScenarioOutcome:
    scenario: Scenario
    result: ClosedLoopResult
    metrics: MetricsReport
    trace_path: Path
    trajectory_path: Path
    metrics_path: Path
    plot_path: Path
    assert_failures: list[str]


def execute_scenario(scenario: Scenario, duration: float | None = None) -> tuple[ClosedLoopResult, float]:
    """Run the scenario's control loop; returns the trace and wall-clock seconds."""
    plant = scenario.build_plant()
    ref = scenario.build_reference()
    run_duration = scenario.duration if duration is None else duration
    start = time.perf_counter()
    if scenario.controller == "baseline_pose":
        if scenario.plant_kind != "surrogate_yaw":
            raise ConfigError("the baseline pose controller drives the surrogate plant only")
        result = run_baseline_loop(plant, ref, scenario.utc.dt, run_duration, x0=scenario.x0)
    else:
        result = run_closed_loop(plant, ref, scenario.utc, run_duration,
                                 belief0=scenario.belief0, x0=scenario.x0)
    return result, time.perf_counter() - start


def run_scenario(
    scenario: Scenario,
    out_dir: str | Path,
    duration: float | None = None,
    check_asserts: bool = False,
) -> ScenarioOutcome:
    """Run a scenario and write its trace CSV, trajectory CSV, metrics text, and SVG plot."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result, wall = execute_scenario(scenario, duration)
    metrics = compute_metrics(result.t, result.yr_ref, result.yr_real, result.u_cmd,
                              result.dt, wall_clock_s=wall)

    trace_path = out_dir / f"{scenario.name}_trace.csv"
    trajectory_path = out_dir / f"{scenario.name}_trajectory.csv"
    metrics_path = out_dir / f"{scenario.name}_metrics.txt"
    plot_path = out_dir / f"{scenario.name}_plot.svg"
    write_trace_csv(trace_path, result)
    write_trajectory_csv(trajectory_path, result)
    metrics_path.write_text("\n".join(metrics.lines()) + "\n")
    write_scenario_svg(plot_path, result.t, result.yr_ref, result.yr_real, result.u_cmd,
                       title=scenario.name)

    failures: list[str] = []
    if check_asserts:
        limits = scenario.assert_limits
        if "rms_error_max" in limits and metrics.rms_error > limits["rms_error_max"]:
            failures.append(
                f"rms_error {metrics.rms_error:.6g} exceeds limit {limits['rms_error_max']:.6g}"
            )
        if "max_abs_error_max" in limits and metrics.max_abs_error > limits["max_abs_error_max"]:
            failures.append(
                f"max_abs_error {metrics.max_abs_error:.6g} exceeds limit "
                f"{limits['max_abs_error_max']:.6g}"
            )
        if "convergence_time_max" in limits:
            if metrics.convergence_time is None:
                failures.append("did not converge")
            elif metrics.convergence_time > limits["convergence_time_max"]:
                failures.append(
                    f"convergence_time {metrics.convergence_time:.6g} exceeds limit "
                    f"{limits['convergence_time_max']:.6g}"
                )
    return ScenarioOutcome(scenario, result, metrics, trace_path, trajectory_path,
                           metrics_path, plot_path, failures)


def estimate_from_files(trajectory_path: str | Path, scenario: Scenario,
                        out_dir: str | Path) -> Path:
    """CLI back end for input estimation: trajectory CSV in, estimates CSV out."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj = read_trajectory_csv(trajectory_path)
    cfg = scenario.estimation_config()
    estimates, _ = estimate_inputs(traj, scenario.build_plant(), cfg, belief0=scenario.belief0)
    out_path = out_dir / f"{scenario.name}_estimates.csv"
    write_estimates_csv(out_path, estimates, cfg.dt)
    return out_path


def compare_scenarios(
    scenarios: list[Scenario],
    out_dir: str | Path,
    duration: float | None = None,
) -> tuple[str, Path, Path]:
    """Run several scenarios and produce a side-by-side metrics table (text and CSV)."""
    if len(scenarios) < 2:
        raise ConfigError("compare needs at least two scenarios")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outcomes = [run_scenario(s, out_dir, duration) for s in scenarios]

    fields = ["name", "rms_error", "max_abs_error", "convergence_time", "wall_clock_s"]
    rows = []
    for oc in outcomes:
        conv = "-" if oc.metrics.convergence_time is None else f"{oc.metrics.convergence_time:.4g}"
        rows.append([
            oc.scenario.name,
            f"{oc.metrics.rms_error:.6g}",
            f"{oc.metrics.max_abs_error:.6g}",
            conv,
            f"{oc.metrics.wall_clock_s:.4g}",
        ])
    widths = [max(len(f), *(len(r[i]) for r in rows)) for i, f in enumerate(fields)]
    lines = ["  ".join(f.ljust(widths[i]) for i, f in enumerate(fields))]
    for r in rows:
        lines.append("  ".join(v.ljust(widths[i]) for i, v in enumerate(r)))
    table = "\n".join(lines)

    text_path = out_dir / "comparison.txt"
    csv_path = out_dir / "comparison.csv"
    text_path.write_text(table + "\n")
    with open(csv_path, "w") as fh:
        fh.write(",".join(fields) + "\n")
        for r in rows:
            fh.write(",".join(r) + "\n")
    return table, text_path, csv_path
