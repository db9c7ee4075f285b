"""The sigma-point predictive controller: per-step prediction, observation, and gain update.

Each step spreads sigma points over the control belief, constraint-processes
them, lets every point drive its own plant copy to the prediction horizon,
and updates the belief with a Kalman-dual gain against the future reference.
The same utc_step also powers the input estimator (see estimator.py), which
swaps the analytic reference for a recorded output signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .constraints import ControlBounds, clamp, reflect_collapsed, slew_limit, turn_control_bounds
from .errors import ConfigError, NumericalFailureError
from .noise import (
    HysteresisState,
    NoiseCouplingPolicy,
    build_qu,
    default_k_hyst,
    initial_belief,
    noise_base,
    s14_schedule,
)
from .plants import (
    ControlDynamicsPolicy,
    LinearPlant,
    PlantModel,
    SurrogateYawPlant,
    embedded_control_step,
)
from .ut_math import (
    ControlBelief,
    SigmaPointSet,
    generate_sigma_points,
    psd_repair_with_min_eig,
    weighted_covariance,
    weighted_mean,
)

DEFAULT_DT = 0.0042

# Default horizon lengths per control-dynamics assumption: holding the
# command constant needs a longer look; the embedded feedback law gets away
# with a quarter of that.
DEFAULT_HORIZON = {"hold_constant": 20, "pi_feedforward": 5}


@dataclass
class UtcConfig:
    """Controller settings.

    pattern_index names the control channel treated as the actuated pattern
    angle (slew-limited, driven by the embedded control law); None for plants
    without one.  qu_base holds the per-step noise magnitudes the coupling
    schedule rewrites; for 4-channel layouts it defaults to 0.1 times the
    initial-covariance structure.
    """

    w0: float = 0.25
    t_pred_steps: int = 20
    dt: float = DEFAULT_DT
    p_err: np.ndarray = field(default_factory=lambda: np.array([[1e-4]]))
    bounds: ControlBounds = field(default_factory=turn_control_bounds)
    policy: ControlDynamicsPolicy = field(default_factory=ControlDynamicsPolicy)
    noise: NoiseCouplingPolicy = field(default_factory=NoiseCouplingPolicy)
    qu_base: np.ndarray = field(default_factory=lambda: noise_base(0.1))
    pattern_index: int | None = 3
    k_hyst: int | None = None

    def __post_init__(self):
        if self.t_pred_steps < 1:
            raise ConfigError("t_pred_steps must be >= 1")
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        self.p_err = np.atleast_2d(np.asarray(self.p_err, dtype=float))
        if self.p_err.shape[0] != self.p_err.shape[1]:
            raise ConfigError("p_err must be square")
        if np.any(np.linalg.eigvalsh(0.5 * (self.p_err + self.p_err.T)) <= 0.0):
            raise ConfigError("p_err must be symmetric positive definite")
        self.qu_base = np.asarray(self.qu_base, dtype=float)
        if self.noise.kind != "none" and self.qu_base.shape != (4, 4):
            raise ConfigError("noise coupling schedules require a 4-channel control vector")

    @property
    def horizon_seconds(self) -> float:
        return self.t_pred_steps * self.dt

    def resolved_tau(self) -> float:
        return self.policy.tau if self.policy.tau is not None else self.horizon_seconds

    def resolved_k_hyst(self) -> int:
        return self.k_hyst if self.k_hyst is not None else default_k_hyst(self.dt)

    def slew_for(self, index: int) -> float:
        if self.bounds.slew_rate is None:
            return math.inf
        return float(self.bounds.slew_rate[index])


@dataclass
class UtcStepRecord:
    """Everything one controller step computed, for tracing and diagnostics."""

    k: int
    u_cmd: np.ndarray
    y_pred: np.ndarray
    c_y: np.ndarray
    c_uy: np.ndarray
    gain: np.ndarray
    pu_trace: float
    sigma_outputs: np.ndarray
    innovation: np.ndarray
    min_eig_pre_repair: float
    min_eig_post_repair: float


def propagate_sigma_point(
    ui: np.ndarray,
    x_truth: np.ndarray,
    plant: PlantModel,
    policy: ControlDynamicsPolicy,
    ref,
    k: int,
    cfg: UtcConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Drive one plant copy from the true state to the horizon under one control sample.

    Returns the terminal applied control vector and the terminal output.
    Generic (works for any PlantModel); utc_step batches the bundled plants
    through the selected kernel backend instead.
    """
    ui = np.asarray(ui, dtype=float)
    x = np.array(x_truth, dtype=float)
    dt = cfg.dt
    tau = cfg.resolved_tau()
    pat_idx = cfg.pattern_index
    if pat_idx is None:
        for _ in range(cfg.t_pred_steps):
            x = plant.step(x, ui, dt)
        return ui.copy(), np.asarray(plant.output(x), dtype=float)

    start = plant.pattern_angle(x)
    alpha_prev = float(ui[pat_idx]) if start is None else start
    y_now = float(plant.output(x)[0])
    y_prev = y_now
    # the plant's own pattern constraints govern the rollout (the bounds'
    # slew applies to the emitted command in utc_step)
    slew = getattr(plant, "pattern_slew", cfg.slew_for(pat_idx))
    limit = getattr(plant, "pattern_limit", float(cfg.bounds.max[pat_idx]))
    applied = ui.copy()
    for j in range(1, cfg.t_pred_steps + 1):
        t = (k + j) * dt
        alpha_cmd = embedded_control_step(
            policy, ui, alpha_prev, t, ref, y_now, y_prev, dt, tau, slew=slew, limit=limit
        )
        applied[pat_idx] = alpha_cmd
        alpha_prev = alpha_cmd
        x = plant.step(x, applied, dt)
        y_prev = y_now
        y_now = float(plant.output(x)[0])
    return applied, np.asarray(plant.output(x), dtype=float)


def _propagate_batch(
    points: np.ndarray,
    x_truth: np.ndarray,
    plant: PlantModel,
    ref,
    k: int,
    cfg: UtcConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Propagate all sigma points; kernel fast path for the bundled plants."""
    n_pts = points.shape[0]
    kernels = _backend.active()
    spec = getattr(ref, "kernel_spec", None)

    if isinstance(plant, SurrogateYawPlant) and cfg.pattern_index == 3 and spec is not None:
        ref_kind, ref_a, ref_b, ref_c, samples, sdt, t0 = spec()
        finals = np.empty((n_pts, 4))
        outputs = np.empty(n_pts)
        kernels.propagate_surrogate(
            np.ascontiguousarray(points), np.ascontiguousarray(x_truth, dtype=float),
            k, cfg.dt, cfg.t_pred_steps,
            plant.inertia, plant.pattern_gain, plant.damping_gain, plant.roll_tau,
            plant.lever, plant.lx_hand, plant.k_n,
            plant.pattern_limit, plant.pattern_slew,
            cfg.policy.code, cfg.policy.kp, cfg.policy.kff, cfg.resolved_tau(),
            ref_kind, ref_a, ref_b, ref_c, np.ascontiguousarray(samples), sdt, t0,
            finals, outputs,
        )
        return finals, outputs.reshape(n_pts, 1)

    if isinstance(plant, LinearPlant) and cfg.pattern_index is None:
        finals = np.empty((n_pts, points.shape[1]))
        outputs = np.empty(n_pts)
        kernels.propagate_linear(
            np.ascontiguousarray(points), np.ascontiguousarray(x_truth, dtype=float),
            k, cfg.dt, cfg.t_pred_steps, plant.a, plant.b,
            finals, outputs,
        )
        return finals, outputs.reshape(n_pts, 1)

    finals = np.empty_like(points)
    outputs = None
    for i in range(n_pts):
        final, y = propagate_sigma_point(points[i], x_truth, plant, cfg.policy, ref, k, cfg)
        if outputs is None:
            outputs = np.empty((n_pts, y.shape[0]))
        finals[i] = final
        outputs[i] = y
    return finals, outputs


def utc_step(
    belief: ControlBelief,
    x_truth: np.ndarray,
    plant: PlantModel,
    ref,
    k: int,
    cfg: UtcConfig,
    hyst: HysteresisState,
    prev_cmd: np.ndarray | None = None,
) -> tuple[ControlBelief, np.ndarray, UtcStepRecord]:
    """One full controller step: predict, observe, update, constrain.

    prev_cmd is the previously applied command the slew limit is enforced
    against; None disables slew limiting for this step (used at k=0 when no
    command has been applied yet is handled by the caller passing the
    clamped initial mean instead).
    """
    m = belief.dim

    # per-step process noise, with the hysteresis sign advanced first
    scheduled = m == 4 and cfg.qu_base.shape == (4, 4) and cfg.pattern_index == 3
    if cfg.noise.kind != "none" and not scheduled:
        raise ConfigError("noise coupling schedules require the 4-channel control layout")
    if scheduled:
        s14 = s14_schedule(k, ref, hyst, cfg.dt)
        qu = build_qu(k, cfg.noise, s14, cfg.qu_base, ref, cfg.dt)
    else:
        qu = cfg.qu_base

    sigma = generate_sigma_points(belief, cfg.w0)
    mean_c = clamp(belief.mean, cfg.bounds)
    processed = np.empty_like(sigma.points)
    for i in range(sigma.n_points):
        processed[i] = clamp(reflect_collapsed(sigma.points[i], mean_c, cfg.bounds), cfg.bounds)

    finals, outputs = _propagate_batch(processed, x_truth, plant, ref, k, cfg)

    weights = sigma.weights
    final_set = SigmaPointSet(finals, weights)
    u_pred = weighted_mean(final_set, finals)
    pu_pred = weighted_covariance(final_set, u_pred, qu)

    y_pred = weighted_mean(final_set, outputs)
    dy = outputs - y_pred
    c_y = cfg.p_err + (dy.T * weights) @ dy
    du = finals - u_pred
    c_uy = (du.T * weights) @ dy

    if not np.all(np.isfinite(c_y)):
        raise NumericalFailureError(f"non-finite innovation covariance at step {k}: {c_y}")
    try:
        gain = np.linalg.solve(c_y.T, c_uy.T).T
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(
            f"innovation covariance singular at step {k} despite p_err: {c_y}"
        ) from exc

    y_target = ref.value((k + cfg.t_pred_steps) * cfg.dt)
    innovation = np.atleast_1d(y_target) - y_pred
    mean_raw = u_pred + gain @ innovation

    # slew (against the previously applied command), then clamp
    mean_new = np.array(mean_raw)
    if prev_cmd is not None and cfg.bounds.slew_rate is not None:
        for j in range(m):
            rate = float(cfg.bounds.slew_rate[j])
            if math.isfinite(rate):
                mean_new[j] = slew_limit(float(prev_cmd[j]), float(mean_raw[j]), rate, cfg.dt)
    mean_new = clamp(mean_new, cfg.bounds)

    pu_down = pu_pred - gain @ c_y @ gain.T
    pu_new, min_eig_pre = psd_repair_with_min_eig(pu_down)

    if not np.all(np.isfinite(mean_new)):
        raise NumericalFailureError(f"non-finite command at step {k}")

    new_belief = ControlBelief(mean_new, pu_new)
    record = UtcStepRecord(
        k=k,
        u_cmd=mean_new.copy(),
        y_pred=np.atleast_1d(y_pred).copy(),
        c_y=c_y.copy(),
        c_uy=c_uy.copy(),
        gain=gain.copy(),
        pu_trace=float(np.trace(pu_new)),
        sigma_outputs=outputs.copy(),
        innovation=np.atleast_1d(innovation).copy(),
        min_eig_pre_repair=min_eig_pre,
        min_eig_post_repair=max(min_eig_pre, 1e-12) if min_eig_pre < 1e-12 else min_eig_pre,
    )
    return new_belief, mean_new, record


@dataclass
class ClosedLoopResult:
    """Per-step traces from a closed-loop run (arrays indexed by step)."""

    t: np.ndarray
    yr_ref: np.ndarray
    yr_real: np.ndarray
    u_cmd: np.ndarray
    y_pred: np.ndarray
    pu_trace: np.ndarray
    gain_norm: np.ndarray
    states: np.ndarray
    records: list[UtcStepRecord]
    dt: float

    @property
    def n_steps(self) -> int:
        return self.t.shape[0]


def n_loop_steps(duration: float, dt: float) -> int:
    return int(math.floor(duration / dt)) + 1


def run_closed_loop(
    plant: PlantModel,
    ref,
    cfg: UtcConfig,
    duration: float,
    belief0: ControlBelief | None = None,
    x0: np.ndarray | None = None,
) -> ClosedLoopResult:
    """Run the controller against the true plant for `duration` seconds.

    Row k of every trace array describes the plant state at t = k*dt and the
    command computed there (applied over the following dt).
    """
    if duration <= 0.0:
        raise ConfigError("duration must be positive")
    if belief0 is None:
        if cfg.pattern_index == 3:
            belief0 = initial_belief()
        else:
            raise ConfigError("belief0 is required for plants without the 4-channel layout")
    belief = belief0
    x = np.array(plant.initial_state() if x0 is None else x0, dtype=float)
    hyst = HysteresisState(-1.0, cfg.resolved_k_hyst())
    prev_cmd = clamp(belief.mean, cfg.bounds)

    n = n_loop_steps(duration, cfg.dt)
    m = belief.dim
    out = ClosedLoopResult(
        t=np.arange(n) * cfg.dt,
        yr_ref=np.empty(n),
        yr_real=np.empty(n),
        u_cmd=np.empty((n, m)),
        y_pred=np.empty(n),
        pu_trace=np.empty(n),
        gain_norm=np.empty(n),
        states=np.empty((n, x.shape[0])),
        records=[],
        dt=cfg.dt,
    )
    for k in range(n):
        out.yr_ref[k] = ref.value(k * cfg.dt)
        out.yr_real[k] = float(plant.output(x)[0])
        out.states[k] = x
        belief, u_cmd, rec = utc_step(belief, x, plant, ref, k, cfg, hyst, prev_cmd)
        prev_cmd = u_cmd
        out.u_cmd[k] = u_cmd
        out.y_pred[k] = float(rec.y_pred[0])
        out.pu_trace[k] = rec.pu_trace
        out.gain_norm[k] = float(np.linalg.norm(rec.gain))
        out.records.append(rec)
        x = plant.step(x, u_cmd, cfg.dt)
    return out
