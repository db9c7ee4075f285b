"""Input estimation: recover the control time series that explains a recorded trajectory.

Runs the identical sigma-point machinery as the controller (utc_step), with the
recorded output standing in for the reference signal and the recorded states
anchoring each propagation.  Estimating the inputs that explain a measured
trajectory and predicting the inputs that will produce a desired one are the
same computation; only the target differs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import clamp
from .core import UtcConfig, UtcStepRecord, utc_step
from .errors import ContractViolationError, TrajectoryTooShortError
from .noise import HysteresisState, initial_belief
from .plants import PlantModel
from .references import SampledReference
from .ut_math import ControlBelief

# Default estimation horizon in seconds; longer than the controller's because
# the estimate only has to explain the plant, not race it.
DEFAULT_ESTIMATION_HORIZON_S = 0.25


@dataclass
class RecordedTrajectory:
    """Uniformly sampled plant recording: times, outputs, and full states."""

    times: np.ndarray
    outputs: np.ndarray
    states: np.ndarray
    dt: float

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float).reshape(-1)
        self.outputs = np.atleast_2d(np.asarray(self.outputs, dtype=float))
        if self.outputs.shape[0] == 1 and self.times.shape[0] != 1:
            self.outputs = self.outputs.T
        self.states = np.asarray(self.states, dtype=float)
        n = self.times.shape[0]
        if self.outputs.shape[0] != n or self.states.shape[0] != n:
            raise ContractViolationError("trajectory arrays differ in length")
        if n >= 2:
            gaps = np.diff(self.times)
            if np.max(np.abs(gaps - self.dt)) > 1e-9:
                raise ContractViolationError("trajectory samples are not uniformly spaced at dt")

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]


def replay_trajectory(
    plant: PlantModel,
    inputs: np.ndarray,
    dt: float,
    x0: np.ndarray | None = None,
) -> RecordedTrajectory:
    """Open-loop replay of an input sequence, recording pre-step states and outputs."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    n = inputs.shape[0]
    x = np.array(plant.initial_state() if x0 is None else x0, dtype=float)
    states = np.empty((n, x.shape[0]))
    outputs = np.empty((n, 1))
    for k in range(n):
        states[k] = x
        outputs[k, 0] = float(plant.output(x)[0])
        x = plant.step(x, inputs[k], dt)
    return RecordedTrajectory(np.arange(n) * dt, outputs, states, dt)


def default_estimation_steps(dt: float) -> int:
    return max(1, round(DEFAULT_ESTIMATION_HORIZON_S / dt))


def estimate_inputs(
    traj: RecordedTrajectory,
    plant: PlantModel,
    cfg: UtcConfig,
    belief0: ControlBelief | None = None,
) -> tuple[np.ndarray, list[UtcStepRecord]]:
    """Estimate the input vector at every step the trajectory covers.

    The recorded output at k*dt + horizon serves as the step-k target, the
    recorded state at k*dt anchors the propagation.  Times are taken relative
    to the first sample.  Returns (estimates, per-step records); estimates
    has one row per usable step (n_samples - t_pred_steps).
    """
    if abs(traj.dt - cfg.dt) > 1e-9:
        raise ContractViolationError(
            f"trajectory dt {traj.dt} does not match configured dt {cfg.dt}"
        )
    if traj.states.shape[1] != plant.state_dim():
        raise ContractViolationError(
            f"trajectory records {traj.states.shape[1]}-dimensional states but the "
            f"plant expects {plant.state_dim()}"
        )
    n_est = traj.n_samples - cfg.t_pred_steps
    if n_est < 1:
        raise TrajectoryTooShortError(
            f"trajectory has {traj.n_samples} samples but the horizon needs "
            f"{cfg.t_pred_steps + 1} or more"
        )
    ref = SampledReference(traj.outputs[:, 0], traj.dt, t0=0.0)
    if belief0 is None:
        if cfg.pattern_index != 3:
            raise ContractViolationError("belief0 is required for non-4-channel layouts")
        belief0 = initial_belief()
    belief = belief0
    hyst = HysteresisState(-1.0, cfg.resolved_k_hyst())
    prev_cmd = clamp(belief.mean, cfg.bounds)

    estimates = np.empty((n_est, belief.dim))
    records: list[UtcStepRecord] = []
    for k in range(n_est):
        belief, u_est, rec = utc_step(belief, traj.states[k], plant, ref, k, cfg, hyst, prev_cmd)
        prev_cmd = u_est
        estimates[k] = u_est
        records.append(rec)
    return estimates, records
