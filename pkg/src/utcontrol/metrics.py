"""Tracking-quality metrics computed from a run trace."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

STEADY_WINDOW_START = 2.0     # s; transient excluded from the RMS window
CONVERGENCE_FRACTION = 0.05   # |error| must stay below this fraction of the amplitude


@dataclass
class MetricsReport:
    """Summary of one scenario run.

    rms_error and max_abs_error are taken over the steady-state window
    [window_start, end]; convergence_time is the first time after which the
    error magnitude stays below 5% of the reference amplitude (None if that
    never happens); control_effort is the per-element sum of |command change|
    times dt over the whole run.
    """

    rms_error: float
    max_abs_error: float
    convergence_time: float | None
    control_effort: np.ndarray
    wall_clock_s: float
    reference_amplitude: float
    window_start: float

    def lines(self) -> list[str]:
        conv = f"{self.convergence_time:.17g}" if self.convergence_time is not None else "did not converge"
        out = [
            f"rms_error = {self.rms_error:.17g}",
            f"max_abs_error = {self.max_abs_error:.17g}",
            f"convergence_time = {conv}",
        ]
        for j, effort in enumerate(self.control_effort):
            out.append(f"control_effort_{j} = {effort:.17g}")
        out.append(f"wall_clock_s = {self.wall_clock_s:.17g}")
        out.append(f"reference_amplitude = {self.reference_amplitude:.17g}")
        out.append(f"window_start = {self.window_start:.17g}")
        return out


def compute_metrics(
    t: np.ndarray,
    yr_ref: np.ndarray,
    yr_real: np.ndarray,
    u_cmd: np.ndarray,
    dt: float,
    wall_clock_s: float = float("nan"),
    window_start: float = STEADY_WINDOW_START,
) -> MetricsReport:
    error = yr_ref - yr_real
    window = t >= window_start
    if not np.any(window):
        window = np.ones_like(t, dtype=bool)
    amplitude = float(np.max(np.abs(yr_ref)))

    convergence_time: float | None = None
    if amplitude > 0.0:
        tol = CONVERGENCE_FRACTION * amplitude
        inside = np.abs(error) < tol
        # first index from which `inside` holds to the end
        bad = np.nonzero(~inside)[0]
        first = 0 if bad.size == 0 else int(bad[-1]) + 1
        if first < t.shape[0]:
            convergence_time = float(t[first])

    du = np.abs(np.diff(u_cmd, axis=0))
    effort = du.sum(axis=0) * dt if du.size else np.zeros(u_cmd.shape[1])

    return MetricsReport(
        rms_error=float(np.sqrt(np.mean(error[window] ** 2))),
        max_abs_error=float(np.max(np.abs(error[window]))),
        convergence_time=convergence_time,
        control_effort=effort,
        wall_clock_s=wall_clock_s,
        reference_amplitude=amplitude,
        window_start=window_start if math.isfinite(window_start) else 0.0,
    )
