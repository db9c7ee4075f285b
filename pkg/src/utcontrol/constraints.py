"""Actuation box bounds, slew-rate limiting, and the boundary-reflection rule for sigma points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError

# Tolerance for "mean sits exactly on a bound"; exact float equality is
# fragile after clamping.
_ON_BOUND_TOL = 1e-9


@dataclass
class ControlBounds:
    """Per-element min/max box plus optional per-element slew-rate limits.

    slew_rate entries are in units of the element per second; use np.inf for
    rate-unconstrained elements, or None for no slew limiting at all.
    """

    min: np.ndarray
    max: np.ndarray
    slew_rate: np.ndarray | None = None

    def __post_init__(self):
        self.min = np.asarray(self.min, dtype=float).reshape(-1)
        self.max = np.asarray(self.max, dtype=float).reshape(-1)
        if self.min.shape != self.max.shape:
            raise ContractViolationError("bound vectors differ in length")
        if not np.all(self.min < self.max):
            raise ContractViolationError("each min bound must be strictly below its max")
        if self.slew_rate is not None:
            self.slew_rate = np.asarray(self.slew_rate, dtype=float).reshape(-1)
            if self.slew_rate.shape != self.min.shape:
                raise ContractViolationError("slew_rate length does not match bounds")
            if not np.all(self.slew_rate > 0.0):
                raise ContractViolationError("slew_rate entries must be positive (np.inf allowed)")

    @property
    def dim(self) -> int:
        return self.min.shape[0]


def turn_control_bounds() -> ControlBounds:
    """Default box for the 4-channel turn-maneuver control vector.

    Channels: yaw damping coefficient, right/left hand coefficients, pattern
    angle.  Only the pattern angle carries a slew limit (3.5 rad/s).
    """
    return ControlBounds(
        min=[0.01, 0.0, 0.0, -1.5],
        max=[6.0, 5.0, 5.0, 1.5],
        slew_rate=[np.inf, np.inf, np.inf, 3.5],
    )


def clamp(u, bounds: ControlBounds) -> np.ndarray:
    """Elementwise clamp into [min, max]."""
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape[0] != bounds.dim:
        raise ContractViolationError("control vector length does not match bounds")
    return np.clip(u, bounds.min, bounds.max)


def reflect_collapsed(ui, mean, bounds: ControlBounds) -> np.ndarray:
    """Move a sigma point off a saturated boundary so points stay distinct.

    For each element j where the (already clamped) mean sits on a bound and
    ui[j] violates that same bound, replace ui[j] with
    1.5 * mean[j] - 0.5 * ui[j] and clamp the replacement into the box.
    Elements whose trigger condition is not met are returned untouched, even
    if they lie outside the box (the caller clamps afterwards).
    """
    ui = np.array(ui, dtype=float).reshape(-1)
    mean = np.asarray(mean, dtype=float).reshape(-1)
    for j in range(bounds.dim):
        on_min = mean[j] <= bounds.min[j] + _ON_BOUND_TOL
        on_max = mean[j] >= bounds.max[j] - _ON_BOUND_TOL
        if (on_min and ui[j] < bounds.min[j]) or (on_max and ui[j] > bounds.max[j]):
            reflected = 1.5 * mean[j] - 0.5 * ui[j]
            ui[j] = min(max(reflected, bounds.min[j]), bounds.max[j])
    return ui


def slew_limit(prev: float, cmd: float, rate: float, dt: float) -> float:
    """Limit the step from prev toward cmd to at most rate * dt."""
    bound = rate * dt
    delta = cmd - prev
    if delta > bound:
        delta = bound
    elif delta < -bound:
        delta = -bound
    return prev + delta
