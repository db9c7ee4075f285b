"""Time-varying process-noise covariance with sign-coupling policies and the hysteresis schedule.

The off-diagonal signs of the per-step noise covariance encode the expected
coupling between the damping coefficient and the other control channels:
which hand should press harder while the damping drops, and when the damping
should rise again ahead of a commanded slow-down.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractViolationError
from .ut_math import ControlBelief, psd_repair

NOISE_KINDS = ("none", "reference_sign", "reference_derivative_sign")

# Channel indices of the 4-element turn control vector.
DAMPING = 0
HAND_RIGHT = 1
HAND_LEFT = 2
PATTERN = 3


@dataclass
class NoiseCouplingPolicy:
    """How the damping/hand off-diagonal noise terms get their signs.

    kind "none" zeroes them; "reference_sign" gives the two hands opposite
    signs following the sign of the reference; "reference_derivative_sign"
    gives both the sign of the reference's time derivative.  q12 and q13 are
    the coupling magnitudes (tuning parameters, often taken equal).
    """

    kind: str = "none"
    q12: float = 0.074
    q13: float = 0.074

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigError(f"unknown noise coupling kind: {self.kind!r}")
        if not (np.isfinite(self.q12) and np.isfinite(self.q13)):
            raise ConfigError("coupling magnitudes must be finite")
        if self.q12 < 0.0 or self.q13 < 0.0:
            raise ConfigError("coupling magnitudes must be >= 0")


@dataclass
class HysteresisState:
    """Sign of the damping/pattern coupling plus the look-ahead length in steps."""

    s14: float = -1.0
    k_hyst: int = 238  # about 1 s at dt = 0.0042

    def __post_init__(self):
        if self.s14 not in (-1.0, 1.0, -1, 1):
            raise ContractViolationError("s14 must be -1 or +1")
        self.s14 = float(self.s14)
        if self.k_hyst < 1:
            raise ContractViolationError("k_hyst must be a positive step count")


def default_k_hyst(dt: float) -> int:
    """Look-ahead of about one second, in steps."""
    return max(1, round(1.0 / dt))


def _sign(x: float) -> float:
    # sign(0) resolves to +1 so the schedule output is never 0
    return 1.0 if x >= 0.0 else -1.0


def initial_mean() -> np.ndarray:
    """Starting control command: mid damping, idle hands, neutral pattern."""
    return np.array([0.5, 0.0, 0.0, 0.0])


def initial_covariance(s12: float = 1.0, s13: float = 1.0, s14: float = -1.0) -> np.ndarray:
    """Literal initial covariance structure with explicit off-diagonal signs.

    Note this matrix is indefinite for every sign choice (the off-diagonal
    magnitudes exceed what the tiny hand/pattern variances allow), so it is
    a spread/coupling prescription rather than a true covariance; callers
    that need a factorizable matrix must psd_repair it first.
    """
    return np.array(
        [
            [6.25, s12 * 0.74, s13 * 0.74, s14 * 0.56],
            [s12 * 0.74, 0.01, 0.0, 0.0],
            [s13 * 0.74, 0.0, 0.01, 0.0],
            [s14 * 0.56, 0.0, 0.0, 0.01],
        ]
    )


def initial_belief() -> ControlBelief:
    """Starting belief: initial mean plus the PSD-repaired initial covariance.

    The literal covariance is indefinite (min eigenvalue about -0.21), so the
    repair is mandatory before any square root is taken; entries shift by up
    to ~0.08 relative to the literal structure.
    """
    return ControlBelief(initial_mean(), psd_repair(initial_covariance()))


def noise_base(scale: float = 0.1) -> np.ndarray:
    """Magnitude structure for the per-step noise: `scale` times the initial covariance."""
    return np.abs(initial_covariance(1.0, 1.0, 1.0)) * scale


def s14_schedule(k: int, ref, state: HysteresisState, dt: float) -> float:
    """Advance the damping/pattern coupling sign at step k.

    While the previous sign was positive the immediate reference-magnitude
    slope decides; otherwise the slope one look-ahead window out decides, so
    the damping starts rising about a second before the commanded turn rate
    begins to fall.  Mutates state.s14 and returns the new sign.
    """
    d_now = abs(ref.value((k + 1) * dt)) - abs(ref.value(k * dt))
    d_ahead = abs(ref.value((k + state.k_hyst + 1) * dt)) - abs(ref.value((k + state.k_hyst) * dt))
    new = -_sign(d_now) if state.s14 > 0 else -_sign(d_ahead)
    state.s14 = new
    return new


def coupling_matrix(
    k: int,
    policy: NoiseCouplingPolicy,
    s14: float,
    qu_base: np.ndarray,
    ref,
    dt: float,
) -> np.ndarray:
    """Per-step noise covariance structure before PSD repair.

    Starts from the base magnitudes, overrides the damping/hand off-diagonals
    per the coupling policy, and gives the damping/pattern term the sign s14.
    Exposed separately from build_qu because the repair necessarily shifts
    the entries of this (usually indefinite) structure.
    """
    q = np.array(qu_base, dtype=float)
    if q.shape != (4, 4):
        raise ContractViolationError("noise base must be 4x4 for the coupled schedule")
    if policy.kind == "none":
        q[DAMPING, HAND_RIGHT] = q[HAND_RIGHT, DAMPING] = 0.0
        q[DAMPING, HAND_LEFT] = q[HAND_LEFT, DAMPING] = 0.0
    elif policy.kind == "reference_sign":
        s = _sign(ref.value(k * dt))
        q[DAMPING, HAND_RIGHT] = q[HAND_RIGHT, DAMPING] = policy.q12 * s
        q[DAMPING, HAND_LEFT] = q[HAND_LEFT, DAMPING] = -policy.q13 * s
    elif policy.kind == "reference_derivative_sign":
        s = _sign(ref.derivative(k * dt))
        q[DAMPING, HAND_RIGHT] = q[HAND_RIGHT, DAMPING] = policy.q12 * s
        q[DAMPING, HAND_LEFT] = q[HAND_LEFT, DAMPING] = policy.q13 * s
    else:  # pragma: no cover - blocked by NoiseCouplingPolicy validation
        raise ConfigError(f"unknown noise coupling kind: {policy.kind!r}")
    q[DAMPING, PATTERN] = q[PATTERN, DAMPING] = s14 * abs(float(qu_base[DAMPING, PATTERN]))
    return 0.5 * (q + q.T)


def build_qu(
    k: int,
    policy: NoiseCouplingPolicy,
    s14: float,
    qu_base: np.ndarray,
    ref,
    dt: float,
) -> np.ndarray:
    """PSD-repaired per-step process-noise covariance."""
    return psd_repair(coupling_matrix(k, policy, s14, qu_base, ref, dt))
