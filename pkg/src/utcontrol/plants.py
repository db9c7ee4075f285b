"""Plant-model contract and the bundled implementations.

Plants are stateless parameter holders: `step` maps (state, control, dt) to the
next state, so cloning a trajectory just means copying the state vector.
Sigma-point propagation exploits this by stepping independent copies.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

from .constraints import slew_limit
from .errors import ConfigError

POLICY_KINDS = ("hold_constant", "pi_feedforward")
POLICY_HOLD = 0
POLICY_PI_FF = 1


class PlantModel(abc.ABC):
    """Deterministic dynamic system driven by a control vector.

    step must be a pure function of (state, control, dt); output a pure
    function of state.  Implementations may additionally report which state
    element carries the actuated pattern angle via pattern_angle().
    """

    @abc.abstractmethod
    def state_dim(self) -> int: ...

    @abc.abstractmethod
    def step(self, x: np.ndarray, u: np.ndarray, dt: float) -> np.ndarray: ...

    @abc.abstractmethod
    def output(self, x: np.ndarray) -> np.ndarray: ...

    def initial_state(self) -> np.ndarray:
        return np.zeros(self.state_dim())

    def pattern_angle(self, x: np.ndarray) -> float | None:
        """Current actuated pattern angle, if this plant has one."""
        return None


@dataclass
class LinearPlant(PlantModel):
    """First-order scalar test plant: dx/dt = -a x + b u, output x.

    Steady state under constant u is (b/a) u; with the defaults the plant
    settles at the commanded value with time constant 1/a = 0.5 s.
    """

    a: float = 2.0
    b: float = 2.0

    def state_dim(self) -> int:
        return 1

    def step(self, x, u, dt):
        xv = float(x[0])
        uv = float(u[0])
        return np.array([xv + dt * (-self.a * xv + self.b * uv)])

    def output(self, x):
        return np.array([float(x[0])])


def hand_moments(k_right: float, k_left: float, k_n: float = 100.0,
                 lx_hand: float = 0.35) -> tuple[float, float]:
    """Roll moment (N*m) and sagittal force (N) from the hand pressure coefficients."""
    mz = k_n * lx_hand * (k_right - k_left)
    fy = -k_n * (k_right + k_left)
    return mz, fy


@dataclass
class SurrogateYawPlant(PlantModel):
    """Three-state yaw-dynamics stand-in for the full free-fall body model.

    State: [yaw rate omega (rad/s), roll angle phi (rad), actuated pattern
    angle (rad)].  Control: [yaw damping coefficient, right hand, left hand,
    commanded pattern angle].

    The pattern angle slews toward its command at pattern_slew and saturates
    at +/- pattern_limit.  Differential hand pressure rolls the body through
    a first-order lag; the rolled body converts the sagittal hand force into
    yaw moment (lever * phi * fy).  Constants are sized so the fast-turn
    reference is reachable only when the damping coefficient is modulated:
    at full pattern deflection and mid damping the yaw rate tops out well
    below the reference peaks.
    """

    inertia: float = 12.0        # kg m^2
    pattern_gain: float = 40.0   # N m per rad of pattern angle
    damping_gain: float = 8.0    # N m s/rad, multiplied by the damping coefficient
    roll_tau: float = 0.4        # s, roll-angle lag
    lever: float = 0.4           # m, roll-to-yaw conversion lever
    lx_hand: float = 0.35        # m, hand offset from the roll axis
    k_n: float = 100.0           # N, hand pressure scaling
    pattern_limit: float = 1.5   # rad
    pattern_slew: float = 3.5    # rad/s

    def __post_init__(self):
        for name in ("inertia", "pattern_gain", "damping_gain", "roll_tau",
                     "lever", "lx_hand", "k_n", "pattern_limit", "pattern_slew"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"surrogate plant constant {name} must be positive")

    def state_dim(self) -> int:
        return 3

    def pattern_angle(self, x) -> float:
        return float(x[2])

    def step(self, x, u, dt):
        omega = float(x[0])
        phi = float(x[1])
        pat = float(x[2])
        u0 = float(u[0])
        u1 = float(u[1])
        u2 = float(u[2])
        u3 = float(u[3])
        lim = self.pattern_slew * dt
        d = u3 - pat
        if d > lim:
            d = lim
        elif d < -lim:
            d = -lim
        pat = pat + d
        if pat > self.pattern_limit:
            pat = self.pattern_limit
        elif pat < -self.pattern_limit:
            pat = -self.pattern_limit
        mz = self.k_n * self.lx_hand * (u1 - u2)
        fy = -self.k_n * (u1 + u2)
        new_phi = phi + dt * (self.lever * mz / self.k_n - phi) / self.roll_tau
        new_omega = omega + dt * (
            self.pattern_gain * pat + self.lever * phi * fy - self.damping_gain * u0 * omega
        ) / self.inertia
        return np.array([new_omega, new_phi, pat])

    def output(self, x):
        return np.array([float(x[0])])


@dataclass
class ControlDynamicsPolicy:
    """Assumed control-signal dynamics applied while sigma points drive the plant.

    hold_constant keeps every channel fixed over the horizon (the pattern
    command still slews toward its sampled value).  pi_feedforward rolls the
    pattern command forward with incremental proportional-plus-feedforward
    updates against the reference, each sigma point closing its own loop on
    its plant copy's yaw rate.  tau is the feed-forward look-ahead; None
    means "use the prediction horizon".
    """

    kind: str = "hold_constant"
    kp: float = 1.5
    kff: float = 0.1
    tau: float | None = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"unknown control dynamics kind: {self.kind!r}")
        if self.kp < 0.0 or self.kff < 0.0:
            raise ConfigError("policy gains must be >= 0")
        if self.tau is not None and self.tau < 0.0:
            raise ConfigError("feed-forward look-ahead must be >= 0")

    @property
    def code(self) -> int:
        return POLICY_HOLD if self.kind == "hold_constant" else POLICY_PI_FF


def embedded_control_step(
    policy: ControlDynamicsPolicy,
    ui: np.ndarray,
    alpha_prev: float,
    t: float,
    ref,
    y_now: float,
    y_prev: float,
    dt: float,
    tau: float,
    slew: float = 3.5,
    limit: float = 1.5,
) -> float:
    """One pattern-command update inside the prediction window.

    y_now / y_prev are the two most recent plant outputs of the trajectory
    being rolled out (equal on the first step, where no earlier output
    exists).  The result is slew-limited from alpha_prev and clamped.
    """
    lim = slew * dt
    if policy.code == POLICY_HOLD:
        cmd = slew_limit(alpha_prev, float(ui[3]), slew, dt)
    else:
        inc = (
            policy.kp * (ref.value(t) - ref.value(t - dt))
            - policy.kp * (y_now - y_prev)
            + policy.kff * (ref.value(t + tau) - ref.value(t + tau - dt))
        )
        if inc > lim:
            inc = lim
        elif inc < -lim:
            inc = -lim
        cmd = alpha_prev + inc
    if cmd > limit:
        cmd = limit
    elif cmd < -limit:
        cmd = -limit
    return cmd
