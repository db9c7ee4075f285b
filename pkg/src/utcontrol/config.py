"""Flat key=value scenario configuration.

Format: one `section.key = value` per line, `#` comments, blank lines ignored.
Values are scalars, bare words, or comma-separated float lists; `inf` is
accepted where a rate limit should be absent.  Chosen over a structured format
for diffability and zero-dependency parsing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constraints import ControlBounds, turn_control_bounds
from .core import DEFAULT_DT, DEFAULT_HORIZON, UtcConfig
from .errors import ConfigError
from .estimator import default_estimation_steps
from .noise import NoiseCouplingPolicy, initial_belief, noise_base
from .plants import ControlDynamicsPolicy, LinearPlant, PlantModel, SurrogateYawPlant
from .references import ConstantReference, SineReference, StepReference
from .ut_math import ControlBelief, psd_repair

FULL_TURN_AMPLITUDE = 400.0 * math.pi / 180.0  # rad/s

_FLOAT = "float"
_INT = "int"
_WORD = "word"
_LIST = "list"

# key -> (type, allowed words or None)
KNOWN_KEYS: dict[str, tuple[str, tuple[str, ...] | None]] = {
    "scenario.name": (_WORD, None),
    "scenario.controller": (_WORD, ("utc", "baseline_pose")),
    "scenario.duration": (_FLOAT, None),
    "plant.kind": (_WORD, ("surrogate_yaw", "linear")),
    "plant.inertia": (_FLOAT, None),
    "plant.pattern_gain": (_FLOAT, None),
    "plant.damping_gain": (_FLOAT, None),
    "plant.roll_tau": (_FLOAT, None),
    "plant.lever": (_FLOAT, None),
    "plant.lx_hand": (_FLOAT, None),
    "plant.k_n": (_FLOAT, None),
    "plant.pattern_limit": (_FLOAT, None),
    "plant.pattern_slew": (_FLOAT, None),
    "plant.a": (_FLOAT, None),
    "plant.b": (_FLOAT, None),
    "plant.x0": (_LIST, None),
    "reference.kind": (_WORD, ("sine", "constant", "step")),
    "reference.amplitude": (_FLOAT, None),
    "reference.frequency": (_FLOAT, None),
    "reference.offset": (_FLOAT, None),
    "utc.w0": (_FLOAT, None),
    "utc.dt": (_FLOAT, None),
    "utc.t_pred_steps": (_INT, None),
    "utc.p_err": (_FLOAT, None),
    "utc.policy": (_WORD, ("hold_constant", "pi_feedforward")),
    "utc.kp": (_FLOAT, None),
    "utc.kff": (_FLOAT, None),
    "utc.tau": (_FLOAT, None),
    "noise.kind": (_WORD, ("none", "reference_sign", "reference_derivative_sign")),
    "noise.q12": (_FLOAT, None),
    "noise.q13": (_FLOAT, None),
    "noise.k_hyst": (_INT, None),
    "qu.scale": (_FLOAT, None),
    "qu.diag": (_LIST, None),
    "bounds.min": (_LIST, None),
    "bounds.max": (_LIST, None),
    "bounds.slew_rate": (_LIST, None),
    "belief.mean": (_LIST, None),
    "belief.cov_diag": (_LIST, None),
    "belief.cov": (_LIST, None),
    "estimate.t_pred_steps": (_INT, None),
    "assert.rms_error_max": (_FLOAT, None),
    "assert.max_abs_error_max": (_FLOAT, None),
    "assert.convergence_time_max": (_FLOAT, None),
}


def parse_flat_config(text: str, source: str = "<config>") -> dict[str, object]:
    """Parse and type-check the flat key=value format against the known-key table."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown config key: {key}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate config key: {key}")
        kind, words = KNOWN_KEYS[key]
        try:
            if kind == _FLOAT:
                values[key] = float(value)
            elif kind == _INT:
                values[key] = int(value)
            elif kind == _LIST:
                values[key] = [float(v.strip()) for v in value.split(",") if v.strip()]
            else:
                word = value.lower()
                if words is not None and word not in words:
                    raise ConfigError(
                        f"{source}:{lineno}: {key} must be one of {words}, got {value!r}"
                    )
                values[key] = word if words is not None else value
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


@dataclass
class Scenario:
    """A fully resolved run description: plant, reference, controller settings, outputs."""

    name: str
    controller: str
    duration: float
    plant_kind: str
    plant_params: dict[str, float]
    x0: np.ndarray | None
    reference_kind: str
    reference_amplitude: float
    reference_frequency: float
    reference_offset: float
    utc: UtcConfig
    belief0: ControlBelief
    estimate_t_pred_steps: int
    assert_limits: dict[str, float] = field(default_factory=dict)

    def build_plant(self) -> PlantModel:
        if self.plant_kind == "surrogate_yaw":
            return SurrogateYawPlant(**self.plant_params)
        return LinearPlant(**self.plant_params)

    def build_reference(self):
        if self.reference_kind == "sine":
            return SineReference(self.reference_amplitude, self.reference_frequency,
                                 self.reference_offset)
        if self.reference_kind == "constant":
            return ConstantReference(self.reference_amplitude)
        return StepReference(self.reference_amplitude, self.reference_offset)

    def estimation_config(self) -> UtcConfig:
        """Controller config rewired for input estimation (hold over a longer horizon)."""
        return UtcConfig(
            w0=self.utc.w0,
            t_pred_steps=self.estimate_t_pred_steps,
            dt=self.utc.dt,
            p_err=self.utc.p_err,
            bounds=self.utc.bounds,
            policy=ControlDynamicsPolicy("hold_constant"),
            noise=self.utc.noise,
            qu_base=self.utc.qu_base,
            pattern_index=self.utc.pattern_index,
            k_hyst=self.utc.k_hyst,
        )


def _surrogate_params(v: dict[str, object]) -> dict[str, float]:
    mapping = {
        "plant.inertia": "inertia",
        "plant.pattern_gain": "pattern_gain",
        "plant.damping_gain": "damping_gain",
        "plant.roll_tau": "roll_tau",
        "plant.lever": "lever",
        "plant.lx_hand": "lx_hand",
        "plant.k_n": "k_n",
        "plant.pattern_limit": "pattern_limit",
        "plant.pattern_slew": "pattern_slew",
    }
    return {attr: float(v[key]) for key, attr in mapping.items() if key in v}


def build_scenario(values: dict[str, object], default_name: str = "scenario") -> Scenario:
    """Resolve raw key/values into a Scenario, applying defaults and validation."""
    plant_kind = str(values.get("plant.kind", "surrogate_yaw"))
    controller = str(values.get("scenario.controller", "utc"))
    duration = float(values.get("scenario.duration", 30.0))
    if duration <= 0.0:
        raise ConfigError("scenario.duration must be positive")

    if plant_kind == "surrogate_yaw":
        plant_params = _surrogate_params(values)
        for key in ("plant.a", "plant.b"):
            if key in values:
                raise ConfigError(f"{key} only applies to the linear plant")
        m = 4
    else:
        plant_params = {}
        if "plant.a" in values:
            plant_params["a"] = float(values["plant.a"])
        if "plant.b" in values:
            plant_params["b"] = float(values["plant.b"])
        for key in values:
            if key.startswith("plant.") and key not in ("plant.kind", "plant.a", "plant.b", "plant.x0"):
                raise ConfigError(f"{key} only applies to the surrogate plant")
        m = 1

    x0 = np.asarray(values["plant.x0"], dtype=float) if "plant.x0" in values else None

    ref_kind = str(values.get("reference.kind", "sine"))
    ref_amp = float(values.get("reference.amplitude", FULL_TURN_AMPLITUDE))
    ref_freq = float(values.get("reference.frequency", 0.2))
    ref_offset = float(values.get("reference.offset", 0.0))

    dt = float(values.get("utc.dt", DEFAULT_DT))
    policy_kind = str(values.get("utc.policy", "hold_constant"))
    policy = ControlDynamicsPolicy(
        kind=policy_kind,
        kp=float(values.get("utc.kp", 1.5)),
        kff=float(values.get("utc.kff", 0.1)),
        tau=float(values["utc.tau"]) if "utc.tau" in values else None,
    )
    if policy_kind == "pi_feedforward" and m != 4:
        raise ConfigError("utc.policy = pi_feedforward requires the surrogate plant layout")
    t_pred_steps = int(values.get("utc.t_pred_steps", DEFAULT_HORIZON[policy_kind]))

    noise = NoiseCouplingPolicy(
        kind=str(values.get("noise.kind", "none")),
        q12=float(values.get("noise.q12", 0.074)),
        q13=float(values.get("noise.q13", 0.074)),
    )
    if noise.kind != "none" and m != 4:
        raise ConfigError("noise coupling schedules require the surrogate plant layout")

    # bounds
    if "bounds.min" in values or "bounds.max" in values:
        if not ("bounds.min" in values and "bounds.max" in values):
            raise ConfigError("bounds.min and bounds.max must be given together")
        slew = values.get("bounds.slew_rate")
        bounds = ControlBounds(values["bounds.min"], values["bounds.max"],
                               np.asarray(slew, dtype=float) if slew is not None else None)
    elif m == 4:
        bounds = turn_control_bounds()
    else:
        bounds = ControlBounds([-10.0], [10.0], None)
    if bounds.dim != m:
        raise ConfigError(f"bounds have {bounds.dim} elements but the control vector has {m}")

    # initial belief
    if "belief.mean" in values or "belief.cov_diag" in values or "belief.cov" in values:
        if "belief.mean" not in values:
            raise ConfigError("belief.mean is required when overriding the initial belief")
        mean = np.asarray(values["belief.mean"], dtype=float)
        if "belief.cov" in values:
            cov_flat = np.asarray(values["belief.cov"], dtype=float)
            if cov_flat.size != mean.size * mean.size:
                raise ConfigError("belief.cov must have m*m entries (row-major)")
            cov = cov_flat.reshape(mean.size, mean.size)
        elif "belief.cov_diag" in values:
            cov = np.diag(np.asarray(values["belief.cov_diag"], dtype=float))
        else:
            raise ConfigError("belief.cov or belief.cov_diag is required with belief.mean")
        belief0 = ControlBelief(mean, psd_repair(cov))
    elif m == 4:
        belief0 = initial_belief()
    else:
        belief0 = ControlBelief(np.zeros(1), np.eye(1))
    if belief0.dim != m:
        raise ConfigError(f"belief has {belief0.dim} elements but the control vector has {m}")

    # process noise base
    qu_scale = float(values.get("qu.scale", 0.1))
    if qu_scale < 0.0:
        raise ConfigError("qu.scale must be >= 0")
    if m == 4:
        qu_base = noise_base(qu_scale)
    else:
        qu_base = belief0.cov * qu_scale
    if "qu.diag" in values:
        diag = np.asarray(values["qu.diag"], dtype=float)
        if diag.size != m:
            raise ConfigError(f"qu.diag must have {m} entries")
        if np.any(diag < 0.0):
            raise ConfigError("qu.diag entries must be >= 0")
        qu_base = np.array(qu_base)
        qu_base[np.arange(m), np.arange(m)] = diag
    if m != 4:
        qu_base = psd_repair(qu_base)

    utc = UtcConfig(
        w0=float(values.get("utc.w0", 0.25)),
        t_pred_steps=t_pred_steps,
        dt=dt,
        p_err=np.array([[float(values.get("utc.p_err", 1e-4))]]),
        bounds=bounds,
        policy=policy,
        noise=noise,
        qu_base=qu_base,
        pattern_index=3 if m == 4 else None,
        k_hyst=int(values["noise.k_hyst"]) if "noise.k_hyst" in values else None,
    )

    assert_limits = {
        key.split(".", 1)[1]: float(values[key])
        for key in ("assert.rms_error_max", "assert.max_abs_error_max", "assert.convergence_time_max")
        if key in values
    }

    return Scenario(
        name=str(values.get("scenario.name", default_name)),
        controller=controller,
        duration=duration,
        plant_kind=plant_kind,
        plant_params=plant_params,
        x0=x0,
        reference_kind=ref_kind,
        reference_amplitude=ref_amp,
        reference_frequency=ref_freq,
        reference_offset=ref_offset,
        utc=utc,
        belief0=belief0,
        estimate_t_pred_steps=int(values.get("estimate.t_pred_steps", default_estimation_steps(dt))),
        assert_limits=assert_limits,
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values = parse_flat_config(text, source=str(path))
    return build_scenario(values, default_name=path.stem)
