"""utcontrol: a sigma-point predictive tracking controller with a dual input-estimation mode.

The controller spreads deterministic samples over a belief about the control
vector, lets each sample drive a plant-model copy to a short horizon, and
updates the belief with a Kalman-style gain against the future reference.
The same machinery, pointed at a recorded output instead of a reference,
estimates the inputs that explain a measured trajectory.
"""

from ._backend import available_backends, backend_name, set_backend
from .constraints import ControlBounds, clamp, reflect_collapsed, slew_limit, turn_control_bounds
from .core import (
    ClosedLoopResult,
    UtcConfig,
    UtcStepRecord,
    propagate_sigma_point,
    run_closed_loop,
    utc_step,
)
from .config import Scenario, build_scenario, load_scenario, parse_flat_config
from .errors import (
    ConfigError,
    ContractViolationError,
    IndefiniteMatrixError,
    InvalidWeightError,
    NumericalFailureError,
    TrajectoryTooShortError,
)
from .estimator import RecordedTrajectory, estimate_inputs, replay_trajectory
from .harness import (
    baseline_pose_controller,
    compare_scenarios,
    run_baseline_loop,
    run_scenario,
)
from .metrics import MetricsReport, compute_metrics
from .noise import (
    HysteresisState,
    NoiseCouplingPolicy,
    build_qu,
    coupling_matrix,
    initial_belief,
    initial_covariance,
    noise_base,
    s14_schedule,
)
from .plants import (
    ControlDynamicsPolicy,
    LinearPlant,
    PlantModel,
    SurrogateYawPlant,
    embedded_control_step,
    hand_moments,
)
from .references import (
    ConstantReference,
    SampledReference,
    SineReference,
    StepReference,
    sine_reference,
)
from .ut_math import (
    ControlBelief,
    SigmaPointSet,
    generate_sigma_points,
    matrix_sqrt,
    psd_repair,
    weighted_covariance,
    weighted_mean,
)

__version__ = "0.1.0"

__all__ = [
    "available_backends", "backend_name", "set_backend",
    "ControlBounds", "clamp", "reflect_collapsed", "slew_limit", "turn_control_bounds",
    "ClosedLoopResult", "UtcConfig", "UtcStepRecord",
    "propagate_sigma_point", "run_closed_loop", "utc_step",
    "Scenario", "build_scenario", "load_scenario", "parse_flat_config",
    "ConfigError", "ContractViolationError", "IndefiniteMatrixError",
    "InvalidWeightError", "NumericalFailureError", "TrajectoryTooShortError",
    "RecordedTrajectory", "estimate_inputs", "replay_trajectory",
    "baseline_pose_controller", "compare_scenarios", "run_baseline_loop", "run_scenario",
    "MetricsReport", "compute_metrics",
    "HysteresisState", "NoiseCouplingPolicy", "build_qu", "coupling_matrix",
    "initial_belief", "initial_covariance", "noise_base", "s14_schedule",
    "ControlDynamicsPolicy", "LinearPlant", "PlantModel", "SurrogateYawPlant",
    "embedded_control_step", "hand_moments",
    "ConstantReference", "SampledReference", "SineReference", "StepReference",
    "sine_reference",
    "ControlBelief", "SigmaPointSet", "generate_sigma_points", "matrix_sqrt",
    "psd_repair", "weighted_covariance", "weighted_mean",
    "__version__",
]
