"""Exception types shared across the package."""


class ContractViolationError(ValueError):
    """An argument violates an operation's documented precondition."""


class IndefiniteMatrixError(ValueError):
    """A matrix required to be positive semidefinite has a significantly negative eigenvalue."""


class InvalidWeightError(ValueError):
    """Sigma-point center weight outside [0, 1)."""


class ConfigError(Exception):
    """Bad scenario configuration (unknown key, out-of-range or inconsistent value)."""


class NumericalFailureError(RuntimeError):
    """Non-recoverable numerical breakdown inside the controller loop."""


class TrajectoryTooShortError(ValueError):
    """Recorded trajectory shorter than the estimation prediction horizon."""
