"""Covariance-aware primitives: sigma points, weighted moments, matrix square root, PSD repair.

All operations are pure functions of their inputs and safe to call concurrently.
Matrices are small (m <= ~16) dense symmetric arrays; nothing here is tuned for
large or sparse problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, IndefiniteMatrixError, InvalidWeightError

_EIG_FLOOR = 1e-12
_NEG_EIG_TOL = -1e-10


def _as_square(p, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ContractViolationError(f"{name} must be a square matrix, got shape {p.shape}")
    return p


def _check_symmetric(p: np.ndarray, name: str, tol: float = 1e-8) -> None:
    scale = 1.0 + float(np.max(np.abs(p))) if p.size else 1.0
    if float(np.max(np.abs(p - p.T))) > tol * scale:
        raise ContractViolationError(f"{name} is not symmetric")


@dataclass
class ControlBelief:
    """Mean control vector and its covariance, the controller's evolving state.

    The covariance plays the role a state-estimate covariance plays in a filter:
    it encodes how far the sigma points spread around the current command.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float).reshape(-1)
        self.cov = _as_square(self.cov, "belief covariance")
        if self.mean.shape[0] != self.cov.shape[0]:
            raise ContractViolationError(
                f"mean length {self.mean.shape[0]} != covariance dimension {self.cov.shape[0]}"
            )
        _check_symmetric(self.cov, "belief covariance")
        self.cov = 0.5 * (self.cov + self.cov.T)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass
class SigmaPointSet:
    """2m+1 deterministic control-vector samples with their weights."""

    points: np.ndarray   # (2m+1, m)
    weights: np.ndarray  # (2m+1,)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if self.points.ndim != 2:
            raise ContractViolationError("sigma points must form a 2-D array")
        if self.points.shape[0] != self.weights.shape[0]:
            raise ContractViolationError("point count does not match weight count")

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def center_weight(self) -> float:
        return float(self.weights[0])


def matrix_sqrt(p) -> np.ndarray:
    """Lower-triangular factor L with L @ L.T == P.

    Plain Cholesky when P is positive definite.  For semidefinite input
    (eigenvalues down to -1e-10, which are clipped to zero) an
    eigendecomposition + QR route produces an equivalent triangular factor.
    """
    p = _as_square(p, "matrix_sqrt input")
    _check_symmetric(p, "matrix_sqrt input")
    try:
        return np.linalg.cholesky(p)
    except np.linalg.LinAlgError:
        pass
    vals, vecs = np.linalg.eigh(0.5 * (p + p.T))
    if float(vals[0]) < _NEG_EIG_TOL:
        raise IndefiniteMatrixError(
            f"matrix has eigenvalue {vals[0]:.3e} below the {_NEG_EIG_TOL:g} tolerance"
        )
    vals = np.maximum(vals, 0.0)
    a = vecs * np.sqrt(vals)
    _, r = np.linalg.qr(a.T)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return (r * signs[:, None]).T


def generate_sigma_points(belief: ControlBelief, w0: float = 0.25) -> SigmaPointSet:
    """Spread 2m+1 points along the covariance square-root columns.

    Point 0 is the mean with weight w0; points j and j+m are
    mean +/- sqrt(m / (1 - w0)) * S[:, j] with equal weights (1 - w0) / (2m).
    """
    if not 0.0 <= w0 < 1.0:
        raise InvalidWeightError(f"center weight must lie in [0, 1), got {w0}")
    m = belief.dim
    s = matrix_sqrt(belief.cov)
    gamma = math.sqrt(m / (1.0 - w0))
    points = np.empty((2 * m + 1, m))
    points[0] = belief.mean
    for j in range(m):
        col = gamma * s[:, j]
        points[1 + j] = belief.mean + col
        points[1 + m + j] = belief.mean - col
    weights = np.full(2 * m + 1, (1.0 - w0) / (2 * m))
    weights[0] = w0
    return SigmaPointSet(points, weights)


def weighted_mean(sigma_set: SigmaPointSet, values) -> np.ndarray:
    """Weighted sum of per-point values (vectors or scalars)."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] != sigma_set.n_points:
        raise ContractViolationError(
            f"got {values.shape[0]} values for {sigma_set.n_points} sigma points"
        )
    return sigma_set.weights @ values


def weighted_covariance(sigma_set: SigmaPointSet, mean, noise_cov) -> np.ndarray:
    """Weighted outer-product spread of the set's points about `mean`, plus `noise_cov`.

    Symmetrized before return.
    """
    mean = np.asarray(mean, dtype=float).reshape(-1)
    noise_cov = _as_square(noise_cov, "noise covariance")
    if mean.shape[0] != sigma_set.dim or noise_cov.shape[0] != sigma_set.dim:
        raise ContractViolationError("dimension mismatch in weighted_covariance")
    dev = sigma_set.points - mean
    cov = noise_cov + (dev.T * sigma_set.weights) @ dev
    return 0.5 * (cov + cov.T)


def psd_repair_with_min_eig(p) -> tuple[np.ndarray, float]:
    """psd_repair plus the pre-repair minimum eigenvalue.

    The controller records that eigenvalue every step; returning it here
    avoids a second decomposition of the same matrix.
    """
    p = _as_square(p, "psd_repair input")
    sym = 0.5 * (p + p.T)
    vals, vecs = np.linalg.eigh(sym)
    lowest = float(vals[0])
    if lowest >= _EIG_FLOOR:
        return sym, lowest
    vals = np.maximum(vals, _EIG_FLOOR)
    rebuilt = (vecs * vals) @ vecs.T
    return 0.5 * (rebuilt + rebuilt.T), lowest


def psd_repair(p) -> np.ndarray:
    """Project an approximately-symmetric matrix onto the PSD cone.

    Symmetrize, eigendecompose, floor eigenvalues at 1e-12, rebuild.  Keeps
    the covariance factorizable after the gain downdate loses definiteness
    to floating-point error (or after sign substitution in the noise model).
    """
    return psd_repair_with_min_eig(p)[0]
