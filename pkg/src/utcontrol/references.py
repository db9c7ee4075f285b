"""Reference-signal generators: analytic waveforms plus a recorded-sample adapter.

Every generator exposes value(t), derivative(t), and kernel_spec().  The last
returns the flat parameter tuple consumed by the propagation kernels so the
compiled and pure-Python backends evaluate the identical expressions.

Kernel kind codes: 0 constant, 1 sine, 2 step, 3 sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_TWO_PI = 2.0 * math.pi
_EMPTY = np.zeros(0)

REF_CONSTANT = 0
REF_SINE = 1
REF_STEP = 2
REF_SAMPLED = 3


def sine_reference(t: float, amp: float, freq: float) -> tuple[float, float]:
    """Sine value and its analytic derivative at time t."""
    value = amp * math.sin(_TWO_PI * freq * t)
    derivative = amp * (_TWO_PI * freq) * math.cos(_TWO_PI * freq * t)
    return value, derivative


@dataclass
class SineReference:
    amplitude: float
    frequency: float
    offset: float = 0.0

    def value(self, t: float) -> float:
        return self.amplitude * math.sin(_TWO_PI * self.frequency * t) + self.offset

    def derivative(self, t: float) -> float:
        return self.amplitude * (_TWO_PI * self.frequency) * math.cos(_TWO_PI * self.frequency * t)

    def kernel_spec(self):
        return (REF_SINE, self.amplitude, self.frequency, self.offset, _EMPTY, 1.0, 0.0)


@dataclass
class ConstantReference:
    level: float

    def value(self, t: float) -> float:
        return self.level

    def derivative(self, t: float) -> float:
        return 0.0

    def kernel_spec(self):
        return (REF_CONSTANT, self.level, 0.0, 0.0, _EMPTY, 1.0, 0.0)


@dataclass
class StepReference:
    """Zero before start_time, `amplitude` from start_time on."""

    amplitude: float
    start_time: float = 0.0

    def value(self, t: float) -> float:
        return self.amplitude if t >= self.start_time else 0.0

    def derivative(self, t: float) -> float:
        return 0.0

    def kernel_spec(self):
        return (REF_STEP, self.amplitude, 0.0, self.start_time, _EMPTY, 1.0, 0.0)


@dataclass
class SampledReference:
    """Nearest-sample lookup over a uniformly spaced recording.

    Out-of-range times clamp to the first/last sample; the derivative is a
    one-step forward difference (backward at the final sample).
    """

    samples: np.ndarray
    sample_dt: float
    t0: float = 0.0
    _n: int = field(init=False, repr=False)

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=float).reshape(-1)
        if self.samples.size == 0:
            raise ValueError("sampled reference needs at least one sample")
        if self.sample_dt <= 0.0:
            raise ValueError("sample_dt must be positive")
        self._n = self.samples.size

    def _index(self, t: float) -> int:
        i = int(math.floor((t - self.t0) / self.sample_dt + 0.5))
        if i < 0:
            return 0
        if i >= self._n:
            return self._n - 1
        return i

    def value(self, t: float) -> float:
        return float(self.samples[self._index(t)])

    def derivative(self, t: float) -> float:
        if self._n < 2:
            return 0.0
        i = self._index(t)
        if i > self._n - 2:
            i = self._n - 2
        return float((self.samples[i + 1] - self.samples[i]) / self.sample_dt)

    def kernel_spec(self):
        return (REF_SAMPLED, 0.0, 0.0, 0.0, self.samples, self.sample_dt, self.t0)
