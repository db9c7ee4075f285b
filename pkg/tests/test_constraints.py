import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from utcontrol import (
    ContractViolationError,
    ControlBounds,
    clamp,
    reflect_collapsed,
    slew_limit,
    turn_control_bounds,
)


@pytest.fixture
def bounds():
    return turn_control_bounds()


class TestBounds:
    def test_default_box(self, bounds):
        np.testing.assert_array_equal(bounds.min, [0.01, 0.0, 0.0, -1.5])
        np.testing.assert_array_equal(bounds.max, [6.0, 5.0, 5.0, 1.5])
        assert bounds.slew_rate[3] == 3.5
        assert np.all(np.isinf(bounds.slew_rate[:3]))

    def test_rejects_inverted_bounds(self):
        with pytest.raises(ContractViolationError):
            ControlBounds([1.0], [1.0])

    def test_rejects_nonpositive_slew(self):
        with pytest.raises(ContractViolationError):
            ControlBounds([0.0], [1.0], [0.0])


class TestClamp:
    def test_inside_unchanged(self, bounds):
        u = np.array([0.5, 0.0, 0.0, 0.0])
        np.testing.assert_array_equal(clamp(u, bounds), u)

    def test_elementwise_clamp(self, bounds):
        np.testing.assert_array_equal(
            clamp([-1.0, 6.0, -2.0, 2.0], bounds), [0.01, 5.0, 0.0, 1.5]
        )

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-100, 100), min_size=4, max_size=4))
    def test_idempotent_and_in_box(self, values):
        bounds = turn_control_bounds()
        once = clamp(values, bounds)
        assert np.all(once >= bounds.min) and np.all(once <= bounds.max)
        np.testing.assert_array_equal(clamp(once, bounds), once)


class TestReflectCollapsed:
    def test_reflect_at_max(self, bounds):
        mean = np.array([0.5, 0.0, 0.0, 1.5])
        ui = np.array([0.5, 0.0, 0.0, 1.8])
        out = reflect_collapsed(ui, mean, bounds)
        assert out[3] == pytest.approx(1.35)

    def test_reflect_at_min(self, bounds):
        mean = np.array([0.01, 0.0, 0.0, 0.0])
        ui = np.array([-0.4, 0.0, 0.0, 0.0])
        out = reflect_collapsed(ui, mean, bounds)
        assert out[0] == pytest.approx(0.215)

    def test_interior_mean_leaves_point_alone(self, bounds):
        mean = np.array([0.5, 1.0, 1.0, 0.0])
        ui = np.array([-3.0, 9.0, -4.0, 2.5])
        np.testing.assert_array_equal(reflect_collapsed(ui, mean, bounds), ui)

    def test_no_trigger_without_violation(self, bounds):
        mean = np.array([0.01, 0.0, 0.0, 1.5])
        ui = np.array([0.02, 0.1, 0.1, 1.4])  # mean on bounds but point inside
        np.testing.assert_array_equal(reflect_collapsed(ui, mean, bounds), ui)

    @settings(max_examples=100, deadline=None)
    @given(
        offset=st.floats(min_value=1e-6, max_value=50.0),
        at_max=st.booleans(),
        j=st.integers(min_value=0, max_value=3),
    )
    def test_reflected_point_leaves_the_mean(self, offset, at_max, j):
        bounds = turn_control_bounds()
        mean = clamp(np.array([0.5, 1.0, 1.0, 0.0]), bounds)
        mean[j] = bounds.max[j] if at_max else bounds.min[j]
        ui = mean.copy()
        ui[j] = mean[j] + offset if at_max else mean[j] - offset
        out = reflect_collapsed(ui, mean, bounds)
        assert out[j] != mean[j]
        assert bounds.min[j] <= out[j] <= bounds.max[j]


class TestSlewLimit:
    def test_bound_binds(self):
        assert slew_limit(0.0, 1.5, 3.5, 0.0042) == pytest.approx(0.0147)

    def test_small_step_passes_through(self):
        assert slew_limit(0.2, 0.21, 3.5, 0.1) == pytest.approx(0.21)

    def test_zero_demand(self):
        assert slew_limit(0.7, 0.7, 3.5, 0.01) == 0.7

    @settings(max_examples=100, deadline=None)
    @given(
        prev=st.floats(-10, 10),
        cmd=st.floats(-10, 10),
        rate=st.floats(0.1, 10),
        dt=st.floats(1e-4, 1.0),
    )
    def test_never_exceeds_rate(self, prev, cmd, rate, dt):
        out = slew_limit(prev, cmd, rate, dt)
        assert abs(out - prev) <= rate * dt + 1e-15
