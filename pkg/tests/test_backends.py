"""Parity between the compiled kernels, the pure-Python kernels, and the generic path."""

import numpy as np
import pytest

from utcontrol import (
    ControlDynamicsPolicy,
    LinearPlant,
    SineReference,
    SurrogateYawPlant,
    UtcConfig,
    available_backends,
    backend_name,
    propagate_sigma_point,
    run_closed_loop,
    set_backend,
)
from utcontrol._backend import _BACKENDS
from utcontrol.config import FULL_TURN_AMPLITUDE, load_scenario

DT = 0.0042
REF = SineReference(FULL_TURN_AMPLITUDE, 0.2)

POINTS = np.array([
    [0.5, 0.0, 0.0, 0.0],
    [3.1, 0.4, 0.0, 0.9],
    [0.01, 2.2, 1.3, -1.5],
    [6.0, 5.0, 5.0, 1.5],
    [1.7, 0.0, 3.3, -0.2],
])
X0 = np.array([1.2, -0.05, 0.3])


def _run_kernel(impl, policy_code, n_steps):
    finals = np.empty((POINTS.shape[0], 4))
    outputs = np.empty(POINTS.shape[0])
    plant = SurrogateYawPlant()
    kind, a, b, c, samples, sdt, t0 = REF.kernel_spec()
    impl.propagate_surrogate(
        POINTS, X0, 7, DT, n_steps,
        plant.inertia, plant.pattern_gain, plant.damping_gain, plant.roll_tau,
        plant.lever, plant.lx_hand, plant.k_n, plant.pattern_limit, plant.pattern_slew,
        policy_code, 0.25, 0.06, n_steps * DT,
        kind, a, b, c, samples, sdt, t0,
        finals, outputs,
    )
    return finals, outputs


@pytest.mark.skipif("compiled" not in available_backends(), reason="extension not built")
class TestKernelParity:
    @pytest.mark.parametrize("policy_code", [0, 1])
    @pytest.mark.parametrize("n_steps", [1, 5, 60])
    def test_surrogate_bitwise_equal(self, policy_code, n_steps):
        f_py, o_py = _run_kernel(_BACKENDS["python"], policy_code, n_steps)
        f_c, o_c = _run_kernel(_BACKENDS["compiled"], policy_code, n_steps)
        np.testing.assert_array_equal(f_py, f_c)
        np.testing.assert_array_equal(o_py, o_c)

    def test_linear_bitwise_equal(self):
        pts = np.array([[0.0], [1.0], [-1.0], [7.3]])
        x0 = np.array([0.4])
        out = {}
        for name in ("python", "compiled"):
            finals = np.empty((4, 1))
            outputs = np.empty(4)
            _BACKENDS[name].propagate_linear(pts, x0, 3, DT, 20, 2.0, 2.0, finals, outputs)
            out[name] = (finals.copy(), outputs.copy())
        np.testing.assert_array_equal(out["python"][0], out["compiled"][0])
        np.testing.assert_array_equal(out["python"][1], out["compiled"][1])


class TestGenericPathParity:
    @pytest.mark.parametrize("policy_kind", ["hold_constant", "pi_feedforward"])
    def test_generic_matches_kernel(self, policy_kind):
        policy = ControlDynamicsPolicy(policy_kind, kp=0.25, kff=0.06)
        cfg = UtcConfig(t_pred_steps=12, dt=DT, policy=policy)
        plant = SurrogateYawPlant()
        code = 0 if policy_kind == "hold_constant" else 1
        finals_k, outputs_k = _run_kernel(_BACKENDS[backend_name()], code, 12)
        for i in range(POINTS.shape[0]):
            final, y = propagate_sigma_point(POINTS[i], X0, plant, policy, REF, 7, cfg)
            np.testing.assert_array_equal(final, finals_k[i])
            assert y[0] == outputs_k[i]


@pytest.mark.skipif("compiled" not in available_backends(), reason="extension not built")
class TestBackendSwitch:
    def test_closed_loop_identical_across_backends(self):
        sc = load_scenario("configs/fast_turn_utc.cfg")
        runs = {}
        original = backend_name()
        try:
            for name in ("python", "compiled"):
                set_backend(name)
                runs[name] = run_closed_loop(
                    SurrogateYawPlant(), SineReference(FULL_TURN_AMPLITUDE, 0.2),
                    sc.utc, duration=1.0,
                )
        finally:
            set_backend(original)
        np.testing.assert_array_equal(runs["python"].u_cmd, runs["compiled"].u_cmd)
        np.testing.assert_array_equal(runs["python"].yr_real, runs["compiled"].yr_real)

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            set_backend("fortran")
