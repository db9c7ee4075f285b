import numpy as np
import pytest

from utcontrol import (
    ConfigError,
    ConstantReference,
    ControlBelief,
    ControlBounds,
    ControlDynamicsPolicy,
    HysteresisState,
    LinearPlant,
    NoiseCouplingPolicy,
    SineReference,
    SurrogateYawPlant,
    UtcConfig,
    propagate_sigma_point,
    run_closed_loop,
    utc_step,
)
from utcontrol.config import FULL_TURN_AMPLITUDE, load_scenario
from utcontrol.metrics import compute_metrics

from conftest import ChannelEchoPlant

DT = 0.0042


def scalar_config(**overrides):
    defaults = dict(
        w0=0.25,
        t_pred_steps=1,
        dt=DT,
        p_err=np.array([[1e-4]]),
        bounds=ControlBounds([-10.0], [10.0], None),
        policy=ControlDynamicsPolicy("hold_constant"),
        noise=NoiseCouplingPolicy("none"),
        qu_base=np.zeros((1, 1)),
        pattern_index=None,
    )
    defaults.update(overrides)
    return UtcConfig(**defaults)


class TestPropagateSigmaPoint:
    def test_linear_single_step(self):
        cfg = scalar_config()
        final, y = propagate_sigma_point(
            np.array([1.0]), np.array([0.0]), LinearPlant(), cfg.policy,
            ConstantReference(0.0), 0, cfg,
        )
        assert y[0] == pytest.approx(0.0084)
        np.testing.assert_array_equal(final, [1.0])

    def test_equilibrium(self):
        cfg = scalar_config(t_pred_steps=25)
        final, y = propagate_sigma_point(
            np.array([0.0]), np.array([0.0]), LinearPlant(), cfg.policy,
            ConstantReference(0.0), 0, cfg,
        )
        assert y[0] == 0.0
        np.testing.assert_array_equal(final, [0.0])

    def test_hold_keeps_moment_coefficients(self):
        cfg = UtcConfig(t_pred_steps=15, policy=ControlDynamicsPolicy("hold_constant"))
        ui = np.array([2.0, 1.0, 0.5, 1.2])
        final, _ = propagate_sigma_point(
            ui, np.zeros(3), SurrogateYawPlant(), cfg.policy,
            SineReference(FULL_TURN_AMPLITUDE, 0.2), 3, cfg,
        )
        np.testing.assert_array_equal(final[:3], ui[:3])
        # pattern endpoint is the slew-limited approach toward the sample
        assert final[3] == pytest.approx(min(1.2, 15 * 3.5 * DT))


class TestUtcStep:
    def test_scalar_update_chain(self):
        # spread 1 at w0=0.25 needs belief variance 0.75; the echo plant maps
        # each point straight to the output
        belief = ControlBelief([0.0], [[0.75]])
        cfg = scalar_config()
        hyst = HysteresisState(-1.0, 10)
        new_belief, u_cmd, rec = utc_step(
            belief, np.array([0.0]), ChannelEchoPlant(), ConstantReference(1.0),
            0, cfg, hyst, prev_cmd=None,
        )
        assert rec.y_pred[0] == pytest.approx(0.0, abs=1e-12)
        assert rec.c_y[0, 0] == pytest.approx(0.7501)
        assert rec.c_uy[0, 0] == pytest.approx(0.75)
        assert rec.gain[0, 0] == pytest.approx(0.9998666844420744)
        assert u_cmd[0] == pytest.approx(0.9998666844420744)

    def test_identical_outputs_zero_gain(self):
        belief = ControlBelief([0.2], [[0.5]])
        cfg = scalar_config(qu_base=np.array([[0.01]]))

        class FrozenPlant(ChannelEchoPlant):
            def step(self, x, u, dt):
                return np.array([4.2])

        _, u_cmd, rec = utc_step(
            belief, np.array([4.2]), FrozenPlant(), ConstantReference(1.0),
            0, cfg, HysteresisState(-1.0, 10), prev_cmd=None,
        )
        np.testing.assert_allclose(rec.gain, 0.0, atol=1e-12)
        assert u_cmd[0] == pytest.approx(0.2)  # clamped weighted prediction

    def test_gain_vanishes_with_huge_output_tolerance(self):
        belief = ControlBelief([0.0], [[0.75]])
        cfg = scalar_config(p_err=np.array([[1e12]]))
        _, _, rec = utc_step(
            belief, np.array([0.0]), ChannelEchoPlant(), ConstantReference(1.0),
            0, cfg, HysteresisState(-1.0, 10), prev_cmd=None,
        )
        assert abs(rec.gain[0, 0]) <= abs(rec.c_uy[0, 0]) / 1e12 * (1 + 1e-9)

    def test_update_downdate_is_psd(self):
        # the update subtracts gain @ c_y @ gain.T from the predicted
        # covariance, so the trace may only shrink at that stage
        belief = ControlBelief([0.0], [[0.75]])
        cfg = scalar_config(qu_base=np.array([[0.1]]))
        hyst = HysteresisState(-1.0, 10)
        for k in range(5):
            belief, _, rec = utc_step(
                belief, np.array([0.0]), ChannelEchoPlant(), ConstantReference(1.0),
                k, cfg, hyst, prev_cmd=None,
            )
            downdate = rec.gain @ rec.c_y @ rec.gain.T
            assert np.linalg.eigvalsh(0.5 * (downdate + downdate.T))[0] >= -1e-15

    def test_cross_covariance_matches_point_spread_column(self):
        # echo plant on channel 2 of a 4-channel layout: the cross covariance
        # must equal that column of the point-set covariance
        rng = np.random.default_rng(9)
        a = rng.normal(size=(4, 4))
        belief = ControlBelief([2.0, 2.5, 2.0, 0.0], 0.05 * (a @ a.T + np.eye(4)))
        bounds = ControlBounds([-50.0] * 4, [50.0] * 4, None)
        cfg = UtcConfig(
            t_pred_steps=1, bounds=bounds, qu_base=np.zeros((4, 4)),
            noise=NoiseCouplingPolicy("none"), pattern_index=None,
        )
        _, _, rec = utc_step(
            belief, np.array([0.0]), ChannelEchoPlant(channel=2), ConstantReference(0.0),
            0, cfg, HysteresisState(-1.0, 10), prev_cmd=None,
        )
        np.testing.assert_allclose(rec.c_uy[:, 0], belief.cov[:, 2], atol=1e-10)

    def test_schedule_requires_four_channels(self):
        belief = ControlBelief([0.0], [[0.5]])
        cfg = scalar_config()
        cfg.noise = NoiseCouplingPolicy("reference_sign")
        with pytest.raises(ConfigError):
            utc_step(belief, np.array([0.0]), ChannelEchoPlant(), ConstantReference(1.0),
                     0, cfg, HysteresisState(-1.0, 10))


class TestRunClosedLoop:
    def test_linear_tracking_converges_fast(self):
        cfg = scalar_config(t_pred_steps=20, qu_base=np.array([[0.1]]))
        result = run_closed_loop(
            LinearPlant(), ConstantReference(1.0), cfg, duration=2.0,
            belief0=ControlBelief([0.0], [[1.0]]),
        )
        steady = result.t >= 1.0
        err = result.yr_ref[steady] - result.yr_real[steady]
        assert np.max(np.abs(err)) < 0.02

    def test_row_count(self):
        cfg = scalar_config(t_pred_steps=5, qu_base=np.array([[0.1]]))
        result = run_closed_loop(
            LinearPlant(), ConstantReference(1.0), cfg, duration=1.0,
            belief0=ControlBelief([0.0], [[1.0]]),
        )
        assert result.n_steps == int(np.floor(1.0 / DT)) + 1
        assert np.all(np.diff(result.t) > 0)

    def test_zero_reference_stays_quiet(self):
        sc = load_scenario("configs/fast_turn_utc.cfg")
        cfg = sc.utc
        result = run_closed_loop(
            SurrogateYawPlant(), ConstantReference(0.0), cfg, duration=5.0,
        )
        assert np.max(np.abs(result.yr_real)) < 0.05
        assert np.max(np.abs(result.u_cmd[:, 3])) < 0.2

    def test_bit_identical_reruns(self):
        sc = load_scenario("configs/fast_turn_utc.cfg")

        def run():
            return run_closed_loop(
                SurrogateYawPlant(), SineReference(FULL_TURN_AMPLITUDE, 0.2),
                sc.utc, duration=2.0,
            )

        a, b = run(), run()
        np.testing.assert_array_equal(a.u_cmd, b.u_cmd)
        np.testing.assert_array_equal(a.yr_real, b.yr_real)
        np.testing.assert_array_equal(a.pu_trace, b.pu_trace)

    def test_commands_respect_bounds_and_slew(self):
        sc = load_scenario("configs/fast_turn_utc.cfg")
        result = run_closed_loop(
            SurrogateYawPlant(), SineReference(FULL_TURN_AMPLITUDE, 0.2),
            sc.utc, duration=3.0,
        )
        bounds = sc.utc.bounds
        assert np.all(result.u_cmd >= bounds.min)
        assert np.all(result.u_cmd <= bounds.max)
        dalpha = np.abs(np.diff(result.u_cmd[:, 3]))
        assert np.max(dalpha) <= 3.5 * DT + 1e-12

    def test_covariance_stays_psd(self):
        sc = load_scenario("configs/fast_turn_utc.cfg")
        result = run_closed_loop(
            SurrogateYawPlant(), SineReference(FULL_TURN_AMPLITUDE, 0.2),
            sc.utc, duration=3.0,
        )
        post = np.array([r.min_eig_post_repair for r in result.records])
        assert np.all(post >= 0.0)
