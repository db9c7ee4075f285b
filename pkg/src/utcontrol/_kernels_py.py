"""Pure-Python propagation kernels (fallback when the compiled extension is absent).

Mirrors _kernels.pyx statement for statement so both backends evaluate the
identical floating-point expressions.  Any change here must be applied to the
.pyx file as well; tests/test_backends.py enforces agreement.
"""

import math

COMPILED = False

_TWO_PI = 2.0 * math.pi


def _ref_value(kind, a, b, c, samples, sdt, t0, t):
    # kind: 0 constant(level=a), 1 sine(amp=a, freq=b, offset=c),
    #       2 step(amp=a, start=c), 3 sampled
    if kind == 1:
        return a * math.sin(_TWO_PI * b * t) + c
    if kind == 0:
        return a
    if kind == 2:
        return a if t >= c else 0.0
    n = len(samples)
    i = int(math.floor((t - t0) / sdt + 0.5))
    if i < 0:
        i = 0
    elif i >= n:
        i = n - 1
    return samples[i]


def propagate_surrogate(
    points, x0, k0, dt, n_steps,
    inertia, pattern_gain, damping_gain, roll_tau, lever, lx_hand, k_n,
    pattern_limit, pattern_slew,
    policy_code, kp, kff, tau,
    ref_kind, ref_a, ref_b, ref_c, ref_samples, ref_sdt, ref_t0,
    finals, outputs,
):
    """Drive one plant copy per sigma point over the horizon.

    points: (n_pts, 4) constraint-processed control samples.
    x0: (3,) plant state at the anchor step k0.
    Writes the terminal applied control into finals (n_pts, 4) and the
    terminal yaw rate into outputs (n_pts,).
    """
    n_pts = points.shape[0]
    lim = pattern_slew * dt
    omega0 = x0[0]
    phi0 = x0[1]
    pat0 = x0[2]
    for i in range(n_pts):
        u0 = points[i, 0]
        u1 = points[i, 1]
        u2 = points[i, 2]
        u3 = points[i, 3]
        omega = omega0
        phi = phi0
        pat = pat0
        cmd = pat0
        y_now = omega0
        y_prev = omega0
        mz = k_n * lx_hand * (u1 - u2)
        fy = -k_n * (u1 + u2)
        for j in range(1, n_steps + 1):
            t = (k0 + j) * dt
            if policy_code == 0:
                d = u3 - cmd
                if d > lim:
                    d = lim
                elif d < -lim:
                    d = -lim
                cmd = cmd + d
            else:
                inc = (
                    kp * (_ref_value(ref_kind, ref_a, ref_b, ref_c, ref_samples, ref_sdt, ref_t0, t)
                          - _ref_value(ref_kind, ref_a, ref_b, ref_c, ref_samples, ref_sdt, ref_t0, t - dt))
                    - kp * (y_now - y_prev)
                    + kff * (_ref_value(ref_kind, ref_a, ref_b, ref_c, ref_samples, ref_sdt, ref_t0, t + tau)
                             - _ref_value(ref_kind, ref_a, ref_b, ref_c, ref_samples, ref_sdt, ref_t0, t + tau - dt))
                )
                if inc > lim:
                    inc = lim
                elif inc < -lim:
                    inc = -lim
                cmd = cmd + inc
            if cmd > pattern_limit:
                cmd = pattern_limit
            elif cmd < -pattern_limit:
                cmd = -pattern_limit
            d = cmd - pat
            if d > lim:
                d = lim
            elif d < -lim:
                d = -lim
            pat = pat + d
            if pat > pattern_limit:
                pat = pattern_limit
            elif pat < -pattern_limit:
                pat = -pattern_limit
            new_phi = phi + dt * (lever * mz / k_n - phi) / roll_tau
            omega = omega + dt * (pattern_gain * pat + lever * phi * fy - damping_gain * u0 * omega) / inertia
            phi = new_phi
            y_prev = y_now
            y_now = omega
        finals[i, 0] = u0
        finals[i, 1] = u1
        finals[i, 2] = u2
        finals[i, 3] = cmd
        outputs[i] = omega


def propagate_linear(points, x0, k0, dt, n_steps, a, b, finals, outputs):
    """Hold each scalar control sample constant over the horizon of the linear plant."""
    n_pts = points.shape[0]
    x_init = x0[0]
    for i in range(n_pts):
        u = points[i, 0]
        x = x_init
        for j in range(n_steps):
            x = x + dt * (-a * x + b * u)
        finals[i, 0] = u
        outputs[i] = x
