# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled propagation kernels (hot inner loop of the sigma-point controller).

Statement-for-statement twin of _kernels_py.py; keep the two in sync.
"""

from libc.math cimport sin, floor, M_PI

COMPILED = True

cdef double TWO_PI = 2.0 * M_PI


cdef inline double _ref_value(int kind, double a, double b, double c,
                              const double[::1] samples, double sdt, double t0,
                              double t) noexcept nogil:
    cdef Py_ssize_t i, n
    if kind == 1:
        return a * sin(TWO_PI * b * t) + c
    if kind == 0:
        return a
    if kind == 2:
        return a if t >= c else 0.0
    n = samples.shape[0]
    i = <Py_ssize_t>floor((t - t0) / sdt + 0.5)
    if i < 0:
        i = 0
    elif i >= n:
        i = n - 1
    return samples[i]


def propagate_surrogate(
    const double[:, ::1] points, const double[::1] x0, long k0, double dt, int n_steps,
    double inertia, double pattern_gain, double damping_gain, double roll_tau,
    double lever, double lx_hand, double k_n,
    double pattern_limit, double pattern_slew,
    int policy_code, double kp, double kff, double tau,
    int ref_kind, double ref_a, double ref_b, double ref_c,
    const double[::1] ref_samples, double ref_sdt, double ref_t0,
    double[:, ::1] finals, double[::1] outputs,
):
    """Drive one plant copy per sigma point over the horizon (see _kernels_py)."""
    cdef Py_ssize_t n_pts = points.shape[0]
    cdef Py_ssize_t i
    cdef int j
    cdef double lim = pattern_slew * dt
    cdef double omega0 = x0[0]
    cdef double phi0 = x0[1]
    cdef double pat0 = x0[2]
    cdef double u0, u1, u2, u3, omega, phi, pat, cmd, y_now, y_prev, mz, fy
    cdef double t, d, inc, new_phi
    with nogil:
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


def propagate_linear(
    const double[:, ::1] points, const double[::1] x0, long k0, double dt, int n_steps,
    double a, double b,
    double[:, ::1] finals, double[::1] outputs,
):
    """Hold each scalar control sample constant over the horizon of the linear plant."""
    cdef Py_ssize_t n_pts = points.shape[0]
    cdef Py_ssize_t i
    cdef int j
    cdef double x_init = x0[0]
    cdef double u, x
    with nogil:
        for i in range(n_pts):
            u = points[i, 0]
            x = x_init
            for j in range(n_steps):
                x = x + dt * (-a * x + b * u)
            finals[i, 0] = u
            outputs[i] = x
