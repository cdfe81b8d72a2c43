# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled stepping loop for the torus phase model.

Mirrors the pure-Python integrator in ``integrator.py`` exactly: classical
RK4 or Dormand-Prince 5(4) with safety 0.9 and factor clamp [0.2, 5],
angle wrapping after accepted steps, endpoint proximity events with one
bisection refinement, divergence detection.  Only the right-hand side is
hard-wired (the explicit phase family); everything generic stays in Python.
"""

import numpy as np

from libc.math cimport cos, fabs, fmod, isfinite, sin, sqrt

cdef double TWO_PI = 6.283185307179586476925286766559
cdef double PI = 3.1415926535897932384626433832795
cdef double DIVERGENCE_LIMIT = 1e12
cdef double MIN_STEP = 1e-13

# Dormand-Prince 5(4) tableau (same constants as integrator.py)
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double A71 = 35.0 / 384.0, A73 = 500.0 / 1113.0, A74 = 125.0 / 192.0
cdef double A75 = -2187.0 / 6784.0, A76 = 11.0 / 84.0
cdef double B51 = 35.0 / 384.0, B53 = 500.0 / 1113.0, B54 = 125.0 / 192.0
cdef double B55 = -2187.0 / 6784.0, B56 = 11.0 / 84.0
cdef double B41 = 5179.0 / 57600.0, B43 = 7571.0 / 16695.0, B44 = 393.0 / 640.0
cdef double B45 = -92097.0 / 339200.0, B46 = 187.0 / 2100.0, B47 = 1.0 / 40.0


cdef inline double wrap(double x) nogil:
    cdef double out = fmod(x, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    if out >= TWO_PI:
        out -= TWO_PI
    return out


cdef inline double wrap_pm_pi(double x) nogil:
    cdef double out = fmod(x + PI, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    return out - PI


cdef inline int phase_rhs(double a, double b, double eps, double q,
                          double p1, double p2, double* d1, double* d2) nogil:
    """Evaluate the field; returns 0, or 1 on divergence."""
    d1[0] = a * sin(p1) * cos(p2) + eps * sin(2.0 * p1) * cos(2.0 * p2)
    d2[0] = (-b * sin(p2) * cos(p1) + eps * sin(2.0 * p2) * cos(2.0 * p1)
             + q * (1.0 + cos(p1)) * sin(2.0 * p2))
    if not (isfinite(d1[0]) and isfinite(d2[0])):
        return 1
    if fabs(d1[0]) > DIVERGENCE_LIMIT or fabs(d2[0]) > DIVERGENCE_LIMIT:
        return 1
    return 0


cdef int rk4_step(double a, double b, double eps, double q,
                  double y0, double y1, double h,
                  double* out0, double* out1) nogil:
    cdef double k10, k11, k20, k21, k30, k31, k40, k41
    if phase_rhs(a, b, eps, q, y0, y1, &k10, &k11):
        return 1
    if phase_rhs(a, b, eps, q, y0 + 0.5 * h * k10, y1 + 0.5 * h * k11, &k20, &k21):
        return 1
    if phase_rhs(a, b, eps, q, y0 + 0.5 * h * k20, y1 + 0.5 * h * k21, &k30, &k31):
        return 1
    if phase_rhs(a, b, eps, q, y0 + h * k30, y1 + h * k31, &k40, &k41):
        return 1
    out0[0] = y0 + (h / 6.0) * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
    out1[0] = y1 + (h / 6.0) * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
    return 0


cdef int dp_step(double a, double b, double eps, double q,
                 double y0, double y1, double h,
                 double* out0, double* out1,
                 double* err0, double* err1) nogil:
    cdef double k10, k11, k20, k21, k30, k31, k40, k41
    cdef double k50, k51, k60, k61, k70, k71
    if phase_rhs(a, b, eps, q, y0, y1, &k10, &k11):
        return 1
    if phase_rhs(a, b, eps, q,
                 y0 + h * A21 * k10,
                 y1 + h * A21 * k11, &k20, &k21):
        return 1
    if phase_rhs(a, b, eps, q,
                 y0 + h * (A31 * k10 + A32 * k20),
                 y1 + h * (A31 * k11 + A32 * k21), &k30, &k31):
        return 1
    if phase_rhs(a, b, eps, q,
                 y0 + h * (A41 * k10 + A42 * k20 + A43 * k30),
                 y1 + h * (A41 * k11 + A42 * k21 + A43 * k31), &k40, &k41):
        return 1
    if phase_rhs(a, b, eps, q,
                 y0 + h * (A51 * k10 + A52 * k20 + A53 * k30 + A54 * k40),
                 y1 + h * (A51 * k11 + A52 * k21 + A53 * k31 + A54 * k41),
                 &k50, &k51):
        return 1
    if phase_rhs(a, b, eps, q,
                 y0 + h * (A61 * k10 + A62 * k20 + A63 * k30 + A64 * k40
                           + A65 * k50),
                 y1 + h * (A61 * k11 + A62 * k21 + A63 * k31 + A64 * k41
                           + A65 * k51), &k60, &k61):
        return 1
    if phase_rhs(a, b, eps, q,
                 y0 + h * (A71 * k10 + A73 * k30 + A74 * k40 + A75 * k50
                           + A76 * k60),
                 y1 + h * (A71 * k11 + A73 * k31 + A74 * k41 + A75 * k51
                           + A76 * k61), &k70, &k71):
        return 1
    out0[0] = y0 + h * (B51 * k10 + B53 * k30 + B54 * k40 + B55 * k50
                        + B56 * k60)
    out1[0] = y1 + h * (B51 * k11 + B53 * k31 + B54 * k41 + B55 * k51
                        + B56 * k61)
    err0[0] = h * ((B51 - B41) * k10 - B43 * k30 + (B54 - B44) * k40
                   + (B55 - B45) * k50 + (B56 - B46) * k60 - B47 * k70)
    err1[0] = h * ((B51 - B41) * k11 - B43 * k31 + (B54 - B44) * k41
                   + (B55 - B45) * k51 + (B56 - B46) * k61 - B47 * k71)
    return 0


cdef int single_step(double a, double b, double eps, double q, int method,
                     double y0, double y1, double h,
                     double* out0, double* out1) nogil:
    cdef double e0, e1
    if method == 0:
        return rk4_step(a, b, eps, q, y0, y1, h, out0, out1)
    return dp_step(a, b, eps, q, y0, y1, h, out0, out1, &e0, &e1)


cdef int nearest_target(double y0, double y1, double[:, ::1] targets,
                        double* dist) nogil:
    cdef int i, best = -1
    cdef double d0, d1, d, bestd = 1e300
    for i in range(targets.shape[0]):
        d0 = wrap_pm_pi(y0 - targets[i, 0])
        d1 = wrap_pm_pi(y1 - targets[i, 1])
        d = sqrt(d0 * d0 + d1 * d1)
        if d < bestd:
            bestd = d
            best = i
    dist[0] = bestd
    return best


def integrate_phase(double a, double b, double eps, double q,
                    double start0, double start1,
                    int method, double dt, double rel_tol, double abs_tol,
                    double t_max, double max_dt, int record_stride,
                    double[:, ::1] targets, double radius, int bisect_iters):
    """Run the stepping loop; returns (times, states, termination, event).

    termination: 0 time exhausted, 1 event hit, 2 diverged; event is the
    target index or -1.
    """
    cdef double y0 = wrap(start0)
    cdef double y1 = wrap(start1)
    cdef double t = 0.0
    cdef double h, h_used, e, factor, scale0, scale1, r0, r1
    cdef double y_new0 = 0.0, y_new1 = 0.0, err0 = 0.0, err1 = 0.0
    cdef double lo, hi, mid, d, d_mid, t_new
    cdef double y_mid0, y_mid1
    cdef int n_targets = targets.shape[0]
    cdef int accepted = 0, hit, idx, i, diverged = 0, accept_flag
    cdef long cap = 1024, n = 0

    times_arr = np.empty(cap, dtype=np.float64)
    states_arr = np.empty((cap, 2), dtype=np.float64)
    cdef double[::1] times = times_arr
    cdef double[:, ::1] states = states_arr

    # record the start
    times[0] = 0.0
    states[0, 0] = y0
    states[0, 1] = y1
    n = 1

    if n_targets > 0:
        idx = nearest_target(y0, y1, targets, &d)
        if d < radius:
            return times_arr[:n].copy(), states_arr[:n].copy(), 1, idx

    h = dt
    if max_dt < h:
        h = max_dt
    if t_max < h:
        h = t_max

    hit = -1
    while t < t_max:
        if t_max - t <= 1e-14 * (1.0 if t_max < 1.0 else t_max):
            break
        if h > max_dt:
            h = max_dt
        if h > t_max - t:
            h = t_max - t

        if method == 0:
            if rk4_step(a, b, eps, q, y0, y1, h, &y_new0, &y_new1):
                diverged = 1
                break
            accept_flag = 1
            h_used = h
        else:
            if dp_step(a, b, eps, q, y0, y1, h, &y_new0, &y_new1, &err0, &err1):
                diverged = 1
                break
            scale0 = abs_tol + rel_tol * max(fabs(y0), fabs(y_new0))
            scale1 = abs_tol + rel_tol * max(fabs(y1), fabs(y_new1))
            r0 = err0 / scale0
            r1 = err1 / scale1
            e = sqrt(0.5 * (r0 * r0 + r1 * r1))
            if not isfinite(e):
                diverged = 1
                break
            accept_flag = 1 if (e <= 1.0 or h <= MIN_STEP) else 0
            h_used = h
            if e == 0.0:
                factor = 5.0
            else:
                factor = 0.9 * e ** -0.2
                if factor < 0.2:
                    factor = 0.2
                elif factor > 5.0:
                    factor = 5.0
            h = h * factor
        if not accept_flag:
            continue
        if not (isfinite(y_new0) and isfinite(y_new1)):
            diverged = 1
            break

        t_new = t + h_used
        hit = -1
        if n_targets > 0:
            idx = nearest_target(wrap(y_new0), wrap(y_new1), targets, &d)
            if d < radius:
                lo = 0.0
                hi = 1.0
                for i in range(bisect_iters):
                    if hi - lo < 1e-15:
                        break
                    mid = 0.5 * (lo + hi)
                    if single_step(a, b, eps, q, method, y0, y1,
                                   mid * h_used, &y_mid0, &y_mid1):
                        diverged = 1
                        break
                    nearest_target(wrap(y_mid0), wrap(y_mid1), targets, &d_mid)
                    if d_mid < radius:
                        hi = mid
                    else:
                        lo = mid
                if diverged:
                    break
                if single_step(a, b, eps, q, method, y0, y1,
                               hi * h_used, &y_new0, &y_new1):
                    diverged = 1
                    break
                t_new = t + hi * h_used
                hit = nearest_target(wrap(y_new0), wrap(y_new1), targets, &d)

        y0 = wrap(y_new0)
        y1 = wrap(y_new1)
        t = t_new
        accepted += 1
        if hit >= 0 or accepted % record_stride == 0 or t >= t_max:
            if n == cap:
                times_arr = np.concatenate(
                    [times_arr, np.empty(cap, dtype=np.float64)])
                states_arr = np.concatenate(
                    [states_arr, np.empty((cap, 2), dtype=np.float64)])
                times = times_arr
                states = states_arr
                cap = times_arr.shape[0]
            times[n] = t
            states[n, 0] = y0
            states[n, 1] = y1
            n += 1
        if hit >= 0:
            return times_arr[:n].copy(), states_arr[:n].copy(), 1, hit

    # final record if the last accepted state was skipped by the stride
    if times[n - 1] != t:
        if n == cap:
            times_arr = np.concatenate(
                [times_arr, np.empty(cap, dtype=np.float64)])
            states_arr = np.concatenate(
                [states_arr, np.empty((cap, 2), dtype=np.float64)])
            times = times_arr
            states = states_arr
            cap = times_arr.shape[0]
        times[n] = t
        states[n, 0] = y0
        states[n, 1] = y1
        n += 1
    if diverged:
        return times_arr[:n].copy(), states_arr[:n].copy(), 2, -1
    return times_arr[:n].copy(), states_arr[:n].copy(), 0, -1
