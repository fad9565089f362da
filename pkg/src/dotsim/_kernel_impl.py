"""Fixed-step RK4 integration loops for both formulations.

This file is written in Cython pure-Python syntax.  It imports and runs as
ordinary Python (the fallback backend) and compiles unchanged, via setup.py,
to the C extension ``dotsim._kernel_c`` (the fast backend).  backend.py picks
whichever is available, so any edit here changes both backends at once and
they stay numerically identical (the extension is built with FMA contraction
disabled for that reason).

Both loops take one fixed RK4 step per iteration (the very last step is
shortened to land exactly on t_end), record every ``stride``-th state plus
the initial and final ones, and return a status code: 0 for success, 1 when
the state stopped being finite.  Stage times are recomputed from the step
index so runs are bit-reproducible.
"""

from __future__ import annotations

import cython

from cython.cimports.libc.math import atan2, cos, fabs, sin, sqrt, tanh

STATUS_OK = 0
STATUS_NON_FINITE = 1

ENV_CONSTANT = 0
ENV_TANH = 1


@cython.cfunc
@cython.inline
@cython.exceptval(check=False)
@cython.nogil
def _field(t: cython.double, amp: cython.double, omega: cython.double,
           phase: cython.double, env_kind: cython.int,
           tau: cython.double) -> cython.double:
    # amp = Omega_w/2; F(t) = amp * f(t) * cos(omega*t + phase)
    f: cython.double = 1.0
    if env_kind == 1:  # ENV_TANH
        f = tanh(t / tau)
    return amp * f * cos(omega * t + phase)


@cython.cfunc
@cython.exceptval(check=False)
@cython.nogil
def _record_amplitude(x1: cython.double, y1: cython.double,
                      x2: cython.double, y2: cython.double,
                      idx: cython.Py_ssize_t,
                      p_left: cython.double[::1], p_right: cython.double[::1],
                      alpha: cython.double[::1], phi: cython.double[::1],
                      re_al: cython.double[::1], im_al: cython.double[::1],
                      re_ar: cython.double[::1], im_ar: cython.double[::1]
                      ) -> cython.Py_ssize_t:
    # Probabilities are the normalized ratios so they sum to 1 even while the
    # raw state carries integration drift; the raw amplitudes are recorded.
    ml2: cython.double = x1 * x1 + y1 * y1
    mr2: cython.double = x2 * x2 + y2 * y2
    n2: cython.double = ml2 + mr2
    p_left[idx] = ml2 / n2
    p_right[idx] = mr2 / n2
    alpha[idx] = atan2(sqrt(mr2), sqrt(ml2))
    lam: cython.double = 0.0
    if ml2 > 0.0:
        lam = atan2(y1, x1)
    ph: cython.double = 0.0
    if mr2 > 0.0:
        ph = atan2(y2, x2) - lam
        if ph > 3.141592653589793:
            ph -= 6.283185307179586
        elif ph <= -3.141592653589793:
            ph += 6.283185307179586
    phi[idx] = ph
    re_al[idx] = x1
    im_al[idx] = y1
    re_ar[idx] = x2
    im_ar[idx] = y2
    return idx + 1


def run_amplitude(
    x1_0: cython.double, y1_0: cython.double,
    x2_0: cython.double, y2_0: cython.double,
    k: cython.double, omega_coulomb: cython.double,
    drive_amp: cython.double, omega_drive: cython.double,
    phase: cython.double, env_kind: cython.int, tau: cython.double,
    t_end: cython.double, dt: cython.double,
    n_steps: cython.Py_ssize_t, stride: cython.Py_ssize_t,
    times: cython.double[::1],
    p_left: cython.double[::1], p_right: cython.double[::1],
    alpha: cython.double[::1], phi: cython.double[::1],
    re_al: cython.double[::1], im_al: cython.double[::1],
    re_ar: cython.double[::1], im_ar: cython.double[::1],
):
    """Propagate (Re a_L, Im a_L, Re a_R, Im a_R) = (x1, y1, x2, y2).

    Returns (status, fail_time, norm_drift, samples_recorded).
    """
    x1: cython.double = x1_0
    y1: cython.double = y1_0
    x2: cython.double = x2_0
    y2: cython.double = y2_0
    drift: cython.double = 0.0
    fail_t: cython.double = 0.0
    status: cython.int = 0
    idx: cython.Py_ssize_t = 0
    i: cython.Py_ssize_t
    t: cython.double
    h: cython.double
    g: cython.double
    f1: cython.double
    f2: cython.double
    f4: cython.double
    u1: cython.double
    v1: cython.double
    u2: cython.double
    v2: cython.double
    n2: cython.double
    d: cython.double

    with cython.nogil:
        times[0] = 0.0
        idx = _record_amplitude(x1, y1, x2, y2, 0, p_left, p_right,
                                alpha, phi, re_al, im_al, re_ar, im_ar)
        for i in range(n_steps):
            t = i * dt
            h = dt
            if i == n_steps - 1:
                h = t_end - i * dt

            f1 = _field(t, drive_amp, omega_drive, phase, env_kind, tau)
            g = f1 + omega_coulomb * ((x2 * x2 + y2 * y2) - (x1 * x1 + y1 * y1))
            ax1: cython.double = k * y2 - g * y1
            ay1: cython.double = -k * x2 + g * x1
            ax2: cython.double = k * y1 + g * y2
            ay2: cython.double = -k * x1 - g * x2

            u1 = x1 + 0.5 * h * ax1
            v1 = y1 + 0.5 * h * ay1
            u2 = x2 + 0.5 * h * ax2
            v2 = y2 + 0.5 * h * ay2
            f2 = _field(t + 0.5 * h, drive_amp, omega_drive, phase, env_kind, tau)
            g = f2 + omega_coulomb * ((u2 * u2 + v2 * v2) - (u1 * u1 + v1 * v1))
            bx1: cython.double = k * v2 - g * v1
            by1: cython.double = -k * u2 + g * u1
            bx2: cython.double = k * v1 + g * v2
            by2: cython.double = -k * u1 - g * u2

            u1 = x1 + 0.5 * h * bx1
            v1 = y1 + 0.5 * h * by1
            u2 = x2 + 0.5 * h * bx2
            v2 = y2 + 0.5 * h * by2
            g = f2 + omega_coulomb * ((u2 * u2 + v2 * v2) - (u1 * u1 + v1 * v1))
            cx1: cython.double = k * v2 - g * v1
            cy1: cython.double = -k * u2 + g * u1
            cx2: cython.double = k * v1 + g * v2
            cy2: cython.double = -k * u1 - g * u2

            u1 = x1 + h * cx1
            v1 = y1 + h * cy1
            u2 = x2 + h * cx2
            v2 = y2 + h * cy2
            f4 = _field(t + h, drive_amp, omega_drive, phase, env_kind, tau)
            g = f4 + omega_coulomb * ((u2 * u2 + v2 * v2) - (u1 * u1 + v1 * v1))
            dx1: cython.double = k * v2 - g * v1
            dy1: cython.double = -k * u2 + g * u1
            dx2: cython.double = k * v1 + g * v2
            dy2: cython.double = -k * u1 - g * u2

            x1 = x1 + (h / 6.0) * (ax1 + 2.0 * (bx1 + cx1) + dx1)
            y1 = y1 + (h / 6.0) * (ay1 + 2.0 * (by1 + cy1) + dy1)
            x2 = x2 + (h / 6.0) * (ax2 + 2.0 * (bx2 + cx2) + dx2)
            y2 = y2 + (h / 6.0) * (ay2 + 2.0 * (by2 + cy2) + dy2)

            n2 = x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2
            if not (n2 < 1.0e12):  # also catches NaN
                status = 1
                fail_t = t + h
                break
            d = fabs(sqrt(n2) - 1.0)
            if d > drift:
                drift = d

            if (i + 1) % stride == 0 or i == n_steps - 1:
                times[idx] = t_end if i == n_steps - 1 else (i + 1) * dt
                idx = _record_amplitude(x1, y1, x2, y2, idx, p_left, p_right,
                                        alpha, phi, re_al, im_al, re_ar, im_ar)
    return status, fail_t, drift, idx


@cython.cfunc
@cython.inline
@cython.exceptval(check=False)
@cython.nogil
def _clamp_sign(c2a: cython.double, s2a: cython.double) -> cython.double:
    s: cython.double = 1.0 if s2a >= 0.0 else -1.0
    c: cython.double = 1.0 if c2a >= 0.0 else -1.0
    return s * c


@cython.cfunc
@cython.inline
@cython.exceptval(check=False)
@cython.nogil
def _clamped_tan(al: cython.double, eps_pole: cython.double) -> cython.double:
    sa: cython.double = sin(al)
    ca: cython.double = cos(al)
    t: cython.double
    if fabs(ca) >= eps_pole * fabs(sa):
        t = sa / ca
        if t > 1.0 / eps_pole:
            t = 1.0 / eps_pole
        elif t < -1.0 / eps_pole:
            t = -1.0 / eps_pole
        return t
    return _clamp_sign(ca, sa) / eps_pole


@cython.cfunc
@cython.exceptval(check=False)
@cython.nogil
def _record_angle(al: cython.double, ph: cython.double, lam: cython.double,
                  idx: cython.Py_ssize_t,
                  p_left: cython.double[::1], p_right: cython.double[::1],
                  alpha: cython.double[::1], phi: cython.double[::1],
                  re_al: cython.double[::1], im_al: cython.double[::1],
                  re_ar: cython.double[::1], im_ar: cython.double[::1]
                  ) -> cython.Py_ssize_t:
    ca: cython.double = cos(al)
    sa: cython.double = sin(al)
    p_left[idx] = ca * ca
    p_right[idx] = sa * sa
    alpha[idx] = al
    phi[idx] = ph
    re_al[idx] = ca * cos(lam)
    im_al[idx] = ca * sin(lam)
    re_ar[idx] = sa * cos(lam + ph)
    im_ar[idx] = sa * sin(lam + ph)
    return idx + 1


def run_angle(
    al_0: cython.double, ph_0: cython.double, lam_0: cython.double,
    k: cython.double, omega_coulomb: cython.double,
    drive_amp: cython.double, omega_drive: cython.double,
    phase: cython.double, env_kind: cython.int, tau: cython.double,
    t_end: cython.double, dt: cython.double,
    n_steps: cython.Py_ssize_t, stride: cython.Py_ssize_t,
    eps_pole: cython.double, track_phase: cython.int,
    times: cython.double[::1],
    p_left: cython.double[::1], p_right: cython.double[::1],
    alpha: cython.double[::1], phi: cython.double[::1],
    re_al: cython.double[::1], im_al: cython.double[::1],
    re_ar: cython.double[::1], im_ar: cython.double[::1],
):
    """Propagate (alpha, phi) plus the decoupled overall phase lambda.

    The lambda rider never feeds back into (alpha, phi); with track_phase=0
    it is skipped entirely and reconstructed amplitudes keep the initial
    overall phase (the relative phase phi stays exact either way).

    Returns (status, fail_time, clamp_count, first_clamp_time,
    samples_recorded); first_clamp_time is -1.0 when no clamping fired.
    """
    al: cython.double = al_0
    ph: cython.double = ph_0
    lam: cython.double = lam_0
    status: cython.int = 0
    idx: cython.Py_ssize_t = 0
    i: cython.Py_ssize_t
    clamp_count: cython.Py_ssize_t = 0
    first_clamp_t: cython.double = -1.0
    fail_t: cython.double = 0.0
    k2: cython.double = 2.0 * k
    om2: cython.double = 2.0 * omega_coulomb
    t: cython.double
    h: cython.double
    ft: cython.double
    fm: cython.double
    fe: cython.double
    s2a: cython.double
    c2a: cython.double
    cot: cython.double
    cph: cython.double
    ua: cython.double
    up: cython.double

    with cython.nogil:
        times[0] = 0.0
        idx = _record_angle(al, ph, lam, 0, p_left, p_right, alpha, phi,
                            re_al, im_al, re_ar, im_ar)
        for i in range(n_steps):
            t = i * dt
            h = dt
            if i == n_steps - 1:
                h = t_end - i * dt

            # stage 1
            ft = _field(t, drive_amp, omega_drive, phase, env_kind, tau)
            s2a = sin(2.0 * al)
            c2a = cos(2.0 * al)
            if fabs(s2a) >= eps_pole:
                cot = c2a / s2a
            else:
                cot = _clamp_sign(c2a, s2a) / eps_pole
                clamp_count += 1
                if first_clamp_t < 0.0:
                    first_clamp_t = t
            cph = cos(ph)
            a_ph: cython.double = -2.0 * ft - k2 * cph * cot + om2 * c2a
            a_al: cython.double = -k * sin(ph)
            a_lam: cython.double = 0.0
            if track_phase != 0:
                a_lam = ft - omega_coulomb * c2a - k * _clamped_tan(al, eps_pole) * cph

            # stage 2
            ua = al + 0.5 * h * a_al
            up = ph + 0.5 * h * a_ph
            fm = _field(t + 0.5 * h, drive_amp, omega_drive, phase, env_kind, tau)
            s2a = sin(2.0 * ua)
            c2a = cos(2.0 * ua)
            if fabs(s2a) >= eps_pole:
                cot = c2a / s2a
            else:
                cot = _clamp_sign(c2a, s2a) / eps_pole
                clamp_count += 1
                if first_clamp_t < 0.0:
                    first_clamp_t = t + 0.5 * h
            cph = cos(up)
            b_ph: cython.double = -2.0 * fm - k2 * cph * cot + om2 * c2a
            b_al: cython.double = -k * sin(up)
            b_lam: cython.double = 0.0
            if track_phase != 0:
                b_lam = fm - omega_coulomb * c2a - k * _clamped_tan(ua, eps_pole) * cph

            # stage 3
            ua = al + 0.5 * h * b_al
            up = ph + 0.5 * h * b_ph
            s2a = sin(2.0 * ua)
            c2a = cos(2.0 * ua)
            if fabs(s2a) >= eps_pole:
                cot = c2a / s2a
            else:
                cot = _clamp_sign(c2a, s2a) / eps_pole
                clamp_count += 1
                if first_clamp_t < 0.0:
                    first_clamp_t = t + 0.5 * h
            cph = cos(up)
            c_ph: cython.double = -2.0 * fm - k2 * cph * cot + om2 * c2a
            c_al: cython.double = -k * sin(up)
            c_lam: cython.double = 0.0
            if track_phase != 0:
                c_lam = fm - omega_coulomb * c2a - k * _clamped_tan(ua, eps_pole) * cph

            # stage 4
            ua = al + h * c_al
            up = ph + h * c_ph
            fe = _field(t + h, drive_amp, omega_drive, phase, env_kind, tau)
            s2a = sin(2.0 * ua)
            c2a = cos(2.0 * ua)
            if fabs(s2a) >= eps_pole:
                cot = c2a / s2a
            else:
                cot = _clamp_sign(c2a, s2a) / eps_pole
                clamp_count += 1
                if first_clamp_t < 0.0:
                    first_clamp_t = t + h
            cph = cos(up)
            d_ph: cython.double = -2.0 * fe - k2 * cph * cot + om2 * c2a
            d_al: cython.double = -k * sin(up)
            d_lam: cython.double = 0.0
            if track_phase != 0:
                d_lam = fe - omega_coulomb * c2a - k * _clamped_tan(ua, eps_pole) * cph

            al = al + (h / 6.0) * (a_al + 2.0 * (b_al + c_al) + d_al)
            ph = ph + (h / 6.0) * (a_ph + 2.0 * (b_ph + c_ph) + d_ph)
            if track_phase != 0:
                lam = lam + (h / 6.0) * (a_lam + 2.0 * (b_lam + c_lam) + d_lam)

            if not (fabs(al) + fabs(ph) < 1.0e15):  # also catches NaN
                status = 1
                fail_t = t + h
                break

            if (i + 1) % stride == 0 or i == n_steps - 1:
                times[idx] = t_end if i == n_steps - 1 else (i + 1) * dt
                idx = _record_angle(al, ph, lam, idx, p_left, p_right,
                                    alpha, phi, re_al, im_al, re_ar, im_ar)
    return status, fail_t, clamp_count, first_clamp_t, idx
