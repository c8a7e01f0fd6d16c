# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Keep in lock-step with ``_kernels_py.py``."""

from libc.math cimport exp, cos, sin, fabs, M_PI

import numpy as np

from ._layout import (
    OK as _OK, UNSTABLE as _UNSTABLE, BUFFER_FULL as _BUFFER_FULL,
    NEED_DRAWS as _NEED_DRAWS, SUCCESS as _SUCCESS,
)

BACKEND = "cython"

cdef double GUARD = 1e-6

# Layout offsets duplicated as compile-time constants; checked against
# _layout by the test-suite.
cdef enum:
    A_V = 0
    A_U = 1
    A_B = 2
    A_I = 3
    A_UH = 4
    A_BH = 5
    A_THR = 6
    X_X = 0
    X_Y = 1
    X_H = 2
    X_SPEED = 3
    X_LAST = 4
    X_F1 = 5
    X_F2 = 6
    X_V = 7
    X_ASE3 = 14
    X_ASE4 = 21
    X_SYN = 28

cdef int OK = _OK
cdef int UNSTABLE = _UNSTABLE
cdef int BUFFER_FULL = _BUFFER_FULL
cdef int NEED_DRAWS = _NEED_DRAWS
cdef int SUCCESS = _SUCCESS

LAYOUT = dict(A_V=A_V, A_U=A_U, A_B=A_B, A_I=A_I, A_UH=A_UH, A_BH=A_BH,
              A_THR=A_THR, X_X=X_X, X_Y=X_Y, X_H=X_H, X_SPEED=X_SPEED,
              X_LAST=X_LAST, X_F1=X_F1, X_F2=X_F2, X_V=X_V, X_ASE3=X_ASE3,
              X_ASE4=X_ASE4, X_SYN=X_SYN)

# Field orders assumed by the literal indices below.
ASE_FIELDS = ("tau_m", "V0", "Vd", "Vh", "k_m", "beta_d", "gamma_d", "delta_d",
              "beta_h", "alpha_L0_d", "alpha_R0_d", "alpha_0_h", "tau_L", "tau_R",
              "C_R_min", "eta_R", "V_T", "V_max")
CTL_FIELDS = ("dt", "C_track", "I_app0", "I_bias5", "I_bias6", "turn_det",
              "turn_rand", "v1", "v2", "sensor_tau", "sensor_stages", "noise_amp",
              "rec_every")
LEVY_FIELDS = ("dt", "C_track", "tol", "s_min", "s_max", "speed")

cdef double TWO_PI = 2.0 * M_PI


cdef inline double _field(double x, double y, const double[:, ::1] bumps,
                          const double[::1] arena) noexcept nogil:
    cdef double c = arena[2], dx, dy, w
    cdef Py_ssize_t j
    for j in range(bumps.shape[0]):
        dx = x - bumps[j, 0]
        dy = y - bumps[j, 1]
        w = bumps[j, 3]
        c += bumps[j, 2] * exp(-(dx * dx + dy * dy) / (2.0 * w * w))
    if c < arena[3]:
        c = arena[3]
    if c > arena[4]:
        c = arena[4]
    return c


cdef inline double _wrap(double h) noexcept nogil:
    if h > M_PI:
        h -= TWO_PI
    elif h <= -M_PI:
        h += TWO_PI
    return h


cdef inline bint _bad(double v) noexcept nogil:
    return v < -GUARD or v > 1.0 + GUARD


cdef int _ase_step(double[::1] st, Py_ssize_t o, int side, double C,
                   const double[::1] p, double dt, bint spiking) noexcept nogil:
    cdef double thr = st[o + A_THR], u = st[o + A_U], b = st[o + A_B], i = st[o + A_I]
    cdef double a, du, db, di, kh = 0.0, kd, ah, uh, bh, flux, h, s, d, V, dV
    cdef int spiked = 0
    if side == 0:
        a = p[9] * (C - thr) * (1.0 if C - thr > 0 else 0.0)
    else:
        a = p[10] * (thr - C) * (1.0 if thr - C > 0 else 0.0)
    du = -a * u + p[5] * b + p[7] * i
    db = a * u - (p[5] + p[6]) * b
    di = p[6] * b - p[7] * i
    u = u + dt * du
    b = b + dt * db
    i = i + dt * di
    if _bad(u) or _bad(b) or _bad(i):
        return -1
    st[o + A_U] = u
    st[o + A_B] = b
    st[o + A_I] = i
    if side == 1:
        ah = p[11] * (1.0 if C - p[15] > 0 else 0.0)
        uh = st[o + A_UH]
        bh = st[o + A_BH]
        flux = ah * uh - p[8] * bh
        uh = uh - dt * flux
        bh = bh + dt * flux
        if _bad(uh) or _bad(bh):
            return -1
        st[o + A_UH] = uh
        st[o + A_BH] = bh
        kh = p[4] * bh * bh
    kd = p[4] * b * b
    if side == 0:
        if C != thr:
            h = 1.0 if C - thr > 0 else 0.0
            thr = thr + dt * ((C * h - thr) / p[12])
    else:
        d = thr - C
        h = 1.0 if d > 0 else 0.0
        s = 1.0 if d > 0 else (-1.0 if d < 0 else 0.0)
        thr = thr + dt * ((C * h - s * thr) / p[13])
        if thr < p[14]:
            thr = p[14]
    st[o + A_THR] = thr
    V = st[o + A_V]
    if spiking and V >= p[16]:
        V = p[1]
    else:
        dV = (p[1] - V) + kd * (p[2] - V) + kh * (p[3] - V)
        V = V + dt * dV / p[0]
        if spiking and V >= p[16]:
            V = p[17]
            spiked = 1
    st[o + A_V] = V
    return spiked


def ase_drive(const double[::1] C, int side, const double[::1] p, double dt,
              bint spiking, double[::1] st, double[:, ::1] out):
    cdef Py_ssize_t n = C.shape[0], k = 0, j
    cdef int r = 0
    with nogil:
        for k in range(n):
            r = _ase_step(st, 0, side, C[k], p, dt, spiking)
            if r < 0:
                break
            for j in range(7):
                out[k, j] = st[j]
            out[k, 7] = r
    if n > 0 and r < 0:
        return UNSTABLE, k
    return OK, n


def snn_run(double[::1] st, long long[::1] istate, Py_ssize_t n_steps,
            const double[::1] ctl, const double[:, ::1] ase_p,
            const double[:, ::1] lif_p, const double[:, ::1] syn,
            const double[:, ::1] bumps, const double[::1] arena,
            const double[::1] noise, const double[::1] turn_u,
            double[:, ::1] rec, long long[:, ::1] spikes):
    cdef double dt = ctl[0], ctrack = ctl[1], iapp0 = ctl[2]
    cdef int stages = <int> ctl[10]
    cdef long long rec_every = <long long> ctl[12]
    cdef bint noise_on = ctl[11] > 0.0
    cdef double ff = exp(-dt / ctl[9]) if stages > 0 else 0.0
    cdef Py_ssize_t ns = syn.shape[0]
    cdef Py_ssize_t rec_cap = rec.shape[0], spk_cap = spikes.shape[0]
    cdef long long k0 = istate[0], k = k0
    cdef Py_ssize_t nrec = <Py_ssize_t> istate[1], nspk = <Py_ssize_t> istate[2]
    cdef Py_ssize_t kk, j, s
    cdef double[::1] da = np.empty(max(ns, 1))
    cdef double[::1] ds = np.empty(max(ns, 1))
    cdef int spk[7]
    cdef double isyn[7]
    cdef double x, y, cf, cs, c, iapp, V, a, b, h, v
    cdef int r, last, status = OK
    for s in range(ns):
        da[s] = exp(-dt / syn[s, 4])
        ds[s] = exp(-dt / syn[s, 5])

    with nogil:
        for kk in range(n_steps):
            k = k0 + kk
            x = st[X_X]
            y = st[X_Y]
            cf = _field(x, y, bumps, arena)
            cs = cf
            if noise_on:
                cs = cf + noise[kk]
                if cs < 0.0:
                    cs = 0.0
            if stages >= 1:
                st[X_F1] = ff * st[X_F1] + (1.0 - ff) * cs
                c = st[X_F1]
                if stages >= 2:
                    st[X_F2] = ff * st[X_F2] + (1.0 - ff) * st[X_F1]
                    c = st[X_F2]
            else:
                c = cs
            if k % rec_every == 0:
                if nrec >= rec_cap:
                    status = BUFFER_FULL
                    break
                rec[nrec, 0] = k * dt
                rec[nrec, 1] = x
                rec[nrec, 2] = y
                rec[nrec, 3] = st[X_H]
                rec[nrec, 4] = st[X_SPEED]
                rec[nrec, 5] = cs
                rec[nrec, 6] = cf
                nrec += 1

            for j in range(7):
                spk[j] = 0
                isyn[j] = 0.0
            for j in range(2):
                if j == 0:
                    iapp = iapp0 * (1.0 if c - ctrack > 0 else 0.0)
                else:
                    iapp = iapp0 * (1.0 if ctrack - c > 0 else 0.0)
                V = st[X_V + j]
                if V >= lif_p[j, 3]:
                    V = lif_p[j, 2]
                else:
                    V = V + dt * (-lif_p[j, 1] * (V - lif_p[j, 2]) + iapp + 0.0) / lif_p[j, 0]
                    if V >= lif_p[j, 3]:
                        V = lif_p[j, 4]
                        spk[j] = 1
                st[X_V + j] = V
            r = _ase_step(st, X_ASE3, 0, c, ase_p[0], dt, 1)
            if r < 0:
                status = UNSTABLE
                break
            spk[2] = r
            st[X_V + 2] = st[X_ASE3 + A_V]
            r = _ase_step(st, X_ASE4, 1, c, ase_p[1], dt, 1)
            if r < 0:
                status = UNSTABLE
                break
            spk[3] = r
            st[X_V + 3] = st[X_ASE4 + A_V]
            for s in range(ns):
                a = st[X_SYN + 2 * s] * da[s]
                b = st[X_SYN + 2 * s + 1] * ds[s]
                if spk[<int> syn[s, 0]]:
                    a += 1.0
                    b += 1.0
                st[X_SYN + 2 * s] = a
                st[X_SYN + 2 * s + 1] = b
                isyn[<int> syn[s, 1]] += syn[s, 3] * syn[s, 2] * (a - b)
            for j in range(4, 7):
                if j == 4:
                    iapp = ctl[3]
                elif j == 5:
                    iapp = ctl[4]
                else:
                    iapp = 0.0
                V = st[X_V + j]
                if V >= lif_p[j, 3]:
                    V = lif_p[j, 2]
                else:
                    V = V + dt * (-lif_p[j, 1] * (V - lif_p[j, 2]) + iapp + isyn[j]) / lif_p[j, 0]
                    if V >= lif_p[j, 3]:
                        V = lif_p[j, 4]
                        spk[j] = 1
                st[X_V + j] = V
            for j in range(7):
                if spk[j]:
                    if nspk >= spk_cap:
                        status = BUFFER_FULL
                        break
                    spikes[nspk, 0] = k
                    spikes[nspk, 1] = j
                    nspk += 1
            if status != OK:
                break
            h = st[X_H]
            if spk[4]:
                h -= ctl[5]
            if spk[5]:
                h += ctl[5]
            if spk[6]:
                h += (2.0 * turn_u[kk] - 1.0) * ctl[6]
            if spk[4]:
                st[X_LAST] = 5
            elif spk[5]:
                st[X_LAST] = 6
            elif spk[6]:
                st[X_LAST] = 7
            last = <int> st[X_LAST]
            if last == 5 or last == 6:
                st[X_SPEED] = ctl[8]
            elif last == 7:
                st[X_SPEED] = ctl[7]
            h = _wrap(h)
            v = st[X_SPEED]
            x = x + v * dt * cos(h)
            y = y + v * dt * sin(h)
            if x < 0.0:
                x = -x
                h = M_PI - h
            elif x > arena[0]:
                x = 2.0 * arena[0] - x
                h = M_PI - h
            if y < 0.0:
                y = -y
                h = -h
            elif y > arena[1]:
                y = 2.0 * arena[1] - y
                h = -h
            st[X_X] = x
            st[X_Y] = y
            st[X_H] = _wrap(h)

    if status != OK:
        istate[0] = k
        istate[1] = nrec
        istate[2] = nspk
        return status, k - k0
    istate[0] = k0 + n_steps
    istate[1] = nrec
    istate[2] = nspk
    return OK, n_steps


def levy_run(double[::1] st, long long[::1] istate, long long n_steps,
             const double[::1] ctl, const double[:, ::1] bumps,
             const double[::1] arena, const double[:, ::1] draws):
    cdef double dt = ctl[0], smin = ctl[3], smax = ctl[4], vdt = ctl[5] * ctl[0]
    cdef double ctrack = ctl[1], tol = ctl[2]
    cdef Py_ssize_t nd = draws.shape[0]
    cdef long long k = istate[0]
    cdef Py_ssize_t d = <Py_ssize_t> istate[1]
    cdef double x = st[0], y = st[1], h = st[2], rem = st[3], step
    cdef int status = OK
    with nogil:
        while True:
            if fabs(_field(x, y, bumps, arena) - ctrack) <= tol:
                status = SUCCESS
                break
            if k >= n_steps:
                break
            if rem <= 0.0:
                if d >= nd:
                    status = NEED_DRAWS
                    break
                h = _wrap(TWO_PI * draws[d, 0])
                rem = 1.0 / (1.0 / smin - draws[d, 1] * (1.0 / smin - 1.0 / smax))
                d += 1
            step = vdt if vdt < rem else rem
            rem -= step
            x = x + step * cos(h)
            y = y + step * sin(h)
            if x < 0.0:
                x = -x
                h = M_PI - h
            elif x > arena[0]:
                x = 2.0 * arena[0] - x
                h = M_PI - h
            if y < 0.0:
                y = -y
                h = -h
            elif y > arena[1]:
                y = 2.0 * arena[1] - y
                h = -h
            h = _wrap(h)
            k += 1
    st[0] = x
    st[1] = y
    st[2] = h
    st[3] = rem
    istate[0] = k
    istate[1] = d
    return status
