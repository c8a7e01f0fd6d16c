"""Pure-Python hot loops; line-for-line twin of ``_kernels.pyx``.

Selected automatically when the compiled extension is unavailable.  Both
implementations must evaluate the same floating-point expressions in the
same order so that trajectories agree between backends.
"""

import math

from ._layout import (
    A_B, A_BH, A_I, A_THR, A_U, A_UH, A_V, AR_BASE, AR_H, AR_HI, AR_LO, AR_W,
    BUFFER_FULL, C_B5, C_B6, C_DT, C_IAPP, C_NOISE, C_REC, C_STAGES, C_STAU,
    C_TRACK, C_TURN, C_TURNR, C_V1, C_V2, LAST_N5, LAST_N6, LAST_N7, LC_DT,
    LC_SMAX, LC_SMIN, LC_TOL, LC_TRACK, LC_V, L_C, L_G, L_V0, L_VMAX, L_VT,
    LX_H, LX_REM, LX_X, LX_Y, NEED_DRAWS, OK, P_A0H, P_AL0, P_AR0, P_BD, P_BH,
    P_CRMIN, P_DD, P_ETAR, P_GD, P_KM, P_TAUL, P_TAUR, P_TAU_M, P_V0, P_VD,
    P_VH, P_VMAX, P_VT, S_I0, S_SRC, S_TAU, S_TAUS, S_TGT, S_W, SUCCESS,
    UNSTABLE, X_ASE3, X_ASE4, X_F1, X_F2, X_H, X_LAST, X_SPEED, X_SYN, X_V,
    X_X, X_Y,
)

GUARD = 1e-6
PI = math.pi
TWO_PI = 2.0 * math.pi

BACKEND = "python"


def _field(x, y, bumps, nb, arena):
    c = arena[AR_BASE]
    for j in range(nb):
        dx = x - bumps[j][0]
        dy = y - bumps[j][1]
        w = bumps[j][3]
        c += bumps[j][2] * math.exp(-(dx * dx + dy * dy) / (2.0 * w * w))
    if c < arena[AR_LO]:
        c = arena[AR_LO]
    if c > arena[AR_HI]:
        c = arena[AR_HI]
    return c


def _wrap(h):
    if h > PI:
        h -= TWO_PI
    elif h <= -PI:
        h += TWO_PI
    return h


def _ase_step(st, o, side, C, p, dt, spiking):
    """Advance the ASE block ``st[o:o+7]`` in place; return -1 on instability,
    1 on a spike, 0 otherwise."""
    thr = st[o + A_THR]
    u = st[o + A_U]
    b = st[o + A_B]
    i = st[o + A_I]
    if side == 0:
        a = p[P_AL0] * (C - thr) * (1.0 if C - thr > 0 else 0.0)
    else:
        a = p[P_AR0] * (thr - C) * (1.0 if thr - C > 0 else 0.0)
    du = -a * u + p[P_BD] * b + p[P_DD] * i
    db = a * u - (p[P_BD] + p[P_GD]) * b
    di = p[P_GD] * b - p[P_DD] * i
    u = u + dt * du
    b = b + dt * db
    i = i + dt * di
    if (u < -GUARD or u > 1.0 + GUARD or b < -GUARD or b > 1.0 + GUARD
            or i < -GUARD or i > 1.0 + GUARD):
        return -1
    st[o + A_U] = u
    st[o + A_B] = b
    st[o + A_I] = i
    kh = 0.0
    if side == 1:
        ah = p[P_A0H] * (1.0 if C - p[P_ETAR] > 0 else 0.0)
        uh = st[o + A_UH]
        bh = st[o + A_BH]
        flux = ah * uh - p[P_BH] * bh
        uh = uh - dt * flux
        bh = bh + dt * flux
        if uh < -GUARD or uh > 1.0 + GUARD or bh < -GUARD or bh > 1.0 + GUARD:
            return -1
        st[o + A_UH] = uh
        st[o + A_BH] = bh
        kh = p[P_KM] * bh * bh
    kd = p[P_KM] * b * b
    if side == 0:
        if C != thr:
            h = 1.0 if C - thr > 0 else 0.0
            thr = thr + dt * ((C * h - thr) / p[P_TAUL])
    else:
        d = thr - C
        h = 1.0 if d > 0 else 0.0
        s = 1.0 if d > 0 else (-1.0 if d < 0 else 0.0)
        thr = thr + dt * ((C * h - s * thr) / p[P_TAUR])
        if thr < p[P_CRMIN]:
            thr = p[P_CRMIN]
    st[o + A_THR] = thr
    V = st[o + A_V]
    spiked = 0
    if spiking and V >= p[P_VT]:
        V = p[P_V0]
    else:
        dV = (p[P_V0] - V) + kd * (p[P_VD] - V) + kh * (p[P_VH] - V)
        V = V + dt * dV / p[P_TAU_M]
        if spiking and V >= p[P_VT]:
            V = p[P_VMAX]
            spiked = 1
    st[o + A_V] = V
    return spiked


def ase_drive(C, side, p, dt, spiking, st, out):
    """Drive one ASE neuron through the concentration series ``C``.

    ``st`` holds the 7-slot ASE state and is updated in place.  ``out`` is an
    ``(n, 8)`` array receiving V, u, b, i, uh, bh, threshold, spike flag.
    Returns ``(status, steps_done)``.
    """
    n = len(C)
    for k in range(n):
        r = _ase_step(st, 0, side, C[k], p, dt, spiking)
        if r < 0:
            return UNSTABLE, k
        for j in range(7):
            out[k, j] = st[j]
        out[k, 7] = r
    return OK, n


def snn_run(st, istate, n_steps, ctl, ase_p, lif_p, syn, bumps, arena,
            noise, turn_u, rec, spikes):
    """Advance a full network trial by ``n_steps`` steps.

    ``istate`` = [global step index, records written, spikes written];
    records and spikes are appended at those offsets.  Returns
    ``(status, steps_done)``.
    """
    dt = ctl[C_DT]
    ctrack = ctl[C_TRACK]
    iapp0 = ctl[C_IAPP]
    stages = int(ctl[C_STAGES])
    rec_every = int(ctl[C_REC])
    noise_on = ctl[C_NOISE] > 0.0
    ff = math.exp(-dt / ctl[C_STAU]) if stages > 0 else 0.0
    nb = bumps.shape[0]
    ns = syn.shape[0]
    p3 = ase_p[0]
    p4 = ase_p[1]
    bumps_l = bumps.tolist()
    syn_l = syn.tolist()
    lif_l = lif_p.tolist()
    da = [math.exp(-dt / syn_l[s][S_TAU]) for s in range(ns)]
    ds = [math.exp(-dt / syn_l[s][S_TAUS]) for s in range(ns)]
    arena_l = arena.tolist()
    spk = [0] * 7
    isyn = [0.0] * 7
    rec_cap = rec.shape[0]
    spk_cap = spikes.shape[0]
    k0 = int(istate[0])
    nrec = int(istate[1])
    nspk = int(istate[2])

    for kk in range(n_steps):
        k = k0 + kk
        x = st[X_X]
        y = st[X_Y]
        cf = _field(x, y, bumps_l, nb, arena_l)
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
                istate[0] = k
                istate[1] = nrec
                istate[2] = nspk
                return BUFFER_FULL, kk
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
        # sensors N1 (above) and N2 (below)
        for j in range(2):
            if j == 0:
                iapp = iapp0 * (1.0 if c - ctrack > 0 else 0.0)
            else:
                iapp = iapp0 * (1.0 if ctrack - c > 0 else 0.0)
            lp = lif_l[j]
            V = st[X_V + j]
            if V >= lp[L_VT]:
                V = lp[L_V0]
            else:
                V = V + dt * (-lp[L_G] * (V - lp[L_V0]) + iapp + 0.0) / lp[L_C]
                if V >= lp[L_VT]:
                    V = lp[L_VMAX]
                    spk[j] = 1
            st[X_V + j] = V
        # gradient detectors
        r = _ase_step(st, X_ASE3, 0, c, p3, dt, 1)
        if r < 0:
            istate[0] = k
            istate[1] = nrec
            istate[2] = nspk
            return UNSTABLE, kk
        spk[2] = r
        st[X_V + 2] = st[X_ASE3 + A_V]
        r = _ase_step(st, X_ASE4, 1, c, p4, dt, 1)
        if r < 0:
            istate[0] = k
            istate[1] = nrec
            istate[2] = nspk
            return UNSTABLE, kk
        spk[3] = r
        st[X_V + 3] = st[X_ASE4 + A_V]
        # synapses
        for s in range(ns):
            sr = syn_l[s]
            a = st[X_SYN + 2 * s] * da[s]
            b = st[X_SYN + 2 * s + 1] * ds[s]
            if spk[int(sr[S_SRC])]:
                a += 1.0
                b += 1.0
            st[X_SYN + 2 * s] = a
            st[X_SYN + 2 * s + 1] = b
            isyn[int(sr[S_TGT])] += sr[S_I0] * sr[S_W] * (a - b)
        # logic neurons
        for j in range(4, 7):
            if j == 4:
                iapp = ctl[C_B5]
            elif j == 5:
                iapp = ctl[C_B6]
            else:
                iapp = 0.0
            lp = lif_l[j]
            V = st[X_V + j]
            if V >= lp[L_VT]:
                V = lp[L_V0]
            else:
                V = V + dt * (-lp[L_G] * (V - lp[L_V0]) + iapp + isyn[j]) / lp[L_C]
                if V >= lp[L_VT]:
                    V = lp[L_VMAX]
                    spk[j] = 1
            st[X_V + j] = V
        for j in range(7):
            if spk[j]:
                if nspk >= spk_cap:
                    istate[0] = k
                    istate[1] = nrec
                    istate[2] = nspk
                    return BUFFER_FULL, kk
                spikes[nspk, 0] = k
                spikes[nspk, 1] = j
                nspk += 1
        # motor
        h = st[X_H]
        if spk[4]:
            h -= ctl[C_TURN]
        if spk[5]:
            h += ctl[C_TURN]
        if spk[6]:
            h += (2.0 * turn_u[kk] - 1.0) * ctl[C_TURNR]
        if spk[4]:
            st[X_LAST] = LAST_N5
        elif spk[5]:
            st[X_LAST] = LAST_N6
        elif spk[6]:
            st[X_LAST] = LAST_N7
        last = int(st[X_LAST])
        if last == LAST_N5 or last == LAST_N6:
            st[X_SPEED] = ctl[C_V2]
        elif last == LAST_N7:
            st[X_SPEED] = ctl[C_V1]
        h = _wrap(h)
        v = st[X_SPEED]
        x = x + v * dt * math.cos(h)
        y = y + v * dt * math.sin(h)
        if x < 0.0:
            x = -x
            h = PI - h
        elif x > arena_l[AR_W]:
            x = 2.0 * arena_l[AR_W] - x
            h = PI - h
        if y < 0.0:
            y = -y
            h = -h
        elif y > arena_l[AR_H]:
            y = 2.0 * arena_l[AR_H] - y
            h = -h
        st[X_X] = x
        st[X_Y] = y
        st[X_H] = _wrap(h)

    istate[0] = k0 + n_steps
    istate[1] = nrec
    istate[2] = nspk
    return OK, n_steps


def levy_run(st, istate, n_steps, ctl, bumps, arena, draws):
    """Truncated Levy walk; ``draws`` is an ``(m, 2)`` array of uniforms
    (heading, length) consumed from ``istate[1]`` onwards.

    ``istate`` = [step index, next draw].  Stops on success, on running out
    of draws, or after ``n_steps`` steps in total.
    """
    dt = ctl[LC_DT]
    smin = ctl[LC_SMIN]
    smax = ctl[LC_SMAX]
    vdt = ctl[LC_V] * dt
    bumps_l = bumps.tolist()
    nb = len(bumps_l)
    arena_l = arena.tolist()
    nd = draws.shape[0]
    k = int(istate[0])
    d = int(istate[1])
    x = st[LX_X]
    y = st[LX_Y]
    h = st[LX_H]
    rem = st[LX_REM]
    status = OK
    while True:
        if abs(_field(x, y, bumps_l, nb, arena_l) - ctl[LC_TRACK]) <= ctl[LC_TOL]:
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
        x = x + step * math.cos(h)
        y = y + step * math.sin(h)
        if x < 0.0:
            x = -x
            h = PI - h
        elif x > arena_l[AR_W]:
            x = 2.0 * arena_l[AR_W] - x
            h = PI - h
        if y < 0.0:
            y = -y
            h = -h
        elif y > arena_l[AR_H]:
            y = 2.0 * arena_l[AR_H] - y
            h = -h
        h = _wrap(h)
        k += 1
    st[LX_X] = x
    st[LX_Y] = y
    st[LX_H] = h
    st[LX_REM] = rem
    istate[0] = k
    istate[1] = d
    return status
