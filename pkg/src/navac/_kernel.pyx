# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trial-step kernel.

Semantics are defined by navac._kernel_py (the numpy reference); this module
is a line-for-line port of its per-step pipeline with BLAS calls for the dense
products. Both consume the same pre-drawn noise rows, so runs agree across
backends up to floating-point summation order.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, expm1, isfinite, log1p, sqrt, tanh
from scipy.linalg.cython_blas cimport daxpy, ddot, dgemv, dger

BACKEND = "compiled"

cdef int ACT_RELU = 0
cdef int ACT_LRELU = 1
cdef int ACT_ELU = 2
cdef int ACT_SOFTPLUS = 3
cdef int ACT_TANH = 4
cdef int ACT_SIGMOID = 5
cdef int ACT_LINEAR = 6
cdef int ACT_PHI_A = 7
cdef int ACT_PHI_B = 8
cdef int ACT_OMEGA = 9

cdef double LRELU_SLOPE = 0.01

cdef int ARCH_CLASSIC = 0
cdef int ARCH_EXPANDED = 1
cdef int ARCH_HIDDEN = 2
cdef int ARCH_RESERVOIR = 3

cdef int ST_RUNNING = 0
cdef int ST_CONSUMED = 1
cdef int ST_TIMEOUT = 2
cdef int ST_ABORTED = 3


cdef inline double act_scalar(double x, int kind, double theta, double gain) noexcept nogil:
    if kind == ACT_RELU:
        return x if x > 0.0 else 0.0
    elif kind == ACT_LRELU:
        return x if x > 0.0 else LRELU_SLOPE * x
    elif kind == ACT_ELU:
        return x if x > 0.0 else expm1(x)
    elif kind == ACT_SOFTPLUS:
        # overflow-safe log(1 + e^x)
        return x + log1p(exp(-x)) if x > 0.0 else log1p(exp(x))
    elif kind == ACT_TANH:
        return tanh(x)
    elif kind == ACT_SIGMOID:
        return 1.0 / (1.0 + exp(-x))
    elif kind == ACT_LINEAR:
        return gain * x
    elif kind == ACT_PHI_A:
        return x if x > theta else 0.0
    elif kind == ACT_PHI_B:
        return x if x > theta else theta
    else:  # omega
        if x <= 0.0:
            return 0.0
        elif x <= 0.5:
            return x * x
        else:
            return sqrt(2.0 * x - 0.5)


def run_chunk(model, st, tp, double[:, ::1] noise,
              double[:, ::1] tr_pos, double[:, ::1] tr_act,
              double[::1] tr_v, double[::1] tr_dl, double[::1] tr_rr, int k0):
    """Advance up to noise.shape[0] steps from k0; returns (next_step, status)."""
    # --- model constants
    cdef int arch = model.arch
    cdef int n_in = model.n_in
    cdef int n_ag = model.n_agent
    cdef int copies = model.copies
    cdef bint has_wm = model.has_wm
    cdef int act_kind = model.act_kind
    cdef double act_theta = model.act_theta
    cdef double act_gain = model.act_gain
    cdef double dt = model.dt
    cdef double al = model.alpha
    cdef double one_m = 1.0 - al
    cdef double kq = sqrt(model.sigma_actor ** 2 / al)
    cdef double kc = sqrt(model.sigma_critic ** 2 / al)
    cdef double kr = sqrt(model.sigma_reservoir ** 2 / al)
    cdef double kb = sqrt(model.sigma_bump ** 2 / al)
    cdef double lam = model.reservoir_gain
    cdef double res_theta = model.reservoir_theta
    cdef double sig_pc = model.sigma_place
    cdef double cue_gain = model.cue_gain
    cdef int n_cues = model.n_cues
    cdef int n_bump = model.n_bump
    cdef int M = model.M
    cdef double gM = model.action_gain / M
    cdef double tau_g = model.tau_g
    cdef bint td_forward = model.td_forward
    cdef double eta_a = model.eta_actor
    cdef double eta_c = model.eta_critic

    # --- weights / geometry
    cdef double[:, ::1] W_in = model.W_in
    cdef double[:, ::1] W_rec = model.W_rec
    cdef double[:, ::1] W_lat = model.W_lat
    cdef double[:, ::1] W_bump = model.W_bump
    cdef double[:, ::1] W_cue_bump = model.W_cue_bump
    cdef double[:, ::1] W_actor = model.W_actor
    cdef double[::1] W_critic = model.W_critic
    cdef double[:, ::1] centers = model.place_centers
    cdef double[::1] sin_dirs = model.sin_dirs
    cdef double[::1] cos_dirs = model.cos_dirs
    cdef int n_pc = centers.shape[0]

    # --- state
    cdef double[::1] q = st.q
    cdef double[::1] rho = st.rho
    cdef double[::1] zeta = st.zeta
    cdef double[::1] x_res = st.x_res
    cdef double[::1] x_b = st.x_b
    cdef double[::1] pos = st.pos
    cdef double[::1] sc = st.sc
    cdef cnp.int64_t[::1] ic = st.ic
    cdef double[::1] u_in = st.u_in
    cdef double[::1] r_ag = st.r_ag
    cdef double[::1] pre = st.pre
    cdef double[::1] tnh = st.tnh
    cdef double[::1] qd = st.qd
    cdef double[::1] bd = st.bd
    cdef int n_res = x_res.shape[0]

    # --- trial params
    cdef double target_x = tp.target_x
    cdef double target_y = tp.target_y
    cdef double radius2 = tp.radius2
    cdef int cue_idx0 = tp.cue_idx0
    cdef double R = tp.R
    cdef bint deliver = tp.deliver
    cdef bint learn = tp.learn
    cdef int n_steps = tp.n_steps
    cdef int cue_on_steps = tp.cue_on_steps
    cdef double tau_rise = tp.tau_rise
    cdef double tau_decay = tp.tau_decay
    cdef double consume_thresh = tp.consume_thresh

    cdef double inv_dtau = 1.0 / (tau_decay - tau_rise)
    cdef double dec_rise = 1.0 - dt / tau_rise
    cdef double dec_decay = 1.0 - dt / tau_decay
    cdef double alpha_g = dt / tau_g
    cdef double half = 0.8, lim = 0.79
    cdef double inv2s2 = 1.0 / (2.0 * sig_pc * sig_pc)

    cdef int chunk = noise.shape[0]
    cdef int status = ST_RUNNING
    cdef int i, j, c, k, nc
    cdef bint found, in_cue_phase, cue_active
    cdef double px0, py0, px, py, dx, dy, v, rate, delta, ax, ay, s, drive, tmp
    cdef int inc = 1
    cdef double fone = 1.0, fzero = 0.0

    for i in range(chunk):
        k = k0 + i
        px0 = pos[0]
        py0 = pos[1]
        found = ic[0] >= 0

        if cue_on_steps >= 0:
            in_cue_phase = k < cue_on_steps
            cue_active = in_cue_phase or (found and k == ic[0] + 1)
        else:
            in_cue_phase = False
            cue_active = cue_idx0 >= 0

        if not found:
            dx = px0 - target_x
            dy = py0 - target_y
            if dx * dx + dy * dy <= radius2:
                if ic[1] < 0:
                    ic[1] = k
                if deliver:
                    ic[0] = k
                    found = True
                    sc[2] += R
                    sc[3] += R

        nc = 0
        for j in range(n_cues):
            u_in[n_pc + j] = 0.0
        if cue_active and cue_idx0 >= 0:
            u_in[n_pc + cue_idx0] = cue_gain

        if has_wm:
            # membrane update reads omega(x_b) from bd, so fill bd first
            for j in range(n_bump):
                bd[j] = act_scalar(x_b[j], ACT_OMEGA, 0.0, 0.0)
            for j in range(n_bump):
                drive = 0.0
                for c in range(n_bump):
                    drive += W_bump[j, c] * bd[c]
                if cue_active and cue_idx0 >= 0:
                    drive += W_cue_bump[j, cue_idx0] * cue_gain
                x_b[j] = one_m * x_b[j] + al * (drive + kb * noise[i, j])
            nc = n_bump
            for j in range(n_bump):
                u_in[n_in - n_bump + j] = x_b[j] if x_b[j] > 0.0 else 0.0

        if in_cue_phase:
            for j in range(n_pc):
                u_in[j] = 0.0
        else:
            for j in range(n_pc):
                dx = centers[j, 0] - px0
                dy = centers[j, 1] - py0
                u_in[j] = exp(-(dx * dx + dy * dy) * inv2s2)

        if arch == ARCH_CLASSIC:
            for j in range(n_in):
                r_ag[j] = u_in[j]
        elif arch == ARCH_EXPANDED:
            for c in range(copies):
                for j in range(n_in):
                    r_ag[c * n_in + j] = u_in[j]
        elif arch == ARCH_HIDDEN:
            dgemv("t", &n_in, &n_ag, &fone, &W_in[0, 0], &n_in,
                  &u_in[0], &inc, &fzero, &pre[0], &inc)
            for j in range(n_ag):
                r_ag[j] = act_scalar(pre[j], act_kind, act_theta, act_gain)
        else:  # reservoir
            for j in range(n_res):
                tnh[j] = tanh(x_res[j])
            dgemv("t", &n_in, &n_res, &fone, &W_in[0, 0], &n_in,
                  &u_in[0], &inc, &fzero, &pre[0], &inc)
            dgemv("t", &n_res, &n_res, &lam, &W_rec[0, 0], &n_res,
                  &tnh[0], &inc, &fone, &pre[0], &inc)
            for j in range(n_res):
                x_res[j] = one_m * x_res[j] + al * (pre[j] + kr * noise[i, nc + j])
                r_ag[j] = x_res[j] if x_res[j] > res_theta else 0.0
            nc += n_res

        # critic
        drive = ddot(&n_ag, &W_critic[0], &inc, &r_ag[0], &inc)
        zeta[0] = one_m * zeta[0] + al * (drive + kc * noise[i, nc])
        nc += 1
        v = zeta[0] if zeta[0] > 0.0 else 0.0

        # actor: qd = W_actor^T r_ag + W_lat rho_prev
        dgemv("n", &M, &n_ag, &fone, &W_actor[0, 0], &M, &r_ag[0], &inc, &fzero, &qd[0], &inc)
        dgemv("t", &M, &M, &fone, &W_lat[0, 0], &M, &rho[0], &inc, &fone, &qd[0], &inc)
        for j in range(M):
            q[j] = one_m * q[j] + al * (qd[j] + kq * noise[i, nc + j])
            rho[j] = q[j] if q[j] > 0.0 else 0.0

        if in_cue_phase or found:
            ax = 0.0
            ay = 0.0
        else:
            ax = 0.0
            ay = 0.0
            for j in range(M):
                ax += rho[j] * sin_dirs[j]
                ay += rho[j] * cos_dirs[j]
            ax *= gM
            ay *= gM
            px = px0 + ax * dt
            py = py0 + ay * dt
            if px > half:
                px = lim
            elif px < -half:
                px = -lim
            if py > half:
                py = lim
            elif py < -half:
                py = -lim
            pos[0] = px
            pos[1] = py

        rate = (sc[3] - sc[2]) * inv_dtau
        sc[4] += rate * dt
        sc[2] *= dec_rise
        sc[3] *= dec_decay

        if k == 0:
            delta = 0.0
        elif td_forward:
            delta = sc[1] + (v - (1.0 + alpha_g) * sc[0]) / dt
        else:
            delta = rate + ((1.0 - alpha_g) * v - sc[0]) / dt

        if learn and delta != 0.0:
            s = dt * eta_c * delta
            daxpy(&n_ag, &s, &r_ag[0], &inc, &W_critic[0], &inc)
            s = dt * eta_a * delta
            dger(&M, &n_ag, &s, &rho[0], &inc, &r_ag[0], &inc, &W_actor[0, 0], &M)

        tr_pos[k, 0] = px0
        tr_pos[k, 1] = py0
        tr_act[k, 0] = ax
        tr_act[k, 1] = ay
        tr_v[k] = v
        tr_dl[k] = delta
        tr_rr[k] = rate

        sc[0] = v
        sc[1] = rate
        ic[2] = k + 1

        if not (isfinite(v) and isfinite(q[0]) and isfinite(pos[0])):
            status = ST_ABORTED
            break
        if found and sc[4] >= consume_thresh:
            status = ST_CONSUMED
            break
        if k + 1 == n_steps:
            status = ST_TIMEOUT
            break

    ic[3] = status
    return int(ic[2]), status
