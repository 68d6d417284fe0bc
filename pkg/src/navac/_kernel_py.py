"""Pure-numpy trial-step kernel: the reference implementation.

The compiled kernel (navac._kernel) follows this step-for-step, consuming the
same pre-drawn noise rows, so the two backends agree up to floating-point
summation order.

Per-step pipeline (step index k, noise row layout [bump | reservoir | critic | actor]):

  1. cue/silencing flags (transient protocol: first cue_on_steps steps have the
     cue on with place input and actions silenced; the cue is re-presented for
     the step right after the reward is found)
  2. reward-find check at the current (pre-move) position; on delivery both
     kernel states jump by R
  3. working-memory ring update (omega recurrence), rates = relu
  4. place rates at the current position, input composition
  5. architecture forward -> r_agent (reservoir integrates its membrane here)
  6. critic update, v = relu(zeta)
  7. actor update (lateral term uses the previous step's rates), rho = relu(q)
  8. action from the ring vector sum; position update with per-axis clamping
     (skipped while silenced or during consummation)
  9. reward kernel: emit rate, accumulate consumed, Euler-decay both states
 10. TD error (0 at k = 0); scheme forward uses r(t-dt), backward uses r(t)
 11. two-factor critic / three-factor actor updates (training trials only)
 12. record (pre-move position, action, v, delta, rate); roll v_prev/r_prev
"""

from __future__ import annotations

import numpy as np

from .agents import (ARCH_CLASSIC, ARCH_EXPANDED, ARCH_HIDDEN, ARCH_RESERVOIR,
                     IC_FIRST_HIT, IC_FOUND, IC_STATUS, IC_STEP,
                     SC_CONSUMED, SC_K_DECAY, SC_K_RISE, SC_R_PREV, SC_V_PREV,
                     ST_ABORTED, ST_CONSUMED, ST_RUNNING, ST_TIMEOUT)
from .neurodyn import activate, omega

BACKEND = "python"


def run_chunk(model, st, tp, noise, tr_pos, tr_act, tr_v, tr_dl, tr_rr, k0):
    """Advance up to noise.shape[0] steps from k0; returns (next_step, status)."""
    al = model.alpha
    dt = model.dt
    one_m = 1.0 - al
    kq = np.sqrt(model.sigma_actor ** 2 / al)
    kc = np.sqrt(model.sigma_critic ** 2 / al)
    kr = np.sqrt(model.sigma_reservoir ** 2 / al)
    kb = np.sqrt(model.sigma_bump ** 2 / al)
    inv_dtau = 1.0 / (tp.tau_decay - tp.tau_rise)
    dec_rise = 1.0 - dt / tp.tau_rise
    dec_decay = 1.0 - dt / tp.tau_decay
    gM = model.action_gain / model.M
    alpha_g = dt / model.tau_g
    half, lim = 0.8, 0.79
    sc, ic = st.sc, st.ic
    n_res = st.x_res.shape[0]
    status = ST_RUNNING

    for i in range(noise.shape[0]):
        k = k0 + i
        px0, py0 = st.pos[0], st.pos[1]
        found = ic[IC_FOUND] >= 0

        if tp.cue_on_steps >= 0:
            in_cue_phase = k < tp.cue_on_steps
            cue_active = in_cue_phase or (found and k == ic[IC_FOUND] + 1)
        else:
            in_cue_phase = False
            cue_active = tp.cue_idx0 >= 0

        if not found:
            dx = px0 - tp.target_x
            dy = py0 - tp.target_y
            if dx * dx + dy * dy <= tp.radius2:
                if ic[IC_FIRST_HIT] < 0:
                    ic[IC_FIRST_HIT] = k
                if tp.deliver:
                    ic[IC_FOUND] = k
                    found = True
                    sc[SC_K_RISE] += tp.R
                    sc[SC_K_DECAY] += tp.R

        nc = 0
        cue_slice = st.u_in[model.place_centers.shape[0]:model.place_centers.shape[0] + model.n_cues]
        cue_slice[:] = 0.0
        if cue_active and tp.cue_idx0 >= 0:
            cue_slice[tp.cue_idx0] = model.cue_gain

        if model.has_wm:
            drive_b = model.W_cue_bump @ cue_slice + model.W_bump @ omega(st.x_b)
            st.x_b[:] = one_m * st.x_b + al * (drive_b + kb * noise[i, :model.n_bump])
            nc = model.n_bump
            st.u_in[model.n_in - model.n_bump:] = np.maximum(st.x_b, 0.0)

        n_pc = model.place_centers.shape[0]
        if in_cue_phase:
            st.u_in[:n_pc] = 0.0
        else:
            d2 = (model.place_centers[:, 0] - px0) ** 2 + (model.place_centers[:, 1] - py0) ** 2
            st.u_in[:n_pc] = np.exp(-d2 / (2.0 * model.sigma_place ** 2))

        if model.arch == ARCH_CLASSIC:
            st.r_ag[:] = st.u_in
        elif model.arch == ARCH_EXPANDED:
            st.r_ag[:] = np.tile(st.u_in, model.copies)
        elif model.arch == ARCH_HIDDEN:
            st.r_ag[:] = activate(model.W_in @ st.u_in, model.act_kind,
                                  model.act_theta, model.act_gain)
        else:  # reservoir
            drive_r = model.W_in @ st.u_in + model.reservoir_gain * (model.W_rec @ np.tanh(st.x_res))
            st.x_res[:] = one_m * st.x_res + al * (drive_r + kr * noise[i, nc:nc + n_res])
            nc += n_res
            st.r_ag[:] = np.where(st.x_res > model.reservoir_theta, st.x_res, 0.0)

        st.zeta[0] = one_m * st.zeta[0] + al * (model.W_critic @ st.r_ag + kc * noise[i, nc])
        nc += 1
        v = st.zeta[0] if st.zeta[0] > 0.0 else 0.0

        qd = model.W_actor.T @ st.r_ag + model.W_lat @ st.rho
        st.q[:] = one_m * st.q + al * (qd + kq * noise[i, nc:nc + model.M])
        np.maximum(st.q, 0.0, out=st.rho)

        if in_cue_phase or found:
            ax = ay = 0.0
        else:
            ax = gM * (st.rho @ model.sin_dirs)
            ay = gM * (st.rho @ model.cos_dirs)
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
            st.pos[0] = px
            st.pos[1] = py

        rate = (sc[SC_K_DECAY] - sc[SC_K_RISE]) * inv_dtau
        sc[SC_CONSUMED] += rate * dt
        sc[SC_K_RISE] *= dec_rise
        sc[SC_K_DECAY] *= dec_decay

        if k == 0:
            delta = 0.0
        elif model.td_forward:
            delta = sc[SC_R_PREV] + (v - (1.0 + alpha_g) * sc[SC_V_PREV]) / dt
        else:
            delta = rate + ((1.0 - alpha_g) * v - sc[SC_V_PREV]) / dt

        if tp.learn and delta != 0.0:
            model.W_critic += (dt * model.eta_critic * delta) * st.r_ag
            model.W_actor += (dt * model.eta_actor * delta) * np.outer(st.r_ag, st.rho)

        tr_pos[k, 0] = px0
        tr_pos[k, 1] = py0
        tr_act[k, 0] = ax
        tr_act[k, 1] = ay
        tr_v[k] = v
        tr_dl[k] = delta
        tr_rr[k] = rate

        sc[SC_V_PREV] = v
        sc[SC_R_PREV] = rate
        ic[IC_STEP] = k + 1

        if not (np.isfinite(v) and np.isfinite(st.q[0]) and np.isfinite(st.pos[0])):
            status = ST_ABORTED
            break
        if found and sc[SC_CONSUMED] >= tp.consume_thresh:
            status = ST_CONSUMED
            break
        if k + 1 == tp.n_steps:
            status = ST_TIMEOUT
            break

    ic[IC_STATUS] = status
    return int(ic[IC_STEP]), status
