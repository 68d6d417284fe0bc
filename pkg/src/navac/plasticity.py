"""Temporal-difference error (both discretizations) and the weight-update rules.

The TD error discretizes delta = r + dv/dt - v/tau_g. The forward scheme
evaluates r and the leak at the start of the interval, the backward scheme at
the end. The backward scheme is algebraically the discrete TD error
r + gamma v_d(t) - v_d(t-1) under gamma = 1 - dt/tau_g, v_d = v/dt.
"""

from __future__ import annotations

import numpy as np


def td_error_forward(r_prev, v_prev, v_now, dt: float, tau_g: float):
    """delta = r(t-dt) + [v(t) - (1 + dt/tau_g) v(t-dt)] / dt  (default scheme)."""
    alpha = dt / tau_g
    return np.asarray(r_prev) + (np.asarray(v_now) - (1.0 + alpha) * np.asarray(v_prev)) / dt


def td_error_backward(r_now, v_prev, v_now, dt: float, tau_g: float):
    """delta = r(t) + [(1 - dt/tau_g) v(t) - v(t-dt)] / dt."""
    alpha = dt / tau_g
    return np.asarray(r_now) + ((1.0 - alpha) * np.asarray(v_now) - np.asarray(v_prev)) / dt


def update_critic(W: np.ndarray, r_pre: np.ndarray, delta: float, eta: float, dt: float) -> None:
    """2-factor rule, in place: W += dt * eta * delta * r_pre."""
    W += (dt * eta * delta) * r_pre


def update_actor(W: np.ndarray, r_pre: np.ndarray, rho_post: np.ndarray, delta: float,
                 eta: float, dt: float) -> None:
    """3-factor rule, in place: W += dt * eta * delta * outer(r_pre, rho_post)."""
    W += (dt * eta * delta) * np.outer(r_pre, rho_post)
