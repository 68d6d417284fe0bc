"""Rate-based neural dynamics: activation family, ring/bump weight construction,
and the Euler-Maruyama population updates.

Every population integrates
    x <- (1 - a) x + a (drive + sqrt(sigma^2 / a) xi),   a = dt / tau,
with xi standard normal, so the continuous-time stationary statistics are
recovered as dt -> 0 and the discrete stationary variance is sigma^2/(2 - a).
"""

from __future__ import annotations

import numpy as np

# activation kind codes shared with the compiled kernel
ACT_RELU = 0
ACT_LRELU = 1
ACT_ELU = 2
ACT_SOFTPLUS = 3
ACT_TANH = 4
ACT_SIGMOID = 5
ACT_LINEAR = 6
ACT_PHI_A = 7
ACT_PHI_B = 8
ACT_OMEGA = 9

ACT_CODES = {
    "relu": ACT_RELU, "lrelu": ACT_LRELU, "elu": ACT_ELU, "softplus": ACT_SOFTPLUS,
    "tanh": ACT_TANH, "sigmoid": ACT_SIGMOID, "linear": ACT_LINEAR,
    "phi_a": ACT_PHI_A, "phi_b": ACT_PHI_B, "omega": ACT_OMEGA,
}

LRELU_SLOPE = 0.01


def activate(x, kind: int, theta: float = 0.0, gain: float = 0.2):
    """Apply one member of the activation family elementwise."""
    x = np.asarray(x, dtype=np.float64)
    if kind == ACT_RELU:
        return np.maximum(x, 0.0)
    if kind == ACT_LRELU:
        return np.where(x > 0.0, x, LRELU_SLOPE * x)
    if kind == ACT_ELU:
        return np.where(x > 0.0, x, np.expm1(np.minimum(x, 0.0)))
    if kind == ACT_SOFTPLUS:
        # overflow-safe log(1 + e^x)
        return np.logaddexp(0.0, x)
    if kind == ACT_TANH:
        return np.tanh(x)
    if kind == ACT_SIGMOID:
        return 1.0 / (1.0 + np.exp(-x))
    if kind == ACT_LINEAR:
        return gain * x
    if kind == ACT_PHI_A:
        return np.where(x > theta, x, 0.0)
    if kind == ACT_PHI_B:
        return np.where(x > theta, x, theta)
    if kind == ACT_OMEGA:
        return omega(x)
    raise ValueError(f"unknown activation kind code {kind}")


def omega(x):
    """Piecewise map used on the bump recurrence: 0, x^2, sqrt(2x - 1/2)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    mid = (x > 0.0) & (x <= 0.5)
    hi = x > 0.5
    out[mid] = x[mid] ** 2
    out[hi] = np.sqrt(2.0 * x[hi] - 0.5)
    return out


def ring_weights(M: int, w_minus: float, w_plus: float, phi: float) -> np.ndarray:
    """Lateral weights of the direction ring.

    W_kh = w-/M + w+ * f(k,h) / sum_h f(k,h), f = (1 - delta_kh) exp(phi cos(th_k - th_h)).
    The exponent is computed with its max subtracted; normalization makes the
    shift exact. Rows sum to w- + w+; diagonal is w-/M.
    """
    theta = 2.0 * np.pi * np.arange(M) / M
    d = theta[:, None] - theta[None, :]
    f = np.exp(phi * (np.cos(d) - 1.0))
    np.fill_diagonal(f, 0.0)
    f /= f.sum(axis=1, keepdims=True)
    return w_minus / M + w_plus * f


def bump_weights(n: int, w_minus: float, phi: float) -> np.ndarray:
    """Recurrent weights of the working-memory ring.

    Unlike ring_weights there is no excitatory prefactor and no diagonal mask:
    W_kh = w-/n + f(k,h)/sum_h f(k,h) with f = exp(phi cos(th_k - th_h)).
    Rows sum to w- + 1.
    """
    theta = 2.0 * np.pi * np.arange(n) / n
    d = theta[:, None] - theta[None, :]
    f = np.exp(phi * (np.cos(d) - 1.0))
    f /= f.sum(axis=1, keepdims=True)
    return w_minus / n + f


def cue_bump_weights(n_bump: int, n_cues: int) -> np.ndarray:
    """(n_bump, n_cues) map: cue i drives 3 adjacent ring units with total weight 1."""
    per = n_bump // n_cues
    W = np.zeros((n_bump, n_cues), dtype=np.float64)
    for c in range(n_cues):
        for j in range(per):
            W[per * c + j, c] = 1.0 / per
    return W


def em_update(state, drive, alpha: float, sigma: float, noise):
    """Shared Euler-Maruyama membrane update."""
    return (1.0 - alpha) * np.asarray(state) + alpha * (
        np.asarray(drive) + np.sqrt(sigma * sigma / alpha) * np.asarray(noise))


def actor_step(q, rho_prev, drive, W_lateral, dt, tau, sigma, noise):
    """One actor-ring step; returns (q', rho'). drive is W_actor^T r_agent."""
    alpha = dt / tau
    q_new = em_update(q, drive + W_lateral @ rho_prev, alpha, sigma, noise)
    return q_new, np.maximum(q_new, 0.0)


def ring_action(rho, sin_dirs, cos_dirs, action_gain: float) -> np.ndarray:
    """Velocity command: (action_gain / M) * sum_k rho_k [sin th_k, cos th_k]."""
    M = rho.shape[0]
    return (action_gain / M) * np.array([rho @ sin_dirs, rho @ cos_dirs])


def critic_step(zeta, drive, dt, tau, sigma, noise):
    """One critic step; returns (zeta', v')."""
    alpha = dt / tau
    z_new = (1.0 - alpha) * zeta + alpha * (drive + np.sqrt(sigma * sigma / alpha) * noise)
    return z_new, max(z_new, 0.0)


def reservoir_step(x, u_drive, W_rec, lam, dt, tau, sigma, noise, theta=3.0):
    """One recurrent-reservoir step; rates read out through phi_a(x, theta)."""
    alpha = dt / tau
    x_new = em_update(x, u_drive + lam * (W_rec @ np.tanh(x)), alpha, sigma, noise)
    return x_new, activate(x_new, ACT_PHI_A, theta=theta)


def bump_step(x_b, cue_drive, W_bump, dt, tau, sigma, noise):
    """One working-memory ring step; the recurrence passes through omega."""
    alpha = dt / tau
    x_new = em_update(x_b, cue_drive + W_bump @ omega(x_b), alpha, sigma, noise)
    return x_new, np.maximum(x_new, 0.0)
