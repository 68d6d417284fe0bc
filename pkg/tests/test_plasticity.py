import numpy as np
import pytest

from navac import plasticity as pl

TAU_G = 2.0


def test_forward_constant_value():
    # r = 0, constant v = V: delta = -V / tau_g
    d = pl.td_error_forward(0.0, 1.0, 1.0, 0.1, TAU_G)
    assert d == pytest.approx(-0.5)


def test_forward_reward_only():
    d = pl.td_error_forward(2.0, 0.0, 0.0, 0.1, TAU_G)
    assert d == pytest.approx(2.0)


def test_backward_matches_discrete_td():
    # backward form == r + gamma*v_d(t) - v_d(t-1) with gamma = 1 - dt/tau_g,
    # v_d = v/dt, exactly
    rng = np.random.default_rng(0)
    dt = 0.1
    gamma = 1.0 - dt / TAU_G
    r = rng.uniform(0, 5, 10 ** 4)
    v_prev = rng.uniform(0, 3, 10 ** 4)
    v_now = rng.uniform(0, 3, 10 ** 4)
    ours = pl.td_error_backward(r, v_prev, v_now, dt, TAU_G)
    discrete = r + gamma * (v_now / dt) - (v_prev / dt)
    assert np.max(np.abs(ours - discrete)) < 1e-12


def test_schemes_converge_as_dt_shrinks():
    # over a smooth (r, v) trace the two schemes differ by O(dt)
    t = np.linspace(0, 10, 2001)
    r = np.exp(-((t - 3.0) ** 2))
    v = 0.5 * np.sin(0.3 * t) + 0.5
    diffs = []
    for stride in (4, 2, 1):
        dt = (t[1] - t[0]) * stride
        rr, vv = r[::stride], v[::stride]
        f = pl.td_error_forward(rr[:-1], vv[:-1], vv[1:], dt, TAU_G)
        b = pl.td_error_backward(rr[1:], vv[:-1], vv[1:], dt, TAU_G)
        diffs.append(np.max(np.abs(f - b)))
    assert diffs[2] < diffs[1] < diffs[0]
    assert diffs[1] / diffs[2] == pytest.approx(2.0, rel=0.35)


def test_update_critic_examples():
    W = np.zeros(67)
    pl.update_critic(W, np.ones(67), 0.0, 1e-4, 0.1)
    assert np.all(W == 0.0)
    r_pre = np.zeros(67)
    r_pre[3] = 1.0
    pl.update_critic(W, r_pre, 2.0, 1e-4, 0.1)
    assert W[3] == pytest.approx(2e-5) and np.count_nonzero(W) == 1
    pl.update_critic(W, np.zeros(67), 5.0, 1e-4, 0.1)
    assert np.count_nonzero(W) == 1


def test_update_actor_rank_one():
    W = np.zeros((67, 40))
    r_pre = np.zeros(67)
    rho = np.zeros(40)
    r_pre[2] = 1.0
    rho[7] = 1.0
    pl.update_actor(W, r_pre, rho, 1.0, 1.0, 1.0)
    assert W[2, 7] == pytest.approx(1.0) and np.count_nonzero(W) == 1


def test_update_actor_zero_post_and_sign():
    W = np.zeros((5, 4))
    pl.update_actor(W, np.ones(5), np.zeros(4), 3.0, 1.0, 0.1)
    assert np.all(W == 0.0)
    pl.update_actor(W, np.ones(5), np.ones(4), -2.0, 1.0, 0.1)
    assert np.all(W < 0.0)


def test_update_linearity():
    rng = np.random.default_rng(1)
    r_pre = rng.uniform(0, 1, 9)
    rho = rng.uniform(0, 1, 4)
    Wa = np.zeros((9, 4))
    pl.update_actor(Wa, r_pre, rho, 0.7, 1e-2, 0.1)
    pl.update_actor(Wa, r_pre, rho, -0.2, 1e-2, 0.1)
    Wb = np.zeros((9, 4))
    pl.update_actor(Wb, r_pre, rho, 0.5, 1e-2, 0.1)
    assert np.allclose(Wa, Wb, atol=1e-15)
