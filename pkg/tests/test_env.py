import numpy as np
import pytest

from navac import env


def test_reward_grid_49_points_inside():
    g = env.reward_grid()
    assert g.shape == (49, 2)
    xs = sorted(set(g[:, 0]))
    assert np.allclose(xs, [-0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6])
    assert np.all(np.abs(g) < env.HALF_WIDTH)
    # spacing 0.2 between neighbouring lattice columns
    assert np.allclose(np.diff(xs), 0.2)


def test_start_positions_wall_midpoints():
    s = env.start_positions()
    assert sorted(map(tuple, s)) == [(-0.8, 0.0), (0.0, -0.8), (0.0, 0.8), (0.8, 0.0)]


def test_step_inside():
    p = env.step_position(np.array([0.0, 0.0]), np.array([0.1, 0.0]), 0.1)
    assert np.allclose(p, [0.01, 0.0])


def test_step_clamped_x():
    p = env.step_position(np.array([0.79, 0.0]), np.array([0.5, 0.0]), 0.1)
    assert np.allclose(p, [0.79, 0.0])


def test_step_corner_clamps_both_axes():
    p = env.step_position(np.array([0.79, 0.79]), np.array([0.5, 0.5]), 0.1)
    assert np.allclose(p, [0.79, 0.79])


def test_step_clamp_negative_wall():
    p = env.step_position(np.array([-0.75, 0.2]), np.array([-1.0, 0.0]), 0.1)
    assert np.allclose(p, [-0.79, 0.2])


def test_step_rejects_nonfinite():
    with pytest.raises(FloatingPointError):
        env.step_position(np.array([0.0, 0.0]), np.array([np.nan, 0.0]), 0.1)


def test_containment_fuzz():
    rng = np.random.default_rng(0)
    pos = np.array([0.5, -0.5])
    for _ in range(10 ** 5):
        act = rng.uniform(-30, 30, 2)
        pos = env.step_position(pos, act, 0.1)
        assert abs(pos[0]) <= env.HALF_WIDTH and abs(pos[1]) <= env.HALF_WIDTH


def test_at_reward_boundaries():
    c = np.array([0.2, 0.2])
    assert env.at_reward(c, c)
    assert env.at_reward(c + [0.0, 0.03], c)          # closed disc
    assert not env.at_reward(c + [0.0, 0.031], c)


def test_reward_rate_zero_at_acquisition():
    k = env.RewardKernel()
    rate = k.step(0.1, True, 1.0)
    assert rate == 0.0                                 # equal states cancel


def test_reward_rate_nonneg_and_peak_location():
    # fine-grid scan of the free decay after one acquisition
    dt = 1e-4
    k = env.RewardKernel()
    k.step(dt, True, 1.0)
    rates, t = [], []
    for i in range(int(2.0 / dt)):
        rates.append(k.step(dt, False, 1.0))
        t.append((i + 2) * dt)
    rates = np.array(rates)
    assert np.all(rates >= 0)
    t_peak = t[int(np.argmax(rates))]
    # analytic argmax of e^{-t/td} - e^{-t/tr}: ln(td/tr)*tr*td/(td-tr)
    expect = np.log(0.25 / 0.12) * 0.12 * 0.25 / (0.25 - 0.12)
    assert abs(t_peak - expect) < 5e-3
    assert abs(expect - 0.169) < 1e-3


@pytest.mark.parametrize("dt,tol", [(0.1, 0.01), (0.02, 0.01), (0.005, 0.001), (0.001, 0.005)])
def test_reward_conservation(dt, tol):
    k = env.RewardKernel()
    total = k.step(dt, True, 1.0) * dt
    for _ in range(int(10.0 / dt)):
        total += k.step(dt, False, 1.0) * dt
    assert abs(total - 1.0) <= tol


def test_consumed_fraction_tracks_remaining():
    k = env.RewardKernel()
    k.step(0.1, True, 4.0)
    for _ in range(200):
        k.step(0.1, False, 4.0)
    assert k.consumed / 4.0 > 0.9999
    assert k.remaining() == pytest.approx(4.0 - k.consumed, abs=1e-9)


def test_consummation_duration_about_two_seconds():
    # 99.99% of R at dt = 0.1 takes ~19 steps with the Euler-decayed kernel
    k = env.RewardKernel()
    k.step(0.1, True, 1.0)
    n = 1
    while k.consumed < 0.9999:
        k.step(0.1, False, 1.0)
        n += 1
    assert 10 <= n <= 40
