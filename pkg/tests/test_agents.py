import numpy as np
import pytest

from navac import agents, neurodyn
from navac.config import AgentConfig, preset_agent


def _rng(n=0):
    return np.random.default_rng(np.random.SeedSequence(n))


def test_param_counts_match_published_table():
    cases = [
        (AgentConfig(architecture="classic"), 2747),
        (AgentConfig(architecture="expanded_classic", expanded_copies=16), 43952),
        (AgentConfig(architecture="expanded_classic", expanded_copies=123), 337881),
        (AgentConfig(architecture="linear_hidden", n_hidden=1024), 41984),
        (AgentConfig(architecture="nonlinear_hidden", n_hidden=8192), 335872),
        (AgentConfig(architecture="reservoir", n_hidden=1024), 41984),
    ]
    for cfg, want in cases:
        m = agents.build_model(cfg, _rng())
        assert m.param_count() == want
        assert m.W_actor.shape == (m.n_agent, 40)
        assert m.W_critic.shape == (m.n_agent,)


def test_trainable_weights_start_at_zero():
    m = agents.build_model(AgentConfig(architecture="nonlinear_hidden", n_hidden=64), _rng())
    assert np.all(m.W_actor == 0.0) and np.all(m.W_critic == 0.0)


def test_frozen_weights_reproducible_from_seed():
    cfg = AgentConfig(architecture="reservoir", n_hidden=128)
    a = agents.build_model(cfg, _rng(9))
    b = agents.build_model(cfg, _rng(9))
    assert np.array_equal(a.W_in, b.W_in) and np.array_equal(a.W_rec, b.W_rec)
    c = agents.build_model(cfg, _rng(10))
    assert not np.array_equal(a.W_in, c.W_in)


def test_w_rec_variance():
    cfg = AgentConfig(architecture="reservoir", n_hidden=1024)
    m = agents.build_model(cfg, _rng(1))
    assert m.W_rec.var() == pytest.approx(1.0 / 1024, rel=0.10)
    assert abs(m.W_rec.mean()) < 3e-4


def test_uniform_input_init_range():
    cfg = AgentConfig(architecture="nonlinear_hidden", n_hidden=512)
    m = agents.build_model(cfg, _rng(2))
    assert m.W_in.shape == (512, 67)
    assert m.W_in.min() >= -1.0 and m.W_in.max() <= 1.0
    assert m.W_in.min() < -0.99 and m.W_in.max() > 0.99


def test_k_split_counts_exact():
    cfg = AgentConfig(architecture="nonlinear_hidden", n_hidden=256)
    cfg.hidden_init.kind = "k_split"
    cfg.hidden_init.k_excitatory = 13
    m = agents.build_model(cfg, _rng(3))
    pos = (m.W_in > 0).sum(axis=1)
    neg = (m.W_in < 0).sum(axis=1)
    assert np.all(pos == 13)
    assert np.all(neg == 67 - 13)


def test_classic_rates_are_input():
    cfg = AgentConfig(architecture="classic")
    m = agents.build_model(cfg, _rng())
    U = np.random.default_rng(0).uniform(0, 1, (5, 67))
    assert np.array_equal(agents.forward_rates(m, U), U)


def test_expanded_rates_tile():
    cfg = AgentConfig(architecture="expanded_classic", expanded_copies=3)
    m = agents.build_model(cfg, _rng())
    U = np.random.default_rng(0).uniform(0, 1, (2, 67))
    R = agents.forward_rates(m, U)
    assert R.shape == (2, 201)
    assert np.array_equal(R[:, :67], U) and np.array_equal(R[:, 134:], U)


def test_linear_equals_nonlinear_with_linear_activation():
    base = AgentConfig(architecture="linear_hidden", n_hidden=64)
    m1 = agents.build_model(base, _rng(4))
    alt = AgentConfig(architecture="nonlinear_hidden", n_hidden=64)
    alt.activation.kind = "linear"
    alt.activation.gain = base.activation.gain
    m2 = agents.build_model(alt, _rng(4))
    U = np.random.default_rng(1).uniform(0, 1, (7, 67))
    assert np.allclose(agents.forward_rates(m1, U), agents.forward_rates(m2, U), atol=1e-15)


def test_forward_rates_rejects_reservoir():
    m = agents.build_model(AgentConfig(architecture="reservoir", n_hidden=32), _rng())
    with pytest.raises(ValueError):
        agents.forward_rates(m, np.zeros((1, 67)))


def test_reset_state_draw_statistics():
    cfg = AgentConfig(architecture="classic")
    m = agents.build_model(cfg, _rng())
    rng = _rng(6)
    qs, zs = [], []
    for _ in range(10 ** 4):
        st = agents.reset_state(m, np.array([0.0, -0.8]), rng)
        qs.append(st.q)
        zs.append(st.zeta[0])
    qs = np.concatenate(qs)
    assert np.std(qs) == pytest.approx(0.25, rel=0.05)
    assert np.std(zs) == pytest.approx(5e-4, rel=0.05)


def test_reset_replay_identical():
    cfg = AgentConfig(architecture="reservoir", n_hidden=64, working_memory=True)
    m = agents.build_model(cfg, _rng())
    a = agents.reset_state(m, np.array([0.0, -0.8]), _rng(7))
    b = agents.reset_state(m, np.array([0.0, -0.8]), _rng(7))
    assert np.array_equal(a.q, b.q) and np.array_equal(a.x_res, b.x_res)
    assert np.all(a.x_b == 0.0)                     # bump starts cleared
    assert np.all(a.sc == 0.0)                      # reward kernel cleared
    assert a.ic[agents.IC_FOUND] == -1              # found_step sentinel
    assert a.ic[agents.IC_FIRST_HIT] == -1


def test_noise_width_layout():
    m = agents.build_model(AgentConfig(architecture="classic"), _rng())
    assert m.noise_width == 1 + 40                  # critic + actor
    m = agents.build_model(AgentConfig(architecture="reservoir", n_hidden=64), _rng())
    assert m.noise_width == 64 + 1 + 40
    m = agents.build_model(
        AgentConfig(architecture="reservoir", n_hidden=64, working_memory=True), _rng())
    assert m.noise_width == 54 + 64 + 1 + 40


def test_ring_geometry_on_model():
    m = agents.build_model(AgentConfig(architecture="classic"), _rng())
    assert np.allclose(m.W_lat.sum(axis=1), 0.0, atol=1e-12)
    assert np.allclose(m.W_lat, m.W_lat.T, atol=1e-12)
    assert np.allclose(np.diag(m.W_lat), -0.025, atol=1e-15)
    theta = 2 * np.pi * np.arange(40) / 40
    assert np.allclose(m.sin_dirs, np.sin(theta))
    assert np.allclose(m.cos_dirs, np.cos(theta))


def test_activation_codes_cover_config_names():
    for name in ("relu", "lrelu", "elu", "softplus", "tanh", "sigmoid",
                 "linear", "phi_a", "phi_b", "omega"):
        assert name in neurodyn.ACT_CODES


def test_preset_sizes():
    assert preset_agent("nonlinear_hidden", "multi_pa").n_hidden == 8192
    assert preset_agent("nonlinear_hidden", "single_reward").n_hidden == 1024
    assert preset_agent("expanded_classic", "multi_pa").expanded_copies == 123
