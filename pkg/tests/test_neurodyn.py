import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from navac import neurodyn as nd

DT, TAU = 0.1, 0.15


# ---------------------------------------------------------------------------
# activation family

def test_relu_family_basics():
    x = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
    assert np.allclose(nd.activate(x, nd.ACT_RELU), [0, 0, 0, 0.5, 2.0])
    assert np.allclose(nd.activate(x, nd.ACT_LRELU), [-0.02, -0.005, 0, 0.5, 2.0])
    assert np.allclose(nd.activate(x, nd.ACT_ELU), np.where(x > 0, x, np.expm1(x)))
    assert np.allclose(nd.activate(x, nd.ACT_SOFTPLUS), np.log1p(np.exp(x)))
    assert np.allclose(nd.activate(x, nd.ACT_TANH), np.tanh(x))
    assert np.allclose(nd.activate(x, nd.ACT_SIGMOID), 1 / (1 + np.exp(-x)))
    assert np.allclose(nd.activate(x, nd.ACT_LINEAR, gain=0.2), 0.2 * x)


def test_linear_gain_example():
    assert nd.activate(np.array([5.0]), nd.ACT_LINEAR, gain=0.2)[0] == pytest.approx(1.0)


def test_phi_thresholds():
    assert nd.activate(np.array([2.0]), nd.ACT_PHI_A, theta=3.0)[0] == 0.0
    assert nd.activate(np.array([4.0]), nd.ACT_PHI_A, theta=3.0)[0] == 4.0
    assert nd.activate(np.array([2.0]), nd.ACT_PHI_B, theta=3.0)[0] == 3.0
    assert nd.activate(np.array([5.0]), nd.ACT_PHI_B, theta=3.0)[0] == 5.0


def test_phi_a_zero_equals_relu_exactly():
    x = np.random.default_rng(0).normal(0, 3, 10 ** 5)
    a = nd.activate(x, nd.ACT_PHI_A, theta=0.0)
    b = nd.activate(x, nd.ACT_RELU)
    assert np.array_equal(a, b)


def test_omega_branches():
    assert nd.omega(np.array([-1.0]))[0] == 0.0
    assert nd.omega(np.array([0.25]))[0] == pytest.approx(0.0625)
    assert nd.omega(np.array([0.5]))[0] == pytest.approx(0.25)     # boundary on x^2 side
    assert nd.omega(np.array([1.0]))[0] == pytest.approx(np.sqrt(1.5))


@given(st.floats(-50, 50))
@settings(max_examples=200, deadline=None)
def test_nonnegative_rate_paths(x):
    for kind, kw in ((nd.ACT_RELU, {}), (nd.ACT_PHI_A, {"theta": 3.0}), (nd.ACT_OMEGA, {})):
        assert nd.activate(np.array([x]), kind, **kw)[0] >= 0.0


def test_softplus_overflow_safe():
    out = nd.activate(np.array([1000.0, -1000.0]), nd.ACT_SOFTPLUS)
    assert np.isfinite(out).all() and out[0] == pytest.approx(1000.0)


# ---------------------------------------------------------------------------
# ring / bump weight construction

def test_ring_weights_identities():
    W = nd.ring_weights(40, -1.0, 1.0, 20.0)
    assert np.allclose(W.sum(axis=1), 0.0, atol=1e-12)
    assert np.allclose(W, W.T, atol=1e-12)
    assert np.allclose(np.diag(W), -1.0 / 40, atol=1e-15)


def test_ring_weights_phi_zero_uniform():
    W = nd.ring_weights(8, -1.0, 1.0, 0.0)
    off = W[0, 1:]
    assert np.allclose(off, -1.0 / 8 + 1.0 / 7, atol=1e-14)


@given(st.integers(3, 64), st.floats(0.0, 400.0))
@settings(max_examples=60, deadline=None)
def test_ring_weights_rowsum_property(M, phi):
    W = nd.ring_weights(M, -1.0, 1.0, phi)
    assert np.all(np.isfinite(W))
    assert np.allclose(W.sum(axis=1), 0.0, atol=1e-12)


def test_bump_weights_rowsum_quarter():
    W = nd.bump_weights(54, -0.75, 300.0)
    assert np.allclose(W.sum(axis=1), 0.25, atol=1e-12)
    assert np.all(np.isfinite(W))
    # no diagonal mask here: self-coupling carries the f-term peak
    assert W[0, 0] == W[0].max()


def test_cue_bump_weights_triplets():
    W = nd.cue_bump_weights(54, 18)
    assert W.shape == (54, 18)
    for c in range(18):
        nz = np.flatnonzero(W[:, c])
        assert nz.tolist() == [3 * c, 3 * c + 1, 3 * c + 2]
        assert W[:, c].sum() == pytest.approx(1.0)
    assert np.allclose(W.sum(axis=1), 1.0 / 3)


# ---------------------------------------------------------------------------
# Euler-Maruyama updates

def test_actor_leak_example():
    q = np.ones(40)
    q2, rho = nd.actor_step(q, np.zeros(40), np.zeros(40), np.zeros((40, 40)),
                            DT, TAU, 0.0, np.zeros(40))
    assert np.allclose(q2, 1.0 - DT / TAU)
    assert np.allclose(q2, 1.0 / 3.0)
    assert np.allclose(rho, q2)


def test_action_symmetric_rates_cancel():
    theta = 2 * np.pi * np.arange(40) / 40
    a = nd.ring_action(np.ones(40), np.sin(theta), np.cos(theta), 0.03)
    assert np.allclose(a, 0.0, atol=1e-15)


def test_action_single_active_neuron():
    theta = 2 * np.pi * np.arange(40) / 40
    rho = np.zeros(40)
    rho[5] = 1.0
    a = nd.ring_action(rho, np.sin(theta), np.cos(theta), 0.03)
    assert np.allclose(a, (0.03 / 40) * np.array([np.sin(theta[5]), np.cos(theta[5])]))


def test_critic_rectification_and_rest():
    z, v = nd.critic_step(-0.5, 0.0, DT, TAU, 0.0, 0.0)
    assert v == 0.0
    z, v = nd.critic_step(0.0, 0.0, DT, TAU, 0.0, 0.0)
    assert z == 0.0 and v == 0.0


@pytest.mark.parametrize("stepper", ["actor", "critic", "reservoir"])
def test_fixed_point_convergence(stepper):
    D = 0.7
    if stepper == "critic":
        z = 0.0
        for _ in range(400):
            z, v = nd.critic_step(z, D, DT, TAU, 0.0, 0.0)
        assert abs(z - D) < 1e-6
    elif stepper == "actor":
        q = np.zeros(4)
        for _ in range(400):
            q, _ = nd.actor_step(q, np.zeros(4), np.full(4, D), np.zeros((4, 4)),
                                 DT, TAU, 0.0, np.zeros(4))
        assert np.allclose(q, D, atol=1e-6)
    else:
        x = np.full(8, 9.0)
        for _ in range(400):
            x, _ = nd.reservoir_step(x, np.full(8, D), np.zeros((8, 8)), 1.5,
                                     DT, TAU, 0.0, np.zeros(8))
        assert np.allclose(x, D, atol=1e-6)


def test_reservoir_leak_and_readout_examples():
    x, rates = nd.reservoir_step(np.array([9.0]), np.zeros(1), np.zeros((1, 1)),
                                 1.5, DT, TAU, 0.0, np.zeros(1))
    assert x[0] == pytest.approx(3.0)
    r = nd.activate(np.array([2.0, 5.0]), nd.ACT_PHI_A, theta=3.0)
    assert r.tolist() == [0.0, 5.0]


def test_reservoir_sustained_activity_band():
    rng = np.random.default_rng(11)
    n = 1024
    W_rec = rng.normal(0.0, np.sqrt(1.0 / n), (n, n))
    x = rng.normal(0.0, 0.025, n)
    drive = rng.uniform(-1, 1, n) * 0.5 + 1.0       # sustained heterogeneous input
    norm_at = {}
    for k in range(1, 101):
        x, _ = nd.reservoir_step(x, drive, W_rec, 1.5, DT, TAU, 0.025,
                                 rng.standard_normal(n))
        if k in (10, 100):                           # t = 1 s and t = 10 s
            norm_at[k] = np.linalg.norm(x)
    ratio = norm_at[100] / norm_at[10]
    assert 0.1 <= ratio <= 10.0


def test_bump_zero_fixed_point():
    x = np.zeros(54)
    W = nd.bump_weights(54, -0.75, 300.0)
    for _ in range(50):
        x, rates = nd.bump_step(x, np.zeros(54), W, DT, TAU, 0.0, np.zeros(54))
    assert np.allclose(x, 0.0) and np.allclose(rates, 0.0)


def test_em_stationary_variance():
    # discrete-chain stationary variance sigma^2/(2 - alpha); continuous
    # limit sigma^2/2 recovered at small alpha
    rng = np.random.default_rng(5)
    for dt, n_steps in ((0.1, 4000), (0.0015, 40000)):
        alpha = dt / TAU
        sigma = 0.25
        x = np.zeros(500)
        samples = []
        for k in range(n_steps):
            x = nd.em_update(x, 0.0, alpha, sigma, rng.standard_normal(500))
            if k > n_steps // 4:
                samples.append(x.copy())
        var = np.concatenate(samples).var()
        assert var == pytest.approx(sigma ** 2 / (2 - alpha), rel=0.05)
    assert 0.25 ** 2 / (2 - 0.0015 / TAU) == pytest.approx(0.25 ** 2 / 2, rel=0.006)
