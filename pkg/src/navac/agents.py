"""Agent assembly: the five architectures plus optional working memory.

build_model freezes every non-trainable weight from the weight RNG stream and
zero-initializes the trainable readouts. The per-step pipeline itself lives in
the backend kernels; this module owns construction, per-trial reset, and the
batch forward used for dimensionality analysis.

Reset draw order (from the dynamics stream, fixed for reproducibility):
actor membrane (M), critic membrane (1), reservoir membrane (n, reservoir
only). The bump membrane starts at zero. Weight-stream draw order: W_in rows
(hidden/reservoir), then W_rec (reservoir).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import encoding, neurodyn
from .config import AgentConfig, n_agent_units, n_input, trainable_param_count

ARCH_CLASSIC = 0
ARCH_EXPANDED = 1
ARCH_HIDDEN = 2
ARCH_RESERVOIR = 3

_ARCH_CODES = {
    "classic": ARCH_CLASSIC,
    "expanded_classic": ARCH_EXPANDED,
    "linear_hidden": ARCH_HIDDEN,
    "nonlinear_hidden": ARCH_HIDDEN,
    "reservoir": ARCH_RESERVOIR,
}

_EMPTY = np.zeros((0, 0), dtype=np.float64)


@dataclass
class AgentModel:
    """Frozen weights, trainable readouts, and stepping constants for one agent."""

    arch: int
    n_in: int
    n_agent: int
    copies: int
    has_wm: bool

    act_kind: int
    act_theta: float
    act_gain: float

    W_in: np.ndarray
    W_rec: np.ndarray
    W_lat: np.ndarray
    W_bump: np.ndarray
    W_cue_bump: np.ndarray
    W_actor: np.ndarray      # (n_agent, M), trainable
    W_critic: np.ndarray     # (n_agent,), trainable

    place_centers: np.ndarray
    sin_dirs: np.ndarray
    cos_dirs: np.ndarray

    dt: float
    alpha: float
    sigma_actor: float
    sigma_critic: float
    sigma_reservoir: float
    sigma_bump: float
    reservoir_gain: float
    reservoir_theta: float
    sigma_place: float
    cue_gain: float
    n_cues: int
    n_bump: int
    M: int
    action_gain: float

    tau_g: float
    td_forward: bool
    eta_actor: float
    eta_critic: float
    plastic: bool

    noise_width: int = 0

    def param_count(self) -> int:
        return self.W_actor.size + self.W_critic.size


@dataclass
class StepState:
    """Mutable per-trial state shared with the kernels (all arrays C-contiguous)."""

    q: np.ndarray            # (M,) actor membrane
    rho: np.ndarray          # (M,) actor rates (previous step's at entry to a step)
    zeta: np.ndarray         # (1,) critic membrane
    x_res: np.ndarray        # (n,) reservoir membrane or (0,)
    x_b: np.ndarray          # (n_bump,) bump membrane or (0,)
    pos: np.ndarray          # (2,)
    sc: np.ndarray           # float scratch: v_prev, r_prev, k_rise, k_decay, consumed
    ic: np.ndarray           # int64: found_step, first_hit_step, step, status
    u_in: np.ndarray = field(default=None)
    r_ag: np.ndarray = field(default=None)
    pre: np.ndarray = field(default=None)
    tnh: np.ndarray = field(default=None)
    qd: np.ndarray = field(default=None)
    bd: np.ndarray = field(default=None)


# sc indices
SC_V_PREV, SC_R_PREV, SC_K_RISE, SC_K_DECAY, SC_CONSUMED = range(5)
# ic indices
IC_FOUND, IC_FIRST_HIT, IC_STEP, IC_STATUS = range(4)
# status codes
ST_RUNNING, ST_CONSUMED, ST_TIMEOUT, ST_ABORTED = 0, 1, 2, 3


def build_model(cfg: AgentConfig, rng_weights: np.random.Generator) -> AgentModel:
    arch = _ARCH_CODES[cfg.architecture]
    n_in = n_input(cfg)
    n_ag = n_agent_units(cfg)
    M = cfg.n_actor

    if arch in (ARCH_HIDDEN, ARCH_RESERVOIR):
        W_in = _draw_input_weights(cfg, rng_weights, n_in)
    else:
        W_in = _EMPTY
    if arch == ARCH_RESERVOIR:
        n = cfg.n_hidden
        W_rec = rng_weights.normal(0.0, np.sqrt(1.0 / (cfg.reservoir_p * n)), size=(n, n))
    else:
        W_rec = _EMPTY

    W_lat = neurodyn.ring_weights(M, cfg.actor_w_inh, cfg.actor_w_exc, cfg.actor_phi)
    if cfg.working_memory:
        W_bump = neurodyn.bump_weights(cfg.n_bump, cfg.bump_w_inh, cfg.bump_phi)
        W_cue_bump = neurodyn.cue_bump_weights(cfg.n_bump, cfg.n_cues)
    else:
        W_bump = _EMPTY
        W_cue_bump = _EMPTY

    theta = 2.0 * np.pi * np.arange(M) / M

    act_kind = neurodyn.ACT_CODES[cfg.activation.kind]
    if cfg.architecture == "linear_hidden":
        act_kind = neurodyn.ACT_LINEAR
    if cfg.architecture == "reservoir":
        act_kind = neurodyn.ACT_PHI_A

    model = AgentModel(
        arch=arch, n_in=n_in, n_agent=n_ag, copies=cfg.expanded_copies if arch == ARCH_EXPANDED else 1,
        has_wm=cfg.working_memory,
        act_kind=act_kind,
        act_theta=cfg.reservoir_theta if arch == ARCH_RESERVOIR else cfg.activation.theta,
        act_gain=cfg.activation.gain,
        W_in=np.ascontiguousarray(W_in), W_rec=np.ascontiguousarray(W_rec),
        W_lat=np.ascontiguousarray(W_lat),
        W_bump=np.ascontiguousarray(W_bump), W_cue_bump=np.ascontiguousarray(W_cue_bump),
        W_actor=np.zeros((n_ag, M), dtype=np.float64),
        W_critic=np.zeros(n_ag, dtype=np.float64),
        place_centers=encoding.place_centers(cfg.n_place_axis, cfg.place_spacing),
        sin_dirs=np.sin(theta), cos_dirs=np.cos(theta),
        dt=cfg.dt, alpha=cfg.dt / cfg.tau_membrane,
        sigma_actor=cfg.sigma_actor, sigma_critic=cfg.sigma_critic,
        sigma_reservoir=cfg.sigma_reservoir, sigma_bump=cfg.sigma_bump,
        reservoir_gain=cfg.reservoir_gain, reservoir_theta=cfg.reservoir_theta,
        sigma_place=cfg.sigma_place, cue_gain=cfg.cue_gain,
        n_cues=cfg.n_cues, n_bump=cfg.n_bump if cfg.working_memory else 0,
        M=M, action_gain=cfg.action_gain,
        tau_g=cfg.tau_value, td_forward=cfg.td_scheme == "forward",
        eta_actor=cfg.eta_actor, eta_critic=cfg.eta_critic,
        plastic=cfg.plasticity_enabled,
    )
    model.noise_width = noise_width(model)
    assert model.param_count() == trainable_param_count(cfg)
    return model


def _draw_input_weights(cfg: AgentConfig, rng: np.random.Generator, n_in: int) -> np.ndarray:
    n_h = cfg.n_hidden
    if cfg.hidden_init.kind == "uniform":
        return rng.uniform(-1.0, 1.0, size=(n_h, n_in))
    # k_split: per unit, K weights from U[0,1] at random positions, the rest U[-1,0]
    K = cfg.hidden_init.k_excitatory
    W = rng.uniform(-1.0, 0.0, size=(n_h, n_in))
    mags = rng.uniform(0.0, 1.0, size=(n_h, K))
    for i in range(n_h):
        idx = rng.permutation(n_in)[:K]
        W[i, idx] = mags[i]
    return W


def noise_width(model: AgentModel) -> int:
    """Per-step standard-normal draws: [bump | reservoir | critic | actor]."""
    w = 1 + model.M
    if model.has_wm:
        w += model.n_bump
    if model.arch == ARCH_RESERVOIR:
        w += model.n_agent
    return w


def reset_state(model: AgentModel, start_pos, rng: np.random.Generator) -> StepState:
    """Per-trial reset: membranes ~ Normal(0, sigma_pop^2); bump and kernel zeroed."""
    M = model.M
    q = model.sigma_actor * rng.standard_normal(M)
    zeta = model.sigma_critic * rng.standard_normal(1)
    if model.arch == ARCH_RESERVOIR:
        x_res = model.sigma_reservoir * rng.standard_normal(model.n_agent)
    else:
        x_res = np.zeros(0, dtype=np.float64)
    x_b = np.zeros(model.n_bump, dtype=np.float64)

    n_pre = model.W_in.shape[0] if model.W_in.size else 0
    st = StepState(
        q=q, rho=np.maximum(q, 0.0), zeta=zeta, x_res=x_res, x_b=x_b,
        pos=np.array(start_pos, dtype=np.float64),
        sc=np.zeros(8, dtype=np.float64),
        ic=np.zeros(4, dtype=np.int64),
        u_in=np.zeros(model.n_in, dtype=np.float64),
        r_ag=np.zeros(model.n_agent, dtype=np.float64),
        pre=np.zeros(max(n_pre, 1), dtype=np.float64),
        tnh=np.zeros(max(x_res.shape[0], 1), dtype=np.float64),
        qd=np.zeros(M, dtype=np.float64),
        bd=np.zeros(max(model.n_bump, 1), dtype=np.float64),
    )
    st.ic[IC_FOUND] = -1
    st.ic[IC_FIRST_HIT] = -1
    return st


def forward_rates(model: AgentModel, U: np.ndarray) -> np.ndarray:
    """Noise-free batch forward (rows of U are input vectors) for static analyses.

    Defined for the feedforward paths; the reservoir has no static forward.
    """
    U = np.atleast_2d(np.asarray(U, dtype=np.float64))
    if U.shape[1] != model.n_in:
        raise ValueError(f"input width {U.shape[1]} != {model.n_in}")
    if model.arch == ARCH_CLASSIC:
        return U.copy()
    if model.arch == ARCH_EXPANDED:
        return np.tile(U, (1, model.copies))
    if model.arch == ARCH_HIDDEN:
        pre = U @ model.W_in.T
        return neurodyn.activate(pre, model.act_kind, model.act_theta, model.act_gain)
    raise ValueError("forward_rates is undefined for the reservoir architecture")
