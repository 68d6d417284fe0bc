"""Run configuration: agent + task + execution settings.

A RunConfig round-trips losslessly through YAML. Unknown keys anywhere in the
tree are rejected so that typos fail loudly instead of silently running with
defaults. The resolved config dict has a stable canonical form whose sha256
prefix tags every output file of a run.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field, fields
from typing import Optional

import yaml

ARCHITECTURES = ("classic", "expanded_classic", "linear_hidden", "nonlinear_hidden", "reservoir")
ACTIVATIONS = ("relu", "lrelu", "elu", "softplus", "tanh", "sigmoid", "linear", "phi_a", "phi_b", "omega")
TASK_KINDS = ("single_reward", "displaced_reward", "multi_pa", "transient_cue_pa")
TD_SCHEMES = ("forward", "backward")
HIDDEN_INITS = ("uniform", "k_split")


class ConfigError(ValueError):
    pass


@dataclass
class ActivationSpec:
    kind: str = "relu"
    theta: float = 0.0      # threshold for phi_a / phi_b
    gain: float = 0.2       # output gain for the linear kind


@dataclass
class HiddenInitSpec:
    kind: str = "uniform"   # uniform: U[-1,1]; k_split: K weights U[0,1], rest U[-1,0]
    k_excitatory: int = 0


@dataclass
class AgentConfig:
    architecture: str = "classic"
    n_hidden: int = 1024
    expanded_copies: int = 16
    activation: ActivationSpec = field(default_factory=ActivationSpec)
    hidden_init: HiddenInitSpec = field(default_factory=HiddenInitSpec)
    working_memory: bool = False

    dt: float = 0.1
    tau_membrane: float = 0.15

    sigma_actor: float = 0.25
    sigma_critic: float = 5e-4
    sigma_reservoir: float = 0.025
    sigma_bump: float = 0.1

    n_actor: int = 40
    actor_w_inh: float = -1.0
    actor_w_exc: float = 1.0
    actor_phi: float = 20.0
    # Velocity command is (action_gain / n_actor) * sum_k rho_k * dir_k.
    # 0.03 in that slot leaves the agent effectively immobile at the rate
    # scales the dynamics actually produce; 32.0 gives ~0.7 m/s exploration,
    # initial escape latencies around 1.5 min, and keeps the non-separating
    # architectures at chance on the multi-association task.
    action_gain: float = 32.0

    n_bump: int = 54
    bump_w_inh: float = -0.75
    bump_phi: float = 300.0

    reservoir_gain: float = 1.5
    reservoir_p: float = 1.0
    reservoir_theta: float = 3.0

    n_place_axis: int = 7
    place_spacing: float = 0.267
    sigma_place: float = 0.267
    n_cues: int = 18
    cue_gain: float = 3.0

    tau_value: float = 2.0
    td_scheme: str = "forward"
    eta_actor: float = 0.015
    eta_critic: float = 0.015
    plasticity_enabled: bool = True


@dataclass
class TaskConfig:
    kind: str = "single_reward"
    t_max: float = 300.0
    probe_duration: float = 60.0
    reward_radius: float = 0.03
    reward_magnitude: float = 1.0
    consume_fraction: float = 0.9999
    near_radius: float = 0.1
    tau_reward_rise: float = 0.12
    tau_reward_decay: float = 0.25

    # single_reward / displaced_reward
    cue_id: int = 1
    reward_location: tuple = (-0.6, 0.6)
    n_slots: int = 60
    probe_blocks: tuple = ((7, 12), (25, 30), (55, 60))

    # displaced_reward phase B
    displacement_index: int = 2
    displaced_cue_id: int = 2
    post_slots: int = 60
    post_probe_blocks: tuple = ((7, 12), (25, 30), (55, 60))

    # multi_pa / transient_cue_pa
    n_pairs: int = 6
    n_sessions: int = 80
    probe_sessions: tuple = (10, 45, 80)
    pa_preset: str = "grid6"
    pa_locations: Optional[tuple] = None   # overrides preset when given
    cue_duration: float = 5.0              # transient_cue_pa silenced phase


@dataclass
class RunConfig:
    agent: AgentConfig = field(default_factory=AgentConfig)
    task: TaskConfig = field(default_factory=TaskConfig)
    n_seeds: int = 2
    master_seed: int = 1234
    out_dir: str = ""
    backend: str = "auto"
    threads: int = 1
    record_probe_steps: bool = True
    chunk_steps: int = 512


def _from_dict(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected a mapping, got {type(data).__name__}")
    valid = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(valid)
    if unknown:
        raise ConfigError(f"{path or 'config'}: unknown key(s) {sorted(unknown)}")
    kwargs = {}
    for name, val in data.items():
        f = valid[name]
        sub = f"{path}.{name}" if path else name
        if dataclasses.is_dataclass(f.type) or f.type in ("ActivationSpec", "HiddenInitSpec", "AgentConfig", "TaskConfig"):
            sub_cls = {"ActivationSpec": ActivationSpec, "HiddenInitSpec": HiddenInitSpec,
                       "AgentConfig": AgentConfig, "TaskConfig": TaskConfig}[f.type if isinstance(f.type, str) else f.type.__name__]
            kwargs[name] = _from_dict(sub_cls, val, sub)
        elif isinstance(val, list):
            kwargs[name] = tuple(tuple(v) if isinstance(v, list) else v for v in val)
        else:
            kwargs[name] = val
    return cls(**kwargs)


def _to_dict(obj):
    out = {}
    for f in fields(obj):
        val = getattr(obj, f.name)
        if dataclasses.is_dataclass(val):
            out[f.name] = _to_dict(val)
        elif isinstance(val, tuple):
            out[f.name] = [list(v) if isinstance(v, tuple) else v for v in val]
        else:
            out[f.name] = val
    return out


def config_from_dict(data: dict) -> RunConfig:
    return _from_dict(RunConfig, data, "")


def config_to_dict(cfg: RunConfig) -> dict:
    return _to_dict(cfg)


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    cfg = config_from_dict(data)
    validate_config(cfg)
    return cfg


def save_config(cfg: RunConfig, path: str) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(config_to_dict(cfg), fh, sort_keys=False)


def config_hash(cfg: RunConfig) -> str:
    """Stable 12-hex-digit digest of the resolved config."""
    canon = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def n_input(agent: AgentConfig) -> int:
    n = agent.n_place_axis ** 2 + agent.n_cues
    if agent.working_memory:
        n += agent.n_bump
    return n


def n_agent_units(agent: AgentConfig) -> int:
    """Width of the rate vector feeding the trainable readouts."""
    if agent.architecture == "classic":
        return n_input(agent)
    if agent.architecture == "expanded_classic":
        return n_input(agent) * agent.expanded_copies
    if agent.architecture in ("linear_hidden", "nonlinear_hidden", "reservoir"):
        return agent.n_hidden
    raise ConfigError(f"unknown architecture {agent.architecture!r}")


def trainable_param_count(agent: AgentConfig) -> int:
    n = n_agent_units(agent)
    return n * agent.n_actor + n


def validate_config(cfg: RunConfig) -> None:
    a, t = cfg.agent, cfg.task
    err = []
    if a.architecture not in ARCHITECTURES:
        err.append(f"agent.architecture must be one of {ARCHITECTURES}, got {a.architecture!r}")
    if a.activation.kind not in ACTIVATIONS:
        err.append(f"agent.activation.kind must be one of {ACTIVATIONS}, got {a.activation.kind!r}")
    if a.hidden_init.kind not in HIDDEN_INITS:
        err.append(f"agent.hidden_init.kind must be one of {HIDDEN_INITS}")
    if a.td_scheme not in TD_SCHEMES:
        err.append(f"agent.td_scheme must be one of {TD_SCHEMES}")
    if t.kind not in TASK_KINDS:
        err.append(f"task.kind must be one of {TASK_KINDS}, got {t.kind!r}")
    if a.dt <= 0:
        err.append("agent.dt must be > 0")
    # explicit-Euler stability guard for every integrated population
    elif a.dt > a.tau_membrane / 1.5 + 1e-12:
        err.append(f"agent.dt={a.dt} exceeds tau_membrane/1.5={a.tau_membrane/1.5:.4g} (stability guard)")
    if a.dt > 0 and a.dt >= t.tau_reward_rise:
        err.append(f"agent.dt={a.dt} must be < task.tau_reward_rise={t.tau_reward_rise} "
                   "(reward kernel states must stay non-negative)")
    if t.tau_reward_decay <= t.tau_reward_rise:
        err.append("task.tau_reward_decay must exceed task.tau_reward_rise")
    if a.n_hidden < 1:
        err.append("agent.n_hidden must be >= 1")
    if a.expanded_copies < 1:
        err.append("agent.expanded_copies must be >= 1")
    if a.hidden_init.kind == "k_split" and not (0 <= a.hidden_init.k_excitatory <= n_input(a)):
        err.append(f"agent.hidden_init.k_excitatory must be in [0, {n_input(a)}]")
    if a.n_bump % a.n_cues != 0:
        err.append("agent.n_bump must be a multiple of agent.n_cues (3 adjacent units per cue)")
    if cfg.n_seeds < 1:
        err.append("n_seeds must be >= 1")
    if cfg.threads < 1:
        err.append("threads must be >= 1")
    if cfg.chunk_steps < 1:
        err.append("chunk_steps must be >= 1")
    if cfg.backend not in ("auto", "compiled", "python"):
        err.append("backend must be auto, compiled, or python")
    if t.kind == "displaced_reward" and not (1 <= t.displacement_index <= 7):
        err.append("task.displacement_index must be in 1..7")
    if t.kind in ("multi_pa", "transient_cue_pa"):
        if t.pa_locations is None and t.pa_preset not in PA_PRESETS:
            err.append(f"task.pa_preset must be one of {sorted(PA_PRESETS)} or task.pa_locations given")
        locs = pa_locations(t)
        if len(locs) != t.n_pairs:
            err.append(f"task.n_pairs={t.n_pairs} does not match {len(locs)} configured locations")
        if t.n_pairs > a.n_cues:
            err.append("task.n_pairs cannot exceed agent.n_cues")
        for s in t.probe_sessions:
            if not (1 <= s <= t.n_sessions):
                err.append(f"probe session {s} outside 1..{t.n_sessions}")
    if t.kind in ("single_reward", "displaced_reward"):
        for lo, hi in t.probe_blocks:
            if not (1 <= lo <= hi <= t.n_slots):
                err.append(f"probe block ({lo},{hi}) outside 1..{t.n_slots}")
        if not (1 <= t.cue_id <= a.n_cues):
            err.append("task.cue_id out of range")
    if t.kind == "displaced_reward":
        for lo, hi in t.post_probe_blocks:
            if not (1 <= lo <= hi <= t.post_slots):
                err.append(f"post probe block ({lo},{hi}) outside 1..{t.post_slots}")
    if t.kind == "transient_cue_pa" and t.cue_duration < 0:
        err.append("task.cue_duration must be >= 0")
    if err:
        raise ConfigError("; ".join(err))


# Well-separated reward-grid points for the paired-association tasks.
PA_PRESETS = {
    "grid6": ((-0.6, 0.6), (0.6, 0.6), (-0.6, -0.6), (0.6, -0.6), (0.0, 0.2), (0.0, -0.2)),
    "grid16": tuple((x, y) for y in (0.6, 0.2, -0.2, -0.6) for x in (-0.6, -0.2, 0.2, 0.6)),
}


def pa_locations(task: TaskConfig) -> tuple:
    if task.pa_locations is not None:
        return tuple(tuple(p) for p in task.pa_locations)
    return PA_PRESETS.get(task.pa_preset, ())


# Published learning rates: (architecture, task family) -> eta.
_ETA_TABLE = {
    ("classic", "single"): 0.015,
    ("expanded_classic", "single"): 5e-4,
    ("linear_hidden", "single"): 5e-4,
    ("nonlinear_hidden", "single"): 1e-4,
    ("reservoir", "single"): 1e-4,
    ("classic", "multi"): 1e-3,
    ("expanded_classic", "multi"): 1e-5,
    ("linear_hidden", "multi"): 1e-5,
    ("nonlinear_hidden", "multi"): 1e-5,
    ("reservoir", "multi"): 1e-5,
}


def preset_agent(architecture: str, task_kind: str = "single_reward") -> AgentConfig:
    """Agent defaults for an architecture/task pairing (sizes and learning rate)."""
    family = "single" if task_kind in ("single_reward", "displaced_reward") else "multi"
    a = AgentConfig(architecture=architecture)
    eta = _ETA_TABLE[(architecture, family)]
    a.eta_actor = a.eta_critic = eta
    if architecture == "expanded_classic":
        a.expanded_copies = 16 if family == "single" else 123
    if architecture in ("linear_hidden", "nonlinear_hidden", "reservoir"):
        a.n_hidden = 1024 if family == "single" else 8192
    if architecture == "linear_hidden":
        a.activation = ActivationSpec(kind="linear", gain=0.2)
    elif architecture == "reservoir":
        a.activation = ActivationSpec(kind="phi_a", theta=3.0)
    return a
