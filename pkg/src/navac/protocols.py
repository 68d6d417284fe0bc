"""Task schedules, per-seed simulation loops, and behavioral metrics.

Randomness layout (the whole experiment is a pure function of master_seed):
each seed index owns SeedSequence(master_seed, spawn_key=(seed,)), which
spawns three named child streams in fixed order: weights, schedule, dynamics.
The schedule stream depends only on (master_seed, seed), so every architecture
sees identical trial orders, start positions, and cue permutations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from multiprocessing import get_context

import numpy as np

from . import agents, backend, env
from .backend import TrialParams, TrialResult, run_trial
from .config import RunConfig, TaskConfig, config_hash, pa_locations, validate_config

NEAR_RADIUS = 0.1
ASSOC_THRESHOLD = 0.40


@dataclass
class TrialPlan:
    phase: int            # 0, or 1 for the post-switch phase of displaced_reward
    session: int          # 1-based; 0 for non-session tasks
    slot: int             # 1-based within phase/session
    global_index: int
    cue_id: int           # 1-based
    target: tuple
    start: tuple
    probe: bool
    probe_group: int      # 1-based PT/PS number; 0 for training trials
    transient: bool
    duration: float


@dataclass
class TrialRow:
    seed: int
    phase: int
    session: int
    slot: int
    global_index: int
    cue_id: int
    probe: bool
    start: tuple
    target: tuple
    latency: float
    found: bool
    steps: int
    status: int


@dataclass
class ProbeRecord:
    plan: TrialPlan
    probe_index: int      # 1-based PT/PS number
    result: TrialResult
    nav_offset: int       # first navigation step (transient trials skip the cue phase)


@dataclass
class ProbeMetricsRow:
    seed: int
    probe_index: int
    session: int
    cue_id: int
    latency: float
    time_near_correct: float
    time_near_any: float
    visit_ratio: float
    found: bool


@dataclass
class SimResult:
    seed: int
    trials: list = field(default_factory=list)          # TrialRow
    probe_metrics: list = field(default_factory=list)   # ProbeMetricsRow
    probe_records: list = field(default_factory=list)   # ProbeRecord (optional)
    aborted: int = 0


# ---------------------------------------------------------------------------
# schedules

def displaced_location(task: TaskConfig) -> tuple:
    """Location k: the original shifted (k-1) grid diagonal steps toward the
    opposite corner, clamped to the reward grid's extent."""
    x0, y0 = task.reward_location
    k = task.displacement_index
    sx = 0.2 * (1.0 if x0 < 0 else -1.0)
    sy = 0.2 * (1.0 if y0 < 0 else -1.0)
    x = min(max(x0 + (k - 1) * sx, -0.6), 0.6)
    y = min(max(y0 + (k - 1) * sy, -0.6), 0.6)
    return (round(x, 10), round(y, 10))


def _start(rng: np.random.Generator) -> tuple:
    return tuple(env.start_positions()[rng.integers(4)])


def _slot_phase(task: TaskConfig, rng, phase: int, n_slots: int, blocks, cue_id: int,
                target: tuple, g0: int, pt0: int) -> list:
    block_of = {}
    for b, (lo, hi) in enumerate(blocks):
        for slot in range(lo, hi + 1):
            block_of[slot] = pt0 + b + 1
    plans = []
    for slot in range(1, n_slots + 1):
        group = block_of.get(slot, 0)
        plans.append(TrialPlan(
            phase=phase, session=0, slot=slot, global_index=g0 + slot - 1,
            cue_id=cue_id, target=target, start=_start(rng),
            probe=group > 0, probe_group=group, transient=False,
            duration=task.probe_duration if group > 0 else task.t_max))
    return plans


def _session_phase(task: TaskConfig, rng, transient: bool) -> list:
    locs = pa_locations(task)
    probe_no = {s: i + 1 for i, s in enumerate(sorted(set(task.probe_sessions)))}
    plans = []
    g = 0
    for sess in range(1, task.n_sessions + 1):
        group = probe_no.get(sess, 0)
        order = rng.permutation(task.n_pairs) + 1
        for slot, cue in enumerate(order, start=1):
            plans.append(TrialPlan(
                phase=0, session=sess, slot=slot, global_index=g,
                cue_id=int(cue), target=tuple(locs[cue - 1]), start=_start(rng),
                probe=group > 0, probe_group=group, transient=transient,
                duration=task.probe_duration if group > 0 else task.t_max))
            g += 1
    return plans


def build_schedule(task: TaskConfig, rng: np.random.Generator) -> list:
    if task.kind == "single_reward":
        return _slot_phase(task, rng, 0, task.n_slots, task.probe_blocks,
                           task.cue_id, tuple(task.reward_location), 0, 0)
    if task.kind == "displaced_reward":
        a = _slot_phase(task, rng, 0, task.n_slots, task.probe_blocks,
                        task.cue_id, tuple(task.reward_location), 0, 0)
        cue_b = task.cue_id if task.displacement_index == 1 else task.displaced_cue_id
        b = _slot_phase(task, rng, 1, task.post_slots, task.post_probe_blocks,
                        cue_b, displaced_location(task), len(a), len(task.probe_blocks))
        return a + b
    if task.kind == "multi_pa":
        return _session_phase(task, rng, transient=False)
    if task.kind == "transient_cue_pa":
        return _session_phase(task, rng, transient=True)
    raise ValueError(f"unknown task kind {task.kind!r}")


# ---------------------------------------------------------------------------
# metrics

def time_near(positions: np.ndarray, center, radius: float, dt: float) -> float:
    d = positions - np.asarray(center, dtype=np.float64)
    return float(np.count_nonzero(np.einsum("ij,ij->i", d, d) <= radius * radius) * dt)


def visit_ratio(positions: np.ndarray, locations, correct_idx: int,
                radius: float = NEAR_RADIUS, dt: float = 1.0) -> float:
    """Dwell near the correct center over dwell near any; 0/0 counts as 0."""
    total = 0.0
    correct = 0.0
    for i, loc in enumerate(locations):
        t = time_near(positions, loc, radius, dt)
        total += t
        if i == correct_idx:
            correct = t
    return correct / total if total > 0 else 0.0


def associations_learned(per_cue_ratios) -> int:
    return int(sum(1 for r in per_cue_ratios if r > ASSOC_THRESHOLD))


# ---------------------------------------------------------------------------
# per-seed simulation

def trial_params_for(plan: TrialPlan, task: TaskConfig, dt: float, plastic: bool) -> TrialParams:
    cue_steps = -1
    n_steps = int(round(plan.duration / dt))
    if plan.transient:
        cue_steps = int(round(task.cue_duration / dt))
        n_steps += cue_steps
    return TrialParams(
        start=np.asarray(plan.start, dtype=np.float64),
        target_x=float(plan.target[0]), target_y=float(plan.target[1]),
        radius2=task.reward_radius ** 2,
        cue_idx0=plan.cue_id - 1,
        R=task.reward_magnitude,
        deliver=not plan.probe,
        learn=plastic and not plan.probe,
        n_steps=n_steps,
        cue_on_steps=cue_steps,
        tau_rise=task.tau_reward_rise,
        tau_decay=task.tau_reward_decay,
        consume_thresh=task.consume_fraction * task.reward_magnitude,
    )


def _latency(res: TrialResult, plan: TrialPlan, nav_offset: int, dt: float) -> tuple:
    """(latency seconds from navigation onset, found flag)."""
    if plan.probe:
        hit = res.first_hit_step
        if hit < 0:
            return plan.duration, False
        return max(hit - nav_offset, 0) * dt, True
    if res.found_step < 0:
        return plan.duration, False
    return max(res.found_step - nav_offset, 0) * dt, True


def _task_locations(task: TaskConfig, plan: TrialPlan) -> tuple:
    if task.kind in ("multi_pa", "transient_cue_pa"):
        return pa_locations(task), plan.cue_id - 1
    return (tuple(plan.target),), 0


def run_sim(cfg: RunConfig, seed_index: int) -> SimResult:
    """One full schedule for one seed; deterministic in (cfg, seed_index)."""
    ss = np.random.SeedSequence(cfg.master_seed, spawn_key=(seed_index,))
    ss_weights, ss_schedule, ss_dynamics = ss.spawn(3)
    model = agents.build_model(cfg.agent, np.random.default_rng(ss_weights))
    plans = build_schedule(cfg.task, np.random.default_rng(ss_schedule))
    rng = np.random.default_rng(ss_dynamics)
    impl = backend.get_impl(cfg.backend)
    dt = cfg.agent.dt

    sim = SimResult(seed=seed_index)
    for plan in plans:
        tp = trial_params_for(plan, cfg.task, dt, cfg.agent.plasticity_enabled)
        res = run_trial(model, tp, rng, cfg.chunk_steps, impl)
        nav = max(tp.cue_on_steps, 0)
        latency, found = _latency(res, plan, nav, dt)
        sim.trials.append(TrialRow(
            seed=seed_index, phase=plan.phase, session=plan.session, slot=plan.slot,
            global_index=plan.global_index, cue_id=plan.cue_id, probe=plan.probe,
            start=plan.start, target=plan.target,
            latency=latency, found=found, steps=res.steps, status=res.status))
        if res.status == agents.ST_ABORTED:
            sim.aborted += 1
        if plan.probe:
            nav_pos = res.pos[nav:]
            locs, correct = _task_locations(cfg.task, plan)
            tn_each = [time_near(nav_pos, c, cfg.task.near_radius, dt) for c in locs]
            sim.probe_metrics.append(ProbeMetricsRow(
                seed=seed_index, probe_index=plan.probe_group, session=plan.session,
                cue_id=plan.cue_id, latency=latency,
                time_near_correct=tn_each[correct], time_near_any=float(sum(tn_each)),
                visit_ratio=(tn_each[correct] / sum(tn_each) if sum(tn_each) > 0 else 0.0),
                found=found))
            if cfg.record_probe_steps:
                sim.probe_records.append(ProbeRecord(
                    plan=plan, probe_index=plan.probe_group, result=res, nav_offset=nav))
    return sim


@dataclass
class ExperimentResult:
    config: RunConfig
    config_hash: str
    sims: list


def _sim_worker(args):
    cfg, seed = args
    return run_sim(cfg, seed)


def run_experiment(cfg: RunConfig) -> ExperimentResult:
    """All seeds; parallel and serial execution agree bit-exactly."""
    validate_config(cfg)
    jobs = [(cfg, s) for s in range(cfg.n_seeds)]
    if cfg.threads > 1 and cfg.n_seeds > 1:
        with get_context("fork").Pool(min(cfg.threads, cfg.n_seeds)) as pool:
            sims = pool.map(_sim_worker, jobs)
    else:
        sims = [run_sim(cfg, s) for s in range(cfg.n_seeds)]
    return ExperimentResult(config=cfg, config_hash=config_hash(cfg), sims=sims)


def probe_summary(sims: list) -> list:
    """Per (seed, probe_index) aggregation: mean latency/time-near/visit ratio,
    associations learned (counted over that probe's per-cue ratios)."""
    out = []
    for sim in sims:
        groups = {}
        for row in sim.probe_metrics:
            groups.setdefault(row.probe_index, []).append(row)
        for pi in sorted(groups):
            rows = groups[pi]
            ratios = [r.visit_ratio for r in rows]
            out.append({
                "seed": sim.seed, "probe_index": pi, "session": rows[0].session,
                "n_trials": len(rows),
                "latency_mean": float(np.mean([r.latency for r in rows])),
                "time_near_correct_mean": float(np.mean([r.time_near_correct for r in rows])),
                "visit_ratio_mean": float(np.mean(ratios)),
                "associations_learned": associations_learned(ratios),
            })
    return out


def training_latencies(sims: list) -> list:
    """Per seed, the training-trial latency sequence in schedule order."""
    out = []
    for sim in sims:
        seq = [t.latency for t in sim.trials if not t.probe]
        out.append({"seed": sim.seed, "latencies": seq})
    return out
