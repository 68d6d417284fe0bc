"""Throughput table: compiled kernel vs pure-Python fallback, per architecture.

Also cross-checks that both backends step the same trajectory (compiled BLAS
reductions differ from the Python path at the few-ulp level, so positions are
compared loosely while trial outcomes must agree exactly).

    python3 benchmarks/bench_backends.py [--steps 3000] [--repeats 3]
"""
import argparse
import time

import numpy as np

from navac import agents
from navac.backend import TrialParams, available_backends, get_impl, run_trial
from navac.config import RunConfig, preset_agent

ARCHS = ("classic", "expanded_classic", "linear_hidden", "nonlinear_hidden", "reservoir")


def make_trial(cfg, steps):
    return TrialParams(start=np.array([0.0, -0.79]), target_x=0.6, target_y=0.6,
                       radius2=cfg.task.reward_radius ** 2, cue_idx0=0,
                       R=cfg.task.reward_magnitude, deliver=False, learn=True,
                       n_steps=steps, cue_on_steps=-1,
                       tau_rise=cfg.task.tau_reward_rise,
                       tau_decay=cfg.task.tau_reward_decay, consume_thresh=1.0)


def bench_one(arch, steps, repeats, backends):
    cfg = RunConfig()
    cfg.agent = preset_agent(arch, "single_reward")
    tp = make_trial(cfg, steps)
    row = {"arch": arch, "units": None}
    results = {}
    for name in backends:
        impl = get_impl(name)
        model = agents.build_model(cfg.agent, np.random.default_rng(np.random.SeedSequence(42)))
        row["units"] = model.W_critic.size
        best = np.inf
        for _ in range(repeats):
            rng = np.random.default_rng(np.random.SeedSequence(7))
            t0 = time.perf_counter()
            res = run_trial(model, tp, rng, cfg.chunk_steps, impl)
            best = min(best, time.perf_counter() - t0)
        row[name] = res.steps / best
        results[name] = res
    if len(results) == 2:
        a, b = (results[n] for n in backends)
        agree = (a.steps == b.steps and a.found == b.found
                 and np.allclose(a.pos, b.pos, atol=1e-9))
        row["agree"] = "yes" if agree else "NO"
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=3000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)};  {args.steps} steps, best of {args.repeats}")
    header = f"{'architecture':18s} {'units':>6s} " + \
        " ".join(f"{n + ' steps/s':>16s}" for n in backends)
    if len(backends) == 2:
        header += f" {'speedup':>8s} {'agree':>6s}"
    print(header)
    for arch in ARCHS:
        row = bench_one(arch, args.steps, args.repeats, backends)
        line = f"{arch:18s} {row['units']:6d} " + \
            " ".join(f"{row[n]:16.0f}" for n in backends)
        if len(backends) == 2:
            line += f" {row['compiled'] / row['python']:7.1f}x {row['agree']:>6s}"
        print(line)


if __name__ == "__main__":
    main()
