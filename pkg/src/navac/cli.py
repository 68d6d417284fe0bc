"""Command line front door: run, sweep, maps, dims, validate, bench."""

from __future__ import annotations

import copy
import json
import os
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import __version__, analysis
from . import bundle as bundle_io
from . import protocols
from .backend import default_backend_name, get_impl, run_trial
from .config import (ConfigError, RunConfig, load_config, preset_agent,
                     save_config, validate_config)

OUT_ROOT_ENV = "NAVAC_OUT_ROOT"
SWEEP_AXES = ("expansion_ratio", "activation", "k_excitatory", "tau_g")


def _out_root() -> Path:
    return Path(os.environ.get(OUT_ROOT_ENV, "results"))


def _build_cfg(config, task, arch, seeds, master_seed, dt, scheme, threads,
               backend, sessions, slots, t_max, hidden, eta, records) -> RunConfig:
    if config:
        cfg = load_config(config)
    else:
        cfg = RunConfig()
        if task:
            cfg.task.kind = task
        if arch or task:
            cfg.agent = preset_agent(arch or "classic", cfg.task.kind)
    if task and config:
        cfg.task.kind = task
    if arch and config:
        cfg.agent.architecture = arch
    if seeds is not None:
        cfg.n_seeds = seeds
    if master_seed is not None:
        cfg.master_seed = master_seed
    if dt is not None:
        cfg.agent.dt = dt
    if scheme:
        cfg.agent.td_scheme = scheme
    if threads is not None:
        cfg.threads = threads
    if backend:
        cfg.backend = backend
    if sessions is not None:
        cfg.task.n_sessions = sessions
        cfg.task.probe_sessions = tuple(
            p for p in cfg.task.probe_sessions if p <= sessions) or (sessions,)
    if slots is not None:
        cfg.task.n_slots = slots
        cfg.task.probe_blocks = tuple(
            b for b in cfg.task.probe_blocks if b[1] <= slots)
    if t_max is not None:
        cfg.task.t_max = t_max
    if hidden is not None:
        cfg.agent.n_hidden = hidden
    if eta is not None:
        cfg.agent.eta_actor = cfg.agent.eta_critic = eta
    if records is not None:
        cfg.record_probe_steps = records
    return cfg


def _checked(cfg: RunConfig) -> RunConfig:
    try:
        validate_config(cfg)
    except ConfigError as e:
        raise click.ClickException(f"invalid config: {e}")
    return cfg


def _backend_label(cfg: RunConfig) -> str:
    return default_backend_name() if cfg.backend in ("auto", "") else cfg.backend


_run_options = [
    click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None),
    click.option("--task", type=click.Choice(["single_reward", "displaced_reward",
                                              "multi_pa", "transient_cue_pa"]), default=None),
    click.option("--arch", type=click.Choice(["classic", "expanded_classic", "linear_hidden",
                                              "nonlinear_hidden", "reservoir"]), default=None),
    click.option("--seeds", type=int, default=None, help="number of seeds"),
    click.option("--master-seed", type=int, default=None),
    click.option("--dt", type=float, default=None),
    click.option("--scheme", type=click.Choice(["forward", "backward"]), default=None),
    click.option("--threads", type=int, default=None),
    click.option("--backend", type=click.Choice(["auto", "compiled", "python"]), default=None),
    click.option("--sessions", type=int, default=None, help="override session count"),
    click.option("--slots", type=int, default=None, help="override trial-slot count"),
    click.option("--t-max", type=float, default=None),
    click.option("--hidden", type=int, default=None, help="override hidden width"),
    click.option("--eta", type=float, default=None, help="override both learning rates"),
    click.option("--records/--no-records", "records", default=None,
                 help="store probe trajectories in the bundle"),
]


def _with_run_options(f):
    for opt in reversed(_run_options):
        f = opt(f)
    return f


@click.group()
@click.version_option(__version__)
def main():
    """Deterministic navigation-learning simulations."""


@main.command()
@_with_run_options
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="bundle directory (default under $NAVAC_OUT_ROOT or ./results)")
def run(config, task, arch, seeds, master_seed, dt, scheme, threads, backend,
        sessions, slots, t_max, hidden, eta, records, out):
    """Run an experiment and write a result bundle."""
    cfg = _checked(_build_cfg(config, task, arch, seeds, master_seed, dt, scheme,
                              threads, backend, sessions, slots, t_max, hidden,
                              eta, records))
    res = protocols.run_experiment(cfg)
    bdir = Path(out) if out else _out_root() / (
        f"{cfg.task.kind}_{cfg.agent.architecture}_{res.config_hash}")
    bundle_io.write_bundle(bdir, res, _backend_label(cfg))
    save_config(cfg, bdir / "config.yaml")
    aborted = sum(s.aborted for s in res.sims)
    click.echo(f"bundle={bdir} config_hash={res.config_hash} "
               f"backend={_backend_label(cfg)} aborted_trials={aborted}")
    if aborted:
        click.echo("warning: some trials aborted on non-finite dynamics", err=True)
        sys.exit(3)


def _apply_axis(cfg: RunConfig, axis: str, raw: str) -> RunConfig:
    cfg = copy.deepcopy(cfg)
    a = cfg.agent
    if axis == "expansion_ratio":
        v = float(raw)
        if a.architecture == "expanded_classic":
            a.expanded_copies = max(1, int(round(v)))
        else:
            a.n_hidden = max(1, int(round(v * 67)))
    elif axis == "activation":
        a.activation.kind = raw
    elif axis == "k_excitatory":
        a.hidden_init.kind = "k_split"
        a.hidden_init.k_excitatory = int(raw)
    elif axis == "tau_g":
        a.tau_value = float(raw)
    return cfg


def _seed_dims(cfg: RunConfig, seed: int):
    """Dimensionality of the seed's own hidden layer (same weight stream as the
    simulation); None for architectures without a feedforward rate layer."""
    ss = np.random.SeedSequence(cfg.master_seed, spawn_key=(seed,))
    rng = np.random.default_rng(ss.spawn(3)[0])
    try:
        return analysis.hidden_dimensionality(cfg.agent, rng)["n_components"]
    except ValueError:
        return None


@main.command()
@_with_run_options
@click.option("--axis", type=click.Choice(SWEEP_AXES), required=True)
@click.option("--values", required=True, help="comma-separated axis values")
@click.option("--out", type=click.Path(file_okay=False), default=None)
def sweep(config, task, arch, seeds, master_seed, dt, scheme, threads, backend,
          sessions, slots, t_max, hidden, eta, records, axis, values, out):
    """Run one experiment per axis value; aggregate associations and dimensionality."""
    base = _checked(_build_cfg(config, task, arch, seeds, master_seed, dt, scheme,
                               threads, backend, sessions, slots, t_max, hidden,
                               eta, records))
    root = Path(out) if out else _out_root() / f"sweep_{axis}"
    root.mkdir(parents=True, exist_ok=True)
    rows = []
    for raw in [v.strip() for v in values.split(",") if v.strip()]:
        cfg = _apply_axis(base, axis, raw)
        label = f"{axis}_{raw}"
        try:
            validate_config(cfg)
            res = protocols.run_experiment(cfg)
            bundle_io.write_bundle(root / label, res, _backend_label(cfg))
            summary = protocols.probe_summary(res.sims)
            last = max(r["probe_index"] for r in summary)
            for r in summary:
                if r["probe_index"] != last:
                    continue
                dims = _seed_dims(cfg, r["seed"])
                rows.append({"axis": axis, "value": raw, "seed": r["seed"],
                             "associations_learned": r["associations_learned"],
                             "visit_ratio_mean": r["visit_ratio_mean"],
                             "dimensionality": "" if dims is None else dims,
                             "config_hash": res.config_hash, "error": ""})
        except Exception as e:  # record the failure, keep sweeping
            rows.append({"axis": axis, "value": raw, "seed": "",
                         "associations_learned": "", "visit_ratio_mean": "",
                         "dimensionality": "", "config_hash": "",
                         "error": str(e).replace(",", ";")})
            click.echo(f"point {label} failed: {e}", err=True)
    cols = ["axis", "value", "seed", "associations_learned", "visit_ratio_mean",
            "dimensionality", "config_hash", "error"]
    bundle_io._write_csv(root / "sweep_summary.csv", cols, rows)
    click.echo(f"sweep_summary={root / 'sweep_summary.csv'} points={len(rows)}")


def _concat(recs, key, nav=True):
    return np.concatenate([r[key][r["nav_offset"]:] if nav else r[key] for r in recs])


@main.command()
@click.option("--bundle", "bundle_dir", type=click.Path(exists=True, file_okay=False),
              required=True)
@click.option("--probe", type=int, required=True, help="probe index (1-based)")
@click.option("--cue", type=int, default=None, help="restrict to one cue")
@click.option("--png", is_flag=True, help="also rasterize heatmap + arrow field")
def maps(bundle_dir, probe, cue, png):
    """Generate 15x15 value/policy/TD maps from a bundle's probe records."""
    reader = bundle_io.BundleReader(bundle_dir)
    try:
        recs = reader.probe_records()
    except FileNotFoundError as e:
        raise click.ClickException(str(e))
    recs = [r for r in recs if r["probe_index"] == probe
            and (cue is None or r["cue_id"] == cue)]
    if not recs:
        raise click.ClickException(f"no probe records for probe={probe} cue={cue}")
    by_cue = {}
    for r in recs:
        by_cue.setdefault(r["cue_id"], []).append(r)
    written = []
    for cid, group in sorted(by_cue.items()):
        pos = _concat(group, "pos")
        written.append(bundle_io.write_map(
            bundle_dir, "value", analysis.scalar_map(pos, _concat(group, "v")),
            reader.config_hash, probe, cid))
        written.append(bundle_io.write_map(
            bundle_dir, "policy", analysis.vector_map(pos, _concat(group, "act")),
            reader.config_hash, probe, cid))
        written.append(bundle_io.write_map(
            bundle_dir, "td", analysis.scalar_map(pos, _concat(group, "delta")),
            reader.config_hash, probe, cid))
    for p in written:
        click.echo(str(p))
    if png:
        _render_pngs(written)


def _render_pngs(map_paths):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise click.ClickException(
            "matplotlib not installed; install it or use the plotting package")
    for path in map_paths:
        doc = json.loads(Path(path).read_text())
        n = doc["n"]
        fig, ax = plt.subplots(figsize=(4, 4))
        if doc["kind"] == "policy":
            for r in range(n):
                for c in range(n):
                    cell = doc["cells"][r][c]
                    if cell:
                        ax.arrow(c, r, cell[0], cell[1], head_width=0.18)
            ax.set_xlim(-1, n)
            ax.set_ylim(-1, n)
        else:
            grid = np.array([[np.nan if v is None else v for v in row]
                             for row in doc["cells"]])
            im = ax.imshow(grid, origin="lower")
            fig.colorbar(im, ax=ax)
        ax.set_title(f"{doc['kind']} p{doc['probe_index']} cue {doc['cue_id']}")
        out = Path(path).with_suffix(".png")
        fig.savefig(out, dpi=110)
        plt.close(fig)
        click.echo(str(out))


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--arch", type=click.Choice(["classic", "expanded_classic", "linear_hidden",
                                           "nonlinear_hidden"]), default="nonlinear_hidden")
@click.option("--width", type=int, default=None)
@click.option("--activation", default=None)
@click.option("--seed", type=int, default=0)
@click.option("--samples", type=int, default=500)
def dims(config, arch, width, activation, seed, samples):
    """Report hidden-layer dimensionality at the 95% variance threshold."""
    agent = load_config(config).agent if config else preset_agent(arch, "multi_pa")
    if width is not None:
        agent.n_hidden = width
    if activation is not None:
        agent.activation.kind = activation
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    try:
        rep = analysis.hidden_dimensionality(agent, rng, n_samples=samples)
    except ValueError as e:
        raise click.ClickException(str(e))
    rep.pop("explained")
    click.echo(json.dumps(rep, sort_keys=True))


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--bundle", "bundle_dir", type=click.Path(exists=True, file_okay=False),
              default=None)
def validate(config, bundle_dir):
    """Validate a config file and/or a result bundle."""
    if not config and not bundle_dir:
        raise click.UsageError("give --config and/or --bundle")
    problems = []
    if config:
        try:
            validate_config(load_config(config))
        except ConfigError as e:
            problems.append(f"config: {e}")
    if bundle_dir:
        problems.extend(bundle_io.validate_bundle(bundle_dir))
    for p in problems:
        click.echo(p, err=True)
    if problems:
        sys.exit(1)
    click.echo("OK")


@main.command()
@click.option("--arch", type=click.Choice(["classic", "nonlinear_hidden", "reservoir"]),
              default="classic")
@click.option("--steps", type=int, default=3000)
@click.option("--repeats", type=int, default=3)
def bench(arch, steps, repeats):
    """Compare compiled and pure-Python kernel throughput on one trial."""
    from . import agents
    from .backend import TrialParams

    cfg = RunConfig()
    cfg.agent = preset_agent(arch, "single_reward")
    rng = np.random.default_rng(np.random.SeedSequence(42))
    model = agents.build_model(cfg.agent, rng)
    tp = TrialParams(start=np.array([0.0, -0.79]), target_x=0.6, target_y=0.6,
                     radius2=cfg.task.reward_radius ** 2, cue_idx0=0,
                     R=cfg.task.reward_magnitude, deliver=False, learn=True,
                     n_steps=steps, cue_on_steps=-1,
                     tau_rise=cfg.task.tau_reward_rise,
                     tau_decay=cfg.task.tau_reward_decay, consume_thresh=1.0)
    timings = {}
    for name in ("python", "compiled"):
        try:
            impl = get_impl(name)
        except ImportError:
            click.echo(f"{name:9s} unavailable")
            continue
        best = np.inf
        for _ in range(repeats):
            r = np.random.default_rng(np.random.SeedSequence(7))
            t0 = time.perf_counter()
            res = run_trial(model, tp, r, cfg.chunk_steps, impl)
            best = min(best, time.perf_counter() - t0)
        timings[name] = best
        click.echo(f"{name:9s} {res.steps / best:10.0f} steps/s   ({best * 1e3:.1f} ms)")
    if len(timings) == 2:
        click.echo(f"speedup   {timings['python'] / timings['compiled']:10.1f}x")


if __name__ == "__main__":
    main()
