"""The five renderers. Each returns (fig, config_hashes); render_spec saves.

Output PNGs are deterministic: fixed dpi, fixed fonts, no timestamps, and a
fixed Software tag. The bundle's config hash lands both in the PNG tEXt
metadata (Description) and in a small caption line on the canvas.
"""
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .figspec import FigureSpec, validate_inputs
from .reading import Bundle, FormatError

ARENA_HALF = 0.8   # positions in trials and records lie in [-0.8, 0.8]^2
DPI = 150


def _caption(fig, hashes):
    fig.text(0.01, 0.005, "config " + ",".join(sorted(hashes)),
             fontsize=5, color="0.45", family="monospace")


def _seed_matrix(rows, key, index_key):
    """(n_seeds, n_points) array of `key`, rows grouped by seed and ordered
    by index_key. Seeds with fewer points are truncated to the common length."""
    by_seed = {}
    for r in rows:
        by_seed.setdefault(r["seed"], []).append(r)
    series = [[r[key] for r in sorted(by_seed[s], key=lambda q: q[index_key])]
              for s in sorted(by_seed)]
    n = min(len(s) for s in series)
    return np.array([s[:n] for s in series])


def render_latency_curve(bundle: Bundle, options: dict):
    """Median escape latency over training trials, 25/75 quantile band."""
    train = [r for r in bundle.trials() if not r["probe"]]
    if not train:
        raise FormatError("trials.csv: no training rows to plot")
    lat = _seed_matrix(train, "latency", "trial")
    x = np.arange(1, lat.shape[1] + 1)
    med = np.median(lat, axis=0)
    q25, q75 = np.percentile(lat, [25, 75], axis=0)
    fig, ax = plt.subplots(figsize=(4.2, 3.0), dpi=DPI)
    ax.fill_between(x, q25, q75, alpha=0.3, color="tab:blue", linewidth=0)
    ax.plot(x, med, color="tab:blue", lw=1.5, label=f"median of {lat.shape[0]} seeds")
    ax.set_xlabel("training trial")
    ax.set_ylabel("escape latency (s)")
    ax.set_ylim(bottom=0)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout(rect=(0, 0.02, 1, 1))
    return fig, {bundle.config_hash}


def render_probe_bars(bundle: Bundle, options: dict):
    """Probe performance per probe index: mean over seeds, SEM error bars.

    options: metric (default visit_ratio for the multi-association tasks,
    time_near_correct otherwise).
    """
    multi = bundle.task_kind in ("multi_pa", "transient_cue_pa")
    metric = options.get("metric", "visit_ratio" if multi else "time_near_correct")
    rows = bundle.probe_metrics()
    if metric not in rows[0]:
        raise FormatError(f"probe_metrics.csv: no column {metric!r}")
    per_probe = {}
    for r in rows:
        per_probe.setdefault(r["probe_index"], {}).setdefault(r["seed"], []).append(r[metric])
    probes = sorted(per_probe)
    seed_means = [np.array([np.mean(v) for _, v in sorted(per_probe[p].items())])
                  for p in probes]
    mean = [m.mean() for m in seed_means]
    sem = [m.std(ddof=1) / np.sqrt(m.size) if m.size > 1 else 0.0 for m in seed_means]
    fig, ax = plt.subplots(figsize=(3.6, 3.0), dpi=DPI)
    ax.bar(range(len(probes)), mean, yerr=sem, capsize=3,
           color="0.75", edgecolor="0.2", error_kw={"lw": 1})
    if multi and metric == "visit_ratio":
        chance = 1.0 / bundle.n_pairs
        ax.axhline(chance, ls="--", lw=1, color="tab:red")
        ax.text(len(probes) - 0.5, chance, f" chance ({100 * chance:.1f}%)",
                fontsize=7, color="tab:red", va="bottom", ha="right")
    ax.set_xticks(range(len(probes)), [f"PT{p}" for p in probes])
    ax.set_ylabel(metric.replace("_", " "))
    fig.tight_layout(rect=(0, 0.02, 1, 1))
    return fig, {bundle.config_hash}


def render_trajectories(bundle: Bundle, options: dict):
    """Probe-trial paths in the arena. options: probe (default last),
    panels (default 6, first records by seed then trial)."""
    recs = bundle.records()
    probe = int(options.get("probe", max(r["probe_index"] for r in recs)))
    sel = sorted((r for r in recs if r["probe_index"] == probe),
                 key=lambda r: (r["seed"], r["trial"]))[:int(options.get("panels", 6))]
    if not sel:
        raise FormatError(f"probe_records.npz: no records at probe index {probe}")
    ncol = min(3, len(sel))
    nrow = -(-len(sel) // ncol)
    fig, axes = plt.subplots(nrow, ncol, figsize=(2.2 * ncol, 2.2 * nrow),
                             dpi=DPI, squeeze=False)
    for ax in axes.ravel():
        ax.set_axis_off()
    for ax, rec in zip(axes.ravel(), sel):
        ax.set_axis_on()
        pos = rec["pos"]
        ax.plot(pos[:, 0], pos[:, 1], lw=0.6, color="tab:blue", alpha=0.85)
        ax.plot(*pos[0], "o", ms=3, color="tab:green")
        tx, ty = rec["target"]
        ax.plot(tx, ty, "*", ms=8, color="tab:red")
        ax.set_xlim(-ARENA_HALF, ARENA_HALF)
        ax.set_ylim(-ARENA_HALF, ARENA_HALF)
        ax.set_xticks([])
        ax.set_yticks([])
        ax.set_aspect("equal")
        ax.set_title(f"seed {rec['seed']} cue {rec['cue_id']}", fontsize=7)
    fig.suptitle(f"probe {probe} trajectories", fontsize=9)
    fig.tight_layout(rect=(0, 0.03, 1, 0.96))
    return fig, {bundle.config_hash}


def render_map_composite(bundle: Bundle, options: dict):
    """Per-cue value heatmap with the policy vector field on top.

    options: probe (default: the last probe index with map files). Policy
    arrows are unit-normalized for display; magnitudes live in the files.
    """
    probe = int(options.get("probe", bundle.map_probe_indices()[-1]))
    vdocs = bundle.map_docs("value", probe)
    try:
        pdocs = {d["cue_id"]: d for d in bundle.map_docs("policy", probe)}
    except FormatError:
        pdocs = {}
    grids = [np.array([[np.nan if c is None else c for c in row] for row in d["cells"]])
             for d in vdocs]
    vmax = max(np.nanmax(g) for g in grids if np.isfinite(g).any())
    ncol = min(3, len(vdocs))
    nrow = -(-len(vdocs) // ncol)
    fig, axes = plt.subplots(nrow, ncol, figsize=(2.4 * ncol, 2.2 * nrow),
                             dpi=DPI, squeeze=False)
    for ax in axes.ravel():
        ax.set_axis_off()
    im = None
    for ax, doc, grid in zip(axes.ravel(), vdocs, grids):
        ax.set_axis_on()
        lo, hi = doc["extent"]
        im = ax.imshow(grid, origin="lower", extent=(lo, hi, lo, hi),
                       vmin=0.0, vmax=vmax, cmap="viridis")
        pd = pdocs.get(doc["cue_id"])
        if pd is not None:
            n = doc["n"]
            centers = lo + (np.arange(n) + 0.5) * (hi - lo) / n
            X, Y = np.meshgrid(centers, centers)
            U = np.zeros((n, n))
            V = np.zeros((n, n))
            for r in range(n):
                for c in range(n):
                    cell = pd["cells"][r][c]
                    if cell is None:
                        continue
                    norm = float(np.hypot(*cell))
                    if norm > 0:
                        U[r, c] = cell[0] / norm
                        V[r, c] = cell[1] / norm
            ax.quiver(X, Y, U, V, color="white", scale=28, width=0.004, alpha=0.8)
        ax.set_xticks([])
        ax.set_yticks([])
        ax.set_title(f"cue {doc['cue_id']}", fontsize=8)
    fig.colorbar(im, ax=axes, shrink=0.8, label="critic value")
    fig.suptitle(f"value and policy, probe {probe}", fontsize=9)
    return fig, {d["config_hash"] for d in vdocs}


def render_sweep_panel(rows: list, options: dict):
    """Associations learned and final visit ratio along one sweep axis.

    Failed sweep points are dropped from the statistics and counted in the
    caption. options: none.
    """
    good = [r for r in rows if not r["error"]]
    n_err = len(rows) - len(good)
    if not good:
        raise FormatError("sweep_summary.csv: every row carries an error")
    order = []
    for r in good:
        if r["value"] not in order:
            order.append(r["value"])
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(6.4, 3.0), dpi=DPI)
    for ax, key, label in ((ax1, "associations_learned", "associations learned"),
                           (ax2, "visit_ratio_mean", "visit ratio")):
        means, sems = [], []
        for v in order:
            vals = np.array([r[key] for r in good if r["value"] == v], dtype=float)
            means.append(vals.mean())
            sems.append(vals.std(ddof=1) / np.sqrt(vals.size) if vals.size > 1 else 0.0)
        ax.errorbar(range(len(order)), means, yerr=sems, fmt="o-", ms=4,
                    capsize=3, lw=1, color="tab:blue")
        ax.set_xticks(range(len(order)), order, fontsize=8)
        ax.set_ylabel(label)
    dims = sorted({r["dimensionality"] for r in good if r["dimensionality"]})
    note = f"dimensionality: {', '.join(dims)}" if dims else ""
    if n_err:
        note += ("; " if note else "") + f"{n_err} failed point(s) excluded"
    if note:
        fig.text(0.99, 0.005, note, fontsize=5, color="0.45", ha="right")
    fig.tight_layout(rect=(0, 0.03, 1, 1))
    return fig, {r["config_hash"] for r in good}


_RENDERERS = {
    "latency_curve": render_latency_curve,
    "probe_bars": render_probe_bars,
    "trajectories": render_trajectories,
    "map_composite": render_map_composite,
    "sweep_panel": render_sweep_panel,
}


def render_spec(spec: FigureSpec, out_dir) -> Path:
    """Validate inputs, render, save. Returns the PNG path."""
    source = validate_inputs(spec)
    fig, hashes = _RENDERERS[spec.kind](source, spec.options)
    _caption(fig, hashes)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / f"{spec.options.get('name', spec.kind)}.png"
    fig.savefig(out, format="png", dpi=DPI,
                metadata={"Software": "navplots", "Title": spec.kind,
                          "Description": "config_hash=" + ",".join(sorted(hashes))})
    plt.close(fig)
    return out
