"""Post-hoc analytics: spatial maps, hidden-layer dimensionality, statistics."""

from __future__ import annotations

import warnings

import numpy as np
from scipy import stats

from . import agents, encoding
from .config import AgentConfig

MAP_BINS = 15
MAP_EXTENT = 0.8


def _bin_index(positions: np.ndarray) -> tuple:
    edges = np.linspace(-MAP_EXTENT, MAP_EXTENT, MAP_BINS + 1)
    ix = np.clip(np.searchsorted(edges, positions[:, 0], side="right") - 1, 0, MAP_BINS - 1)
    iy = np.clip(np.searchsorted(edges, positions[:, 1], side="right") - 1, 0, MAP_BINS - 1)
    return ix, iy


def scalar_map(positions: np.ndarray, values: np.ndarray) -> dict:
    """15x15 binning; cell = mean of samples in the cell, None when empty.

    Grid convention: cells[row][col] with row = y bin (bottom to top),
    col = x bin (left to right).
    """
    ix, iy = _bin_index(positions)
    total = np.zeros((MAP_BINS, MAP_BINS))
    count = np.zeros((MAP_BINS, MAP_BINS), dtype=np.int64)
    np.add.at(total, (iy, ix), values)
    np.add.at(count, (iy, ix), 1)
    cells = [[(total[r, c] / count[r, c]) if count[r, c] else None
              for c in range(MAP_BINS)] for r in range(MAP_BINS)]
    return {"n": MAP_BINS, "extent": [-MAP_EXTENT, MAP_EXTENT],
            "cells": cells, "counts": count.tolist()}


def vector_map(positions: np.ndarray, vectors: np.ndarray) -> dict:
    """15x15 binning; cell = raw vector sum of samples (not normalized)."""
    ix, iy = _bin_index(positions)
    sx = np.zeros((MAP_BINS, MAP_BINS))
    sy = np.zeros((MAP_BINS, MAP_BINS))
    count = np.zeros((MAP_BINS, MAP_BINS), dtype=np.int64)
    np.add.at(sx, (iy, ix), vectors[:, 0])
    np.add.at(sy, (iy, ix), vectors[:, 1])
    np.add.at(count, (iy, ix), 1)
    cells = [[([sx[r, c], sy[r, c]] if count[r, c] else None)
              for c in range(MAP_BINS)] for r in range(MAP_BINS)]
    return {"n": MAP_BINS, "extent": [-MAP_EXTENT, MAP_EXTENT],
            "cells": cells, "counts": count.tolist()}


def _stack(records, attr):
    return np.concatenate([getattr(r.result, attr)[r.nav_offset:] for r in records])


def value_map(records: list) -> dict:
    """Critic-rate map over the probe trajectories of ProbeRecords."""
    return scalar_map(_stack(records, "pos"), _stack(records, "v"))


def td_map(records: list) -> dict:
    return scalar_map(_stack(records, "pos"), _stack(records, "delta"))


def policy_map(records: list) -> dict:
    return vector_map(_stack(records, "pos"), _stack(records, "act"))


# ---------------------------------------------------------------------------
# dimensionality

def sample_inputs(cfg: AgentConfig, rng: np.random.Generator, n_samples: int = 500,
                  grid_n: int = 50) -> np.ndarray:
    """Random (position, cue) input vectors: positions uniform over a grid_n^2
    lattice spanning the arena, cue uniform over the configured cues."""
    axis = np.linspace(-MAP_EXTENT, MAP_EXTENT, grid_n)
    centers = encoding.place_centers(cfg.n_place_axis, cfg.place_spacing)
    U = np.zeros((n_samples, centers.shape[0] + cfg.n_cues), dtype=np.float64)
    for i in range(n_samples):
        pos = (axis[rng.integers(grid_n)], axis[rng.integers(grid_n)])
        U[i, :centers.shape[0]] = encoding.place_rates(pos, centers, cfg.sigma_place)
        U[i, centers.shape[0] + rng.integers(cfg.n_cues)] = cfg.cue_gain
    return U


def dim_report(rates: np.ndarray, threshold: float = 0.95) -> dict:
    """Principal components needed to reach the variance threshold (SVD of the
    centered sample matrix). Degenerate (constant) data reports 0 components."""
    X = np.asarray(rates, dtype=np.float64)
    X = X - X.mean(axis=0, keepdims=True)
    sv = np.linalg.svd(X, compute_uv=False)
    var = sv ** 2
    total = var.sum()
    if total <= 0.0 or not np.isfinite(total):
        warnings.warn("degenerate (constant) rate matrix; dimensionality 0")
        return {"n_samples": int(X.shape[0]), "variance_threshold": threshold,
                "n_components": 0, "explained": []}
    explained = np.cumsum(var) / total
    n_comp = int(np.searchsorted(explained, threshold) + 1)
    return {"n_samples": int(X.shape[0]), "variance_threshold": threshold,
            "n_components": n_comp, "explained": explained.tolist()}


def hidden_dimensionality(cfg: AgentConfig, rng: np.random.Generator,
                          n_samples: int = 500, threshold: float = 0.95) -> dict:
    """DimReport for a feedforward architecture's rate layer."""
    if cfg.architecture == "reservoir":
        raise ValueError("dimensionality analysis is defined for feedforward architectures")
    model = agents.build_model(cfg, rng)
    U = sample_inputs(cfg, rng, n_samples=n_samples)
    rates = agents.forward_rates(model, U)
    rep = dim_report(rates, threshold)
    rep["architecture"] = cfg.architecture
    rep["layer_width"] = int(rates.shape[1])
    return rep


# ---------------------------------------------------------------------------
# statistics

def summarize(values, mu0: float | None = None) -> dict:
    """Mean, sample std, stderr, quartiles, and optional one-sample t vs mu0."""
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    out = {"n": int(n), "mean": float(x.mean()) if n else float("nan")}
    if n < 2:
        out.update(std=float("nan"), stderr=float("nan"),
                   q25=float(np.percentile(x, 25)) if n else float("nan"),
                   q75=float(np.percentile(x, 75)) if n else float("nan"),
                   degenerate=True)
        return out
    std = float(x.std(ddof=1))
    out.update(std=std, stderr=std / np.sqrt(n),
               q25=float(np.percentile(x, 25)), q75=float(np.percentile(x, 75)),
               degenerate=False)
    if mu0 is not None:
        if std == 0.0:
            out.update(t=0.0, p=1.0, degenerate=True)
        else:
            t, p = stats.ttest_1samp(x, mu0)
            out.update(t=float(t), p=float(p))
    return out


def one_sided_p(t: float, dof: int, greater: bool = True) -> float:
    return float(stats.t.sf(t if greater else -t, dof))


def sign_test(successes: int, n: int, p0: float = 0.5) -> float:
    """One-sided binomial tail: P[X >= successes] under Binomial(n, p0)."""
    return float(stats.binomtest(successes, n, p0, alternative="greater").pvalue)


def paired_onesided(a, b) -> float:
    """One-sided p for mean(a) > mean(b), paired by index."""
    res = stats.ttest_rel(a, b, alternative="greater")
    return float(res.pvalue)


def welch_onesided(a, b) -> float:
    """One-sided p for mean(a) > mean(b), independent samples, unequal variance."""
    res = stats.ttest_ind(a, b, equal_var=False, alternative="greater")
    return float(res.pvalue)
