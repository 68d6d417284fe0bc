"""Sensory encoding: place-cell rates, cue one-hots, input composition."""

from __future__ import annotations

import numpy as np

N_PLACE = 49
N_CUE = 18
N_BUMP = 54


def place_centers(n_axis: int = 7, spacing: float = 0.267) -> np.ndarray:
    """(n_axis^2, 2) lattice of place-field centers, centered on the arena.

    With the default 7 x 0.267 m the corner centers sit at +-0.801, a hair
    outside the +-0.8 walls; kept as configured rather than rescaled.
    """
    half = (n_axis - 1) / 2.0
    axis = (np.arange(n_axis) - half) * spacing
    xx, yy = np.meshgrid(axis, axis, indexing="xy")
    return np.column_stack([xx.ravel(), yy.ravel()]).astype(np.float64)


def place_rates(position, centers: np.ndarray, sigma: float) -> np.ndarray:
    """Gaussian tuning u_i = exp(-|x - x_i|^2 / (2 sigma^2)); entries in (0, 1]."""
    pos = np.asarray(position, dtype=np.float64)
    d2 = np.sum((centers - pos) ** 2, axis=1)
    return np.exp(-d2 / (2.0 * sigma * sigma))


def cue_vector(cue_id: int, active: bool, n_cues: int = N_CUE, gain: float = 3.0) -> np.ndarray:
    """One-hot cue code (1-based cue_id) with the configured gain; zeros when inactive."""
    if not (1 <= cue_id <= n_cues):
        raise ValueError(f"cue_id must be in 1..{n_cues}, got {cue_id}")
    vec = np.zeros(n_cues, dtype=np.float64)
    if active:
        vec[cue_id - 1] = gain
    return vec


def compose_input(place: np.ndarray, cue: np.ndarray, bump=None) -> np.ndarray:
    """Ordered concatenation [place, cue] or [place, cue, bump]; no rescaling."""
    place = np.asarray(place, dtype=np.float64)
    cue = np.asarray(cue, dtype=np.float64)
    if place.shape != (N_PLACE,):
        raise ValueError(f"place vector must have length {N_PLACE}, got {place.shape}")
    if cue.shape != (N_CUE,):
        raise ValueError(f"cue vector must have length {N_CUE}, got {cue.shape}")
    parts = [place, cue]
    if bump is not None:
        bump = np.asarray(bump, dtype=np.float64)
        if bump.shape != (N_BUMP,):
            raise ValueError(f"bump vector must have length {N_BUMP}, got {bump.shape}")
        parts.append(bump)
    return np.concatenate(parts)
