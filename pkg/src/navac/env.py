"""Arena geometry, boundary rule, reward-delivery kernel, trial-level state.

The reward pulse is a difference of two exponentially decaying states. Both
states decay by their explicit-Euler factor (1 - dt/tau) each step, which makes
the discrete sum of rate*dt telescope to exactly R for any stable dt; the
continuous-time shape is recovered as dt -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HALF_WIDTH = 0.8
BOUNDARY_INSET = 0.01
REWARD_RADIUS = 0.03
TAU_RISE = 0.12
TAU_DECAY = 0.25


def reward_grid() -> np.ndarray:
    """The 49 candidate reward locations: 7x7 lattice, 0.2 m spacing, 0.2 m off the walls."""
    axis = np.linspace(-0.6, 0.6, 7)
    xx, yy = np.meshgrid(axis, axis, indexing="xy")
    return np.column_stack([xx.ravel(), yy.ravel()]).astype(np.float64)


def start_positions() -> np.ndarray:
    """Midpoints of the four boundary walls."""
    h = HALF_WIDTH
    return np.array([[0.0, h], [0.0, -h], [h, 0.0], [-h, 0.0]], dtype=np.float64)


def clamp_position(pos: np.ndarray) -> np.ndarray:
    """Per-axis boundary rule: a violated coordinate moves to +-(0.8 - 0.01).

    The other coordinate is untouched; corner violations clamp both axes.
    """
    out = np.array(pos, dtype=np.float64)
    lim = HALF_WIDTH - BOUNDARY_INSET
    for ax in range(2):
        if out[ax] > HALF_WIDTH:
            out[ax] = lim
        elif out[ax] < -HALF_WIDTH:
            out[ax] = -lim
    return out


def step_position(pos, action, dt: float, found: bool = False) -> np.ndarray:
    """One kinematic step; ignores the action once the reward has been found."""
    action = np.asarray(action, dtype=np.float64)
    if not np.all(np.isfinite(action)):
        raise FloatingPointError("non-finite action component")
    if found:
        return np.array(pos, dtype=np.float64)
    return clamp_position(np.asarray(pos, dtype=np.float64) + action * dt)


def at_reward(pos, center, radius: float = REWARD_RADIUS) -> bool:
    """Closed disc: distance <= radius counts as inside."""
    d = np.asarray(pos, dtype=np.float64) - np.asarray(center, dtype=np.float64)
    return float(d @ d) <= radius * radius


@dataclass
class RewardKernel:
    """Two-state delivery kernel; emitted rate (decay - rise)/(tau_decay - tau_rise)."""

    tau_rise: float = TAU_RISE
    tau_decay: float = TAU_DECAY
    rise: float = 0.0
    decay: float = 0.0
    consumed: float = 0.0

    def step(self, dt: float, acquired_now: bool = False, R: float = 1.0) -> float:
        if acquired_now:
            self.rise += R
            self.decay += R
        rate = (self.decay - self.rise) / (self.tau_decay - self.tau_rise)
        self.consumed += rate * dt
        self.rise *= 1.0 - dt / self.tau_rise
        self.decay *= 1.0 - dt / self.tau_decay
        return rate

    def remaining(self) -> float:
        """Future emission implied by the current states (telescoping identity)."""
        return (self.tau_decay * self.decay - self.tau_rise * self.rise) / (self.tau_decay - self.tau_rise)


@dataclass
class TrialState:
    position: np.ndarray = field(default_factory=lambda: np.zeros(2))
    elapsed: float = 0.0
    reward_found_at: float | None = None
    consumed_fraction: float = 0.0
    terminated: bool = False
    t_max: float = 300.0
