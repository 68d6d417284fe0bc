"""Backend selection and the chunked trial driver.

Two interchangeable kernels exist: the compiled Cython extension
(navac._kernel) and the pure-numpy reference (navac._kernel_py). Selection
happens at import: the compiled kernel when available, else the fallback.
NAVAC_BACKEND=python|compiled overrides; "compiled" raises if the extension is
missing.

Both kernels consume identical pre-drawn noise blocks of shape
(chunk, noise_width), one row per step, so a trial's random draw sequence is
independent of backend and chunk size.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import agents
from .agents import IC_FIRST_HIT, IC_FOUND, ST_ABORTED, ST_RUNNING


def _load(name: str):
    if name == "python":
        from . import _kernel_py
        return _kernel_py
    if name == "compiled":
        from . import _kernel
        return _kernel
    raise ValueError(f"unknown backend {name!r}")


def _select(choice: str):
    if choice in ("auto", "compiled"):
        try:
            return _load("compiled")
        except ImportError:
            if choice == "compiled":
                raise
    return _load("python")


_DEFAULT = _select(os.environ.get("NAVAC_BACKEND", "auto"))


def default_backend_name() -> str:
    return _DEFAULT.BACKEND


def available_backends() -> tuple:
    names = ["python"]
    try:
        _load("compiled")
        names.insert(0, "compiled")
    except ImportError:
        pass
    return tuple(names)


def get_impl(name: str = "auto"):
    if name in ("auto", ""):
        return _DEFAULT
    return _select(name)


@dataclass
class TrialParams:
    """Scalar protocol inputs for one trial, in kernel-ready form."""

    start: np.ndarray
    target_x: float
    target_y: float
    radius2: float
    cue_idx0: int          # 0-based; -1 for no cue
    R: float
    deliver: bool          # probes never disburse reward
    learn: bool            # plasticity on this trial
    n_steps: int
    cue_on_steps: int      # -1: cue on for the whole trial; >=0: transient protocol
    tau_rise: float
    tau_decay: float
    consume_thresh: float


@dataclass
class TrialResult:
    steps: int
    status: int
    found_step: int        # -1 if reward never delivered
    first_hit_step: int    # -1 if target never entered
    pos: np.ndarray        # (steps, 2) pre-move positions
    act: np.ndarray
    v: np.ndarray
    delta: np.ndarray
    reward_rate: np.ndarray


def run_trial(model: agents.AgentModel, tp: TrialParams, rng: np.random.Generator,
              chunk: int = 512, impl=None) -> TrialResult:
    """Run one trial to termination; all randomness flows through rng."""
    if impl is None:
        impl = _DEFAULT
    n = tp.n_steps
    tr_pos = np.empty((n, 2), dtype=np.float64)
    tr_act = np.empty((n, 2), dtype=np.float64)
    tr_v = np.empty(n, dtype=np.float64)
    tr_dl = np.empty(n, dtype=np.float64)
    tr_rr = np.empty(n, dtype=np.float64)

    st = agents.reset_state(model, tp.start, rng)
    k = 0
    status = ST_RUNNING
    while status == ST_RUNNING and k < n:
        noise = rng.standard_normal((chunk, model.noise_width))
        k, status = impl.run_chunk(model, st, tp, noise, tr_pos, tr_act, tr_v, tr_dl, tr_rr, k)
    if status == ST_ABORTED:
        # keep what was recorded; caller flags the trial as failed
        pass
    return TrialResult(
        steps=k, status=int(status),
        found_step=int(st.ic[IC_FOUND]), first_hit_step=int(st.ic[IC_FIRST_HIT]),
        pos=tr_pos[:k], act=tr_act[:k], v=tr_v[:k], delta=tr_dl[:k], reward_rate=tr_rr[:k],
    )
