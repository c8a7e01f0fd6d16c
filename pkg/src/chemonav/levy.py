"""Memoryless truncated Levy-flight forager used as the comparison baseline.

Flight lengths follow ``P(l) ~ l**-2`` on ``[s_min, s_max]``; each flight
starts in a uniformly random direction and is walked at constant speed,
with success checked at every time step along the way.  A wall reflects the
heading and the flight keeps its remaining length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _layout as L
from ._backend import kernels
from .environment import ConcentrationField, concentration_at
from .results import LOCK_TOLERANCE, TrialResult

DRAW_BLOCK = 4096


@dataclass(frozen=True)
class LevyParams:
    s_min: float = 0.2649   # mm, most probable run length
    s_max: float = 40.0     # mm, longest flight
    speed: float = 0.3      # mm/s
    exponent: float = 2.0

    def __post_init__(self):
        if not 0 < self.s_min < self.s_max:
            raise ValueError("need 0 < s_min < s_max")
        if self.speed <= 0:
            raise ValueError("speed must be positive")
        if self.exponent != 2.0:
            raise ValueError("only the l**-2 law is supported")


def sample_flight_length(u, p: LevyParams = LevyParams()):
    """Inverse CDF of the truncated ``l**-2`` law; ``u`` in [0, 1]."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)):
        raise ValueError("u must lie in [0, 1]")
    out = 1.0 / (1.0 / p.s_min - u * (1.0 / p.s_min - 1.0 / p.s_max))
    out = np.clip(out, p.s_min, p.s_max)  # rounding at u -> 1
    return float(out) if out.ndim == 0 else out


def flight_cdf(length, p: LevyParams = LevyParams()):
    length = np.clip(np.asarray(length, dtype=float), p.s_min, p.s_max)
    return (1.0 / p.s_min - 1.0 / length) / (1.0 / p.s_min - 1.0 / p.s_max)


def run_levy_trial(env: ConcentrationField, start, C_track: float, duration: float,
                   p: LevyParams = LevyParams(), seed: int = 0, dt: float = 1e-3,
                   tol: float = LOCK_TOLERANCE, backend=None) -> TrialResult:
    if duration < 0:
        raise ValueError("duration must be non-negative")
    k = backend or kernels
    concentration_at(env, start)  # bounds check
    n_steps = int(round(duration / dt))
    ctl = np.array([dt, C_track, tol, p.s_min, p.s_max, p.speed])
    st = np.array([start[0], start[1], 0.0, 0.0])
    istate = np.zeros(2, dtype=np.int64)
    rng = np.random.default_rng(seed)
    bumps = env.bump_array()
    arena = np.array([env.width, env.height, env.baseline, *env.clip_range])
    while True:
        draws = rng.random((DRAW_BLOCK, 2))
        istate[1] = 0
        status = k.levy_run(st, istate, n_steps, ctl, bumps, arena, draws)
        if status != L.NEED_DRAWS:
            break
    if status == L.SUCCESS:
        return TrialResult(seed, True, float(istate[0] * dt), None, duration, kind="levy")
    return TrialResult(seed, False, None, None, duration, kind="levy")


def levy_walk_lengths(n: int, p: LevyParams = LevyParams(), seed: int = 0) -> np.ndarray:
    return sample_flight_length(np.random.default_rng(seed).random(n), p)
