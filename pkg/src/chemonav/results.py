"""Per-trial outcome records and the lock/deviation measure."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

#: Success band half-width around the set-point (mM).
LOCK_TOLERANCE = 0.5


@dataclass(frozen=True)
class TrialResult:
    seed: int
    success: bool
    time_to_target: Optional[float] = None
    post_lock_mean_deviation: Optional[float] = None
    duration: float = 0.0
    kind: str = "snn"

    def __post_init__(self):
        if self.success != (self.time_to_target is not None):
            raise ValueError("success must coincide with a time_to_target")
        if self.time_to_target is not None and self.time_to_target > self.duration:
            raise ValueError("time_to_target exceeds trial duration")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrialResult":
        return cls(**d)


def lock_and_deviation(t, C, C_track: float, tol: float = LOCK_TOLERANCE):
    """First time ``C`` enters ``C_track +/- tol`` and the mean absolute
    deviation from ``C_track`` over all later samples.

    Either value is ``None`` when undefined (never locked, or locked on the
    final sample).
    """
    t = np.asarray(t, dtype=float)
    C = np.asarray(C, dtype=float)
    if t.shape != C.shape:
        raise ValueError("time and concentration series differ in length")
    hits = np.flatnonzero(np.abs(C - C_track) <= tol)
    if hits.size == 0:
        return None, None
    first = hits[0]
    lock_time = float(t[first])
    after = np.abs(C[first + 1:] - C_track)
    if after.size == 0:
        return lock_time, None
    return lock_time, float(after.mean())
