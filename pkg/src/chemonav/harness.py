"""Batch runs, statistics, figure data and file export."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _layout as L
from ._backend import kernels
from .ase import AseParams, AseState, InstabilityError, Side
from .config import ExperimentConfig, to_dict
from .environment import ConcentrationField, export_grid_csv
from .levy import run_levy_trial
from .network import Trajectory, run_trial
from .results import TrialResult

TRAJ_COLUMNS = L.REC_COLS
RASTER_COLUMNS = ("t_s", "neuron_id")
KINDS = ("snn", "levy")


class ExportError(OSError):
    pass


# ---------------------------------------------------------------- batches

@dataclass(frozen=True)
class BatchStats:
    n_trials: int
    n_success: int
    success_rate: float
    mean_deviation: float | None
    mean_time_to_target: float | None
    times_to_target: tuple = field(default=(), repr=False)

    def fraction_under(self, cutoff: float) -> float:
        """Fraction of all trials that reached the set-point within ``cutoff`` s."""
        return sum(1 for t in self.times_to_target if t <= cutoff) / self.n_trials

    @classmethod
    def from_results(cls, results: Sequence[TrialResult]) -> "BatchStats":
        if not results:
            raise ValueError("no trial results to aggregate")
        times = tuple(sorted(r.time_to_target for r in results if r.success))
        devs = [r.post_lock_mean_deviation for r in results
                if r.success and r.post_lock_mean_deviation is not None]
        n = len(results)
        # fsum is exactly rounded, so the result does not depend on trial order
        return cls(
            n_trials=n,
            n_success=len(times),
            success_rate=len(times) / n,
            mean_deviation=math.fsum(devs) / len(devs) if devs else None,
            mean_time_to_target=math.fsum(times) / len(times) if times else None,
            times_to_target=times,
        )

    def to_dict(self) -> dict:
        return {
            "n_trials": self.n_trials,
            "n_success": self.n_success,
            "success_rate": self.success_rate,
            "mean_deviation": self.mean_deviation,
            "mean_time_to_target": self.mean_time_to_target,
        }


def run_single(config: ExperimentConfig, seed: int, kind: str = "snn"):
    """One trial from a resolved config.  Returns ``(Trajectory | None, TrialResult)``."""
    if kind == "snn":
        return run_trial(config.network, config.arena, config.start_state(seed),
                         config.duration, config.dt, seed, config.motor, config.noise,
                         config.record_interval)
    if kind == "levy":
        r = run_levy_trial(config.arena, config.arena.start, config.C_track,
                           config.duration, config.levy, seed, config.dt)
        return None, r
    raise ValueError(f"unknown trial kind {kind!r}; expected one of {KINDS}")


def _trial(args):
    kind, seed, config = args
    return run_single(config, seed, kind)[1]


class TrialError(RuntimeError):
    def __init__(self, index: int, seed: int, cause: BaseException):
        super().__init__(f"trial {index} (seed {seed}) failed: {cause}")
        self.index = index
        self.seed = seed


def run_batch(kind: str, n: int, base_seed: int = 0,
              config: ExperimentConfig | None = None, workers: int = 1):
    """Run ``n`` trials with seeds ``base_seed .. base_seed+n-1``.

    Returns ``(BatchStats, records)``.  With ``workers > 1`` trials run in a
    process pool; records come back in seed order either way.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if kind not in KINDS:
        raise ValueError(f"unknown trial kind {kind!r}; expected one of {KINDS}")
    config = config or ExperimentConfig()
    seeds = [base_seed + j for j in range(n)]
    records: list[TrialResult] = []
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            futs = [ex.submit(_trial, (kind, s, config)) for s in seeds]
            for j, f in enumerate(futs):
                try:
                    records.append(f.result())
                except Exception as e:
                    raise TrialError(j, seeds[j], e) from e
    else:
        for j, s in enumerate(seeds):
            try:
                records.append(_trial((kind, s, config)))
            except Exception as e:
                raise TrialError(j, s, e) from e
    return BatchStats.from_results(records), records


# ---------------------------------------------------------- ASE figure data

def _drive(C: np.ndarray, side: Side, p: AseParams, dt: float, spiking: bool,
           backend=None) -> np.ndarray:
    k = backend or kernels
    a = AseState.adapted(side, float(C[0]), p)
    st = np.array([a.V, 1.0, 0.0, 0.0, 1.0, 0.0, a.threshold])
    pa = np.array([getattr(p, f) for f in L.ASE_FIELDS], dtype=float)
    out = np.zeros((len(C), 8))
    status, steps = k.ase_drive(np.ascontiguousarray(C, dtype=float), int(side), pa,
                                dt, 1 if spiking else 0, st, out)
    if status == L.UNSTABLE:
        raise InstabilityError(f"channel state left [0, 1] at t={steps * dt:.6g} s; reduce dt")
    return out


def freq_curve(gradients: Iterable[float], V_T_values: Iterable[float],
               params: AseParams | None = None, duration: float = 40.0,
               dt: float = 1e-3, C0: float = 40.0, sides=(Side.LEFT, Side.RIGHT)):
    """Steady spike rate under constant concentration ramps.

    ASEL sees a rising ramp ``C0 + g t`` and ASER a falling one ``C0 - g t``.
    The rate is counted over the second half of ``duration``.  Returns rows
    ``(gradient, V_T, side, rate_hz)``.
    """
    params = params or AseParams()
    gradients = [float(g) for g in gradients]
    if any(g < 0 for g in gradients):
        raise ValueError("gradients are magnitudes and must be non-negative")
    n = int(round(duration / dt))
    t = np.arange(1, n + 1) * dt
    half = n // 2
    window = (n - half) * dt
    rows = []
    for vt in V_T_values:
        p = _replace(params, V_T=float(vt))
        for side in sides:
            sign = 1.0 if side == Side.LEFT else -1.0
            for g in gradients:
                C = C0 + sign * g * t
                if C.min() < 0:
                    raise ValueError(f"ramp {g} mM/s goes negative within {duration} s")
                out = _drive(C, Side(side), p, dt, True)
                rows.append((g, float(vt), Side(side).name[0], float(out[half:, 7].sum()) / window))
    return rows


def _replace(p: AseParams, **kw) -> AseParams:
    import dataclasses
    return dataclasses.replace(p, **kw)


@dataclass
class StepResponse:
    t: np.ndarray
    C: np.ndarray
    V: np.ndarray
    u: np.ndarray
    b: np.ndarray
    i: np.ndarray
    uh: np.ndarray
    bh: np.ndarray
    threshold: np.ndarray
    side: Side = Side.LEFT

    def peak(self, after: float = 0.0) -> float:
        """Largest excursion of V away from its value at ``after``."""
        m = self.t >= after
        if not m.any():
            return 0.0
        v = self.V[m]
        return float(np.max(np.abs(v - v[0])))


def profile_series(profile: Sequence[tuple], duration: float, dt: float) -> np.ndarray:
    """Sample a piecewise-constant schedule ``[(t_start, C), ...]`` on the step grid."""
    if not profile:
        raise ValueError("profile is empty")
    starts = np.array([float(s) for s, _ in profile])
    levels = np.array([float(c) for _, c in profile])
    if starts[0] != 0.0 or np.any(np.diff(starts) <= 0):
        raise ValueError("profile must start at t=0 with increasing switch times")
    if np.any(levels < 0):
        raise ValueError("concentrations must be non-negative")
    n = int(round(duration / dt))
    # value applied during step k is the level in force at t = k*dt
    t = np.arange(n) * dt
    return levels[np.searchsorted(starts, t + 0.5 * dt, side="right") - 1]


def step_response(profile: Sequence[tuple], duration: float, side=Side.LEFT,
                  params: AseParams | None = None, dt: float = 1e-3,
                  backend=None) -> StepResponse:
    """Non-spiking ASE response to a concentration schedule, all internal states.

    The neuron starts fully adapted to the first level.
    """
    p = params or AseParams()
    C = profile_series(profile, duration, dt)
    out = _drive(C, Side(side), p, dt, False, backend)
    t = np.arange(1, len(C) + 1) * dt
    return StepResponse(t, C, *(out[:, j].copy() for j in range(7)), side=Side(side))


# ------------------------------------------------------------------ export

def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e.strerror or e}") from e


def _read_text(path) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as f:
            return f.read()
    except OSError as e:
        raise ExportError(f"cannot read {path}: {e.strerror or e}") from e


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def trajectory_csv(traj: Trajectory) -> str:
    cols = traj.columns()
    return _csv(TRAJ_COLUMNS, zip(*(cols[c] for c in TRAJ_COLUMNS)))


def raster_csv(traj: Trajectory) -> str:
    return _csv(RASTER_COLUMNS, zip(traj.spike_times, traj.spike_neurons))


def trajectory_json(traj: Trajectory) -> str:
    cols = traj.columns()
    d = {c: [float(v) for v in cols[c]] for c in TRAJ_COLUMNS}
    d["spikes"] = {"t_s": [float(v) for v in traj.spike_times],
                   "neuron_id": [int(v) for v in traj.spike_neurons]}
    d["dt"] = traj.dt
    d["record_interval"] = traj.record_interval
    return _json(d)


def export_trajectory(traj: Trajectory, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        _write_text(path, trajectory_csv(traj))
    elif fmt == "json":
        _write_text(path, trajectory_json(traj))
    else:
        raise ValueError(f"unknown format {fmt!r}")


def export_raster(traj: Trajectory, path) -> None:
    _write_text(path, raster_csv(traj))


def _parse_csv(text: str, expected) -> dict:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != tuple(expected):
        raise ValueError(f"expected header {','.join(expected)}")
    body = rows[1:]
    return {c: [r[j] for r in body] for j, c in enumerate(expected)}


def read_trajectory(path, dt: float = 1e-3, record_interval: float = 0.1) -> Trajectory:
    """Load a trajectory written by :func:`export_trajectory` (either format)."""
    text = _read_text(path)
    if text.lstrip().startswith("{"):
        d = json.loads(text)
        cols = [np.array(d[c], dtype=float) for c in TRAJ_COLUMNS]
        sp = d.get("spikes", {"t_s": [], "neuron_id": []})
        return Trajectory(*cols, np.array(sp["t_s"], dtype=float),
                          np.array(sp["neuron_id"], dtype=np.int64),
                          d.get("dt", dt), d.get("record_interval", record_interval))
    cols = _parse_csv(text, TRAJ_COLUMNS)
    arrs = [np.array([float(v) for v in cols[c]]) for c in TRAJ_COLUMNS]
    return Trajectory(*arrs, np.zeros(0), np.zeros(0, dtype=np.int64), dt, record_interval)


def read_raster(path):
    cols = _parse_csv(_read_text(path), RASTER_COLUMNS)
    return (np.array([float(v) for v in cols["t_s"]]),
            np.array([int(v) for v in cols["neuron_id"]], dtype=np.int64))


def stats_document(stats: BatchStats, records: Sequence[TrialResult],
                   config: ExperimentConfig, kind: str = "snn") -> dict:
    return {
        "kind": kind,
        "stats": stats.to_dict(),
        "records": [r.to_dict() for r in records],
        "config": to_dict(config),
    }


def export_stats(stats: BatchStats, records: Sequence[TrialResult],
                 config: ExperimentConfig, path, fmt: str = "json",
                 kind: str = "snn") -> None:
    """Stats plus per-trial records.  JSON also echoes the full resolved config."""
    if fmt == "json":
        _write_text(path, _json(stats_document(stats, records, config, kind)))
    elif fmt == "csv":
        header = ("seed", "kind", "success", "time_to_target_s",
                  "post_lock_mean_deviation_mM", "duration_s")
        rows = [(r.seed, r.kind, int(r.success),
                 "" if r.time_to_target is None else r.time_to_target,
                 "" if r.post_lock_mean_deviation is None else r.post_lock_mean_deviation,
                 r.duration) for r in records]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
        _write_text(path, buf.getvalue())
    else:
        raise ValueError(f"unknown format {fmt!r}")


def read_records(path) -> list[TrialResult]:
    d = json.loads(_read_text(path))
    return [TrialResult.from_dict(r) for r in d["records"]]


def export_field(field_: ConcentrationField, path, step: float = 1.0) -> None:
    try:
        export_grid_csv(field_, path, step)
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e.strerror or e}") from e


def table_csv(header, rows) -> str:
    return _csv(header, rows)


def export_table(header, rows, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        _write_text(path, _csv(header, rows))
    elif fmt == "json":
        _write_text(path, _json([dict(zip(header, r)) for r in rows]))
    else:
        raise ValueError(f"unknown format {fmt!r}")


def step_response_rows(responses: Sequence[StepResponse]):
    """Join responses that share a time base into one wide table."""
    header = ["t_s", "C_mM"]
    for r in responses:
        s = r.side.name[0]
        header += [f"{s}_{n}" for n in ("V_mV", "u", "b", "i", "uh", "bh", "threshold_mM")]
    base = responses[0]
    cols = [base.t, base.C]
    for r in responses:
        cols += [r.V, r.u, r.b, r.i, r.uh, r.bh, r.threshold]
    return header, list(zip(*cols))
