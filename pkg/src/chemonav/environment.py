"""Bounded 2-D concentration field built from Gaussian hills and valleys."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np


class OutOfArenaError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianBump:
    x: float
    y: float
    amplitude: float  # mM, negative for a valley
    width: float      # mm, standard deviation

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("bump width must be positive")


@dataclass(frozen=True)
class NoiseModel:
    amplitude: float = 12.0
    enabled: bool = False

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("noise amplitude must be non-negative")

    @property
    def active_amplitude(self) -> float:
        return self.amplitude if self.enabled else 0.0


@dataclass(frozen=True)
class ConcentrationField:
    width: float = 100.0
    height: float = 100.0
    baseline: float = 40.0
    bumps: tuple[GaussianBump, ...] = ()
    clip_range: tuple[float, float] = (10.0, 70.0)
    start: tuple[float, float] = (50.0, 50.0)

    def __post_init__(self):
        object.__setattr__(self, "bumps", tuple(self.bumps))
        object.__setattr__(self, "clip_range", tuple(self.clip_range))
        object.__setattr__(self, "start", tuple(self.start))
        lo, hi = self.clip_range
        if not lo < hi:
            raise ValueError("clip_range must be increasing")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("arena dimensions must be positive")

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.width and 0.0 <= y <= self.height

    def bump_array(self) -> np.ndarray:
        """Bumps as an ``(n, 4)`` float array of (x, y, amplitude, width)."""
        arr = np.array([[b.x, b.y, b.amplitude, b.width] for b in self.bumps], dtype=float)
        return arr.reshape(-1, 4)

    def grid(self, step: float = 1.0):
        xs = np.arange(0.0, self.width + step / 2, step)
        ys = np.arange(0.0, self.height + step / 2, step)
        X, Y = np.meshgrid(xs, ys)
        return xs, ys, evaluate(self, X, Y)


def evaluate(f: ConcentrationField, x, y) -> np.ndarray:
    """Vectorized noiseless field; no bounds check."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = np.full(np.broadcast(x, y).shape, f.baseline)
    for b in f.bumps:
        r2 = (x - b.x) ** 2 + (y - b.y) ** 2
        c = c + b.amplitude * np.exp(-r2 / (2.0 * b.width * b.width))
    return np.clip(c, *f.clip_range)


def concentration_at(f: ConcentrationField, pos) -> float:
    x, y = pos
    if not f.contains(x, y):
        raise OutOfArenaError(f"position ({x}, {y}) outside {f.width}x{f.height} arena")
    c = f.baseline
    for b in f.bumps:
        dx, dy = x - b.x, y - b.y
        c += b.amplitude * math.exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width))
    lo, hi = f.clip_range
    return min(max(c, lo), hi)


def noisy_sample(f: ConcentrationField, pos, n: NoiseModel, rng: np.random.Generator) -> float:
    c = concentration_at(f, pos)
    a = n.active_amplitude
    if a == 0.0:
        return c
    return max(c + rng.uniform(-a, a), 0.0)


# One broad hill whose 55 mM contour lies ~40 mm from the start, plus three
# valleys.  The start point sits in the flat far tail of the hill.
DEFAULT_BUMPS = (
    GaussianBump(68.0, 68.0, 28.0, 25.0),
    GaussianBump(40.0, 15.0, -20.0, 7.0),
    GaussianBump(15.0, 45.0, -20.0, 7.0),
    GaussianBump(85.0, 15.0, -15.0, 10.0),
)


def default_arena() -> ConcentrationField:
    return ConcentrationField(baseline=40.0, bumps=DEFAULT_BUMPS, start=(15.0, 15.0))


def export_grid_csv(f: ConcentrationField, path, step: float = 1.0) -> None:
    xs, ys, values = f.grid(step)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x_mm", "y_mm", "C_mM"])
            for j, y in enumerate(ys):
                for i, x in enumerate(xs):
                    w.writerow([repr(float(x)), repr(float(y)), repr(float(values[j, i]))])
    except OSError as exc:
        raise OSError(f"cannot write field grid to {path}: {exc}") from exc
