"""Leaky integrate-and-fire neurons, difference-of-exponentials synapses and
the set-point sensor currents feeding N1/N2."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .ase import heaviside

#: Spikes older than this many decay constants are ignored by
#: :func:`synaptic_current` (relative error below e**-10).
PRUNE_TAUS = 10.0


@dataclass(frozen=True)
class LeifParams:
    C_mem: float = 0.1
    g_L: float = 1.0
    V0: float = 0.0
    V_T: float = 10.0
    V_max: float = 30.0

    def __post_init__(self):
        if self.C_mem <= 0 or self.g_L <= 0:
            raise ValueError("C_mem and g_L must be positive")
        if not self.V0 < self.V_T < self.V_max:
            raise ValueError("need V0 < V_T < V_max")

    @property
    def tau(self) -> float:
        return self.C_mem / self.g_L

    @property
    def rheobase(self) -> float:
        """Smallest constant current that eventually drives a spike."""
        return self.g_L * (self.V_T - self.V0)


@dataclass(frozen=True)
class Synapse:
    source: int
    target: int
    w: float
    I0: float = 1.0
    tau: float = 1.0
    tau_s: float = 0.2

    def __post_init__(self):
        if not self.tau > self.tau_s > 0:
            raise ValueError("synapse needs tau > tau_s > 0")
        if self.w == 0:
            raise ValueError("synapse weight must be non-zero")

    def kernel(self, lag):
        """Current produced ``lag`` seconds after one presynaptic spike."""
        lag = np.asarray(lag, dtype=float)
        k = self.I0 * self.w * (np.exp(-lag / self.tau) - np.exp(-lag / self.tau_s))
        return np.where(lag >= 0, k, 0.0)

    @property
    def peak_lag(self) -> float:
        r = self.tau / self.tau_s
        return self.tau * self.tau_s / (self.tau - self.tau_s) * math.log(r)


@dataclass
class SpikeTrain:
    """Spike times (s) of one neuron, strictly increasing."""

    times: list[float] = field(default_factory=list)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("spike times must be strictly increasing")

    def append(self, t: float) -> None:
        if self.times and t <= self.times[-1]:
            raise ValueError(f"spike at {t} does not follow {self.times[-1]}")
        self.times.append(t)

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class SensorConfig:
    C_track: float = 55.0
    I_app0: float = 14.0

    def __post_init__(self):
        if self.I_app0 <= 0:
            raise ValueError("I_app0 must be positive")


class SensorChannel(str, Enum):
    ABOVE = "above"
    BELOW = "below"


def synaptic_current(t: float, train: SpikeTrain, syn: Synapse) -> float:
    """Sum of single-spike kernels over every spike at or before ``t``."""
    horizon = PRUNE_TAUS * syn.tau
    total = 0.0
    for tk in reversed(train.times):
        lag = t - tk
        if lag < 0:
            continue
        if lag > horizon:
            break
        total += math.exp(-lag / syn.tau) - math.exp(-lag / syn.tau_s)
    return syn.I0 * syn.w * total


def step_leif(V: float, I_app: float, I_syn: float, p: LeifParams,
              dt: float) -> tuple[float, bool]:
    """One Euler step of ``C dV/dt = -g_L (V - V0) + I``.

    A potential at or above threshold comes back as ``V_max`` with
    ``spiked=True``; feeding that value back in yields exactly ``V0``.
    """
    if V >= p.V_T:
        return p.V0, False
    V = V + dt * (-p.g_L * (V - p.V0) + I_app + I_syn) / p.C_mem
    if V >= p.V_T:
        return p.V_max, True
    return V, False


def lif_rate(I: float, p: LeifParams) -> float:
    """Closed-form firing rate (Hz) of the continuous-time neuron."""
    if I <= p.rheobase:
        return 0.0
    return 1.0 / (p.tau * math.log(I / (I - p.rheobase)))


def sensor_current(C: float, cfg: SensorConfig, channel) -> float:
    channel = SensorChannel(channel)
    if channel is SensorChannel.ABOVE:
        return cfg.I_app0 * heaviside(C - cfg.C_track)
    return cfg.I_app0 * heaviside(cfg.C_track - C)
