"""The seven-neuron navigation network and the worm's kinematics.

Neuron indices 0..6 stand for N1..N7:

* N1/N2 - set-point sensors (above / below ``C_track``), LEIF
* N3/N4 - spiking ASEL/ASER gradient detectors (rising / falling C)
* N5    - N1 & N3 coincidence, turns clockwise
* N6    - N2 & N4 coincidence, turns anticlockwise
* N7    - "lost" detector, random turn; excited by N1/N2, inhibited by N3/N4

Concentration reaches N1-N4 through a sensor front end of ``sensor_stages``
cascaded first-order low-pass stages (time constant ``sensor_tau``); zero
stages passes the sample through unchanged.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Mapping, Optional

import numpy as np

from . import _layout as L
from ._backend import kernels
from .ase import AseParams, AseState, InstabilityError, Side, step_ase
from .environment import ConcentrationField, NoiseModel, concentration_at
from .leif import LeifParams, SensorConfig, Synapse, sensor_current, step_leif
from .results import TrialResult, lock_and_deviation

N_NEURONS = 7
NEURON_NAMES = ("N1", "N2", "N3", "N4", "N5", "N6", "N7")
N1, N2, N3, N4, N5, N6, N7 = range(7)

# (source, target, sign) of every connection in the circuit.
WIRING = (
    (N1, N5, +1), (N3, N5, +1),
    (N2, N6, +1), (N4, N6, +1),
    (N1, N7, +1), (N2, N7, +1),
    (N3, N7, -1), (N4, N7, -1),
)

CHUNK = 1 << 16


class ConfigError(ValueError):
    pass


class Motor(str, Enum):
    NONE = "none"
    N5 = "N5"
    N6 = "N6"
    N7 = "N7"


_MOTOR_CODE = {Motor.NONE: L.LAST_NONE, Motor.N5: L.LAST_N5,
               Motor.N6: L.LAST_N6, Motor.N7: L.LAST_N7}
_CODE_MOTOR = {v: k for k, v in _MOTOR_CODE.items()}


def _default_synapses():
    tonic = dict(tau=1.0, tau_s=0.2)
    pulse = dict(tau=0.05, tau_s=0.01)
    inhib = dict(tau=2.0, tau_s=0.2)
    return (
        Synapse(N1, N5, 4.7, **tonic), Synapse(N3, N5, 30.0, **pulse),
        Synapse(N2, N6, 4.7, **tonic), Synapse(N4, N6, 30.0, **pulse),
        Synapse(N1, N7, 2.2, **tonic), Synapse(N2, N7, 2.2, **tonic),
        Synapse(N3, N7, -30.0, **inhib), Synapse(N4, N7, -30.0, **inhib),
    )


def _default_lif():
    sensor = LeifParams(C_mem=0.1)
    coinc = LeifParams(C_mem=0.02)
    return {N1: sensor, N2: sensor, N5: coinc, N6: coinc, N7: LeifParams(C_mem=0.5)}


@dataclass(frozen=True)
class MotorParams:
    turn_deterministic: float = 3.33      # deg
    turn_random_halfwidth: float = 22.5   # deg
    v1: float = 0.3                       # mm/s, exploring
    v2: float = 0.09                      # mm/s, correcting

    def __post_init__(self):
        for k, v in asdict(self).items():
            if v <= 0:
                raise ConfigError(f"motor parameter {k} must be positive")


@dataclass(frozen=True)
class NetworkConfig:
    sensor: SensorConfig = field(default_factory=SensorConfig)
    ase_left: AseParams = field(default_factory=AseParams)
    ase_right: AseParams = field(default_factory=AseParams)
    lif: Mapping[int, LeifParams] = field(default_factory=_default_lif)
    synapses: tuple = field(default_factory=_default_synapses)
    I_bias5: float = -30.0
    I_bias6: float = -30.0
    sensor_tau: float = 1.5
    sensor_stages: int = 2

    def validate(self) -> None:
        if self.I_bias5 >= 0 or self.I_bias6 >= 0:
            raise ConfigError("bias currents of N5 and N6 must be negative")
        if set(self.lif) != {N1, N2, N5, N6, N7}:
            raise ConfigError("LEIF parameters required for exactly N1, N2, N5, N6, N7")
        if self.sensor_stages not in (0, 1, 2):
            raise ConfigError("sensor_stages must be 0, 1 or 2")
        if self.sensor_stages and self.sensor_tau <= 0:
            raise ConfigError("sensor_tau must be positive")
        pairs = {}
        for s in self.synapses:
            key = (s.source, s.target)
            if key in pairs:
                raise ConfigError(f"duplicate synapse {key}")
            pairs[key] = s
        wanted = {(a, b): sign for a, b, sign in WIRING}
        if set(pairs) != set(wanted):
            raise ConfigError(f"synapses must be exactly {sorted(wanted)}")
        for key, sign in wanted.items():
            if pairs[key].w * sign <= 0:
                kind = "inhibitory" if sign < 0 else "excitatory"
                raise ConfigError(f"synapse {NEURON_NAMES[key[0]]}->"
                                  f"{NEURON_NAMES[key[1]]} must be {kind}")


@dataclass(frozen=True)
class WormState:
    x: float
    y: float
    heading: float = 0.0
    speed: float = 0.3
    last_motor: Motor = Motor.NONE


class Network:
    """Mutable network state driven one step at a time by :meth:`step`.

    This is the readable reference path; whole trials run through the
    compiled kernel instead (see :func:`run_trial`).
    """

    def __init__(self, cfg: NetworkConfig, C0: float):
        self.cfg = cfg
        self.synapses = tuple(cfg.synapses)
        self.V = [0.0] * N_NEURONS
        for j, p in cfg.lif.items():
            self.V[j] = p.V0
        self.ase = [AseState.adapted(Side.LEFT, C0, cfg.ase_left),
                    AseState.adapted(Side.RIGHT, C0, cfg.ase_right)]
        self.filt = [C0, C0]
        self.traces = [[0.0, 0.0] for _ in self.synapses]
        self.t = 0.0

    @property
    def n_synapses(self) -> int:
        return len(self.synapses)

    def sense(self, C: float, dt: float) -> float:
        st = self.cfg.sensor_stages
        if st == 0:
            return C
        ff = math.exp(-dt / self.cfg.sensor_tau)
        self.filt[0] = ff * self.filt[0] + (1.0 - ff) * C
        if st == 1:
            return self.filt[0]
        self.filt[1] = ff * self.filt[1] + (1.0 - ff) * self.filt[0]
        return self.filt[1]

    def step(self, C: float, dt: float, clamp: Optional[Mapping[int, bool]] = None):
        cfg = self.cfg
        c = self.sense(C, dt)
        spikes = [False] * N_NEURONS
        for j, channel in ((N1, "above"), (N2, "below")):
            self.V[j], spikes[j] = step_leif(
                self.V[j], sensor_current(c, cfg.sensor, channel), 0.0, cfg.lif[j], dt)
        for j, p in ((N3, cfg.ase_left), (N4, cfg.ase_right)):
            self.ase[j - N3], spikes[j] = step_ase(self.ase[j - N3], c, p, dt)
            self.V[j] = self.ase[j - N3].V
        if clamp:
            for j, forced in clamp.items():
                if j < N5:
                    spikes[j] = bool(forced)
        isyn = [0.0] * N_NEURONS
        for s, tr in zip(self.synapses, self.traces):
            tr[0] *= math.exp(-dt / s.tau)
            tr[1] *= math.exp(-dt / s.tau_s)
            if spikes[s.source]:
                tr[0] += 1.0
                tr[1] += 1.0
            isyn[s.target] += s.I0 * s.w * (tr[0] - tr[1])
        bias = {N5: cfg.I_bias5, N6: cfg.I_bias6, N7: 0.0}
        for j in (N5, N6, N7):
            self.V[j], spikes[j] = step_leif(self.V[j], bias[j], isyn[j], cfg.lif[j], dt)
        if clamp:
            for j, forced in clamp.items():
                if j >= N5:
                    spikes[j] = bool(forced)
        self.t += dt
        return spikes


def build_network(cfg: NetworkConfig, C0: float = 40.0) -> Network:
    cfg.validate()
    return Network(cfg, C0)


def step_network(net: Network, C: float, dt: float,
                 clamp: Optional[Mapping[int, bool]] = None) -> list[bool]:
    """Advance every neuron by one step; returns the spike flags of N1..N7.

    ``clamp`` forces the spike output of selected neurons (by index) before
    it reaches downstream synapses; their internal dynamics still run.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    return net.step(C, dt, clamp)


def _reflect(x, y, h, arena: ConcentrationField):
    if x < 0.0:
        x, h = -x, math.pi - h
    elif x > arena.width:
        x, h = 2.0 * arena.width - x, math.pi - h
    if y < 0.0:
        y, h = -y, -h
    elif y > arena.height:
        y, h = 2.0 * arena.height - y, -h
    return x, y, h


def _wrap(h: float) -> float:
    if h > math.pi:
        h -= 2.0 * math.pi
    elif h <= -math.pi:
        h += 2.0 * math.pi
    return h


def apply_motor(w: WormState, spikes, mp: MotorParams, rng, dt: float,
                arena: ConcentrationField, turn_u: Optional[float] = None) -> WormState:
    """Turn, pick the speed regime, advance and reflect off walls.

    N5 turns clockwise and N6 anticlockwise by the fixed angle; N7 adds a
    uniform random turn.  Simultaneous turns add up; for the speed marker
    N5 takes precedence over N6 over N7.
    """
    h = w.heading
    turn = math.radians(mp.turn_deterministic)
    if spikes[N5]:
        h -= turn
    if spikes[N6]:
        h += turn
    if spikes[N7]:
        u = rng.random() if turn_u is None else turn_u
        h += (2.0 * u - 1.0) * math.radians(mp.turn_random_halfwidth)
    last = w.last_motor
    if spikes[N5]:
        last = Motor.N5
    elif spikes[N6]:
        last = Motor.N6
    elif spikes[N7]:
        last = Motor.N7
    speed = w.speed
    if last in (Motor.N5, Motor.N6):
        speed = mp.v2
    elif last is Motor.N7:
        speed = mp.v1
    h = _wrap(h)
    x = w.x + speed * dt * math.cos(h)
    y = w.y + speed * dt * math.sin(h)
    x, y, h = _reflect(x, y, h, arena)
    return WormState(x, y, _wrap(h), speed, last)


@dataclass
class Trajectory:
    """Samples every ``record_interval`` seconds plus the full spike raster.

    ``C`` is the sensed (possibly noisy) sample, ``C_field`` the noiseless
    field at the same point.  ``spike_times``/``spike_neurons`` list every
    spike at native resolution.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray
    speed: np.ndarray
    C: np.ndarray
    C_field: np.ndarray
    spike_times: np.ndarray
    spike_neurons: np.ndarray
    dt: float = 1e-3
    record_interval: float = 0.1

    def __len__(self):
        return len(self.t)

    @classmethod
    def empty(cls, dt=1e-3, record_interval=0.1) -> "Trajectory":
        z = np.zeros(0)
        return cls(z, z, z, z, z, z, z, z, np.zeros(0, dtype=np.int64), dt, record_interval)

    def columns(self) -> dict:
        return dict(zip(L.REC_COLS, (self.t, self.x, self.y, self.heading,
                                     self.speed, self.C, self.C_field)))

    def spike_counts(self) -> np.ndarray:
        return np.bincount(self.spike_neurons, minlength=N_NEURONS)


def pack_network(cfg: NetworkConfig, mp: MotorParams, env: ConcentrationField,
                 noise: NoiseModel, dt: float, rec_every: int):
    """Flatten configuration into the arrays the kernels consume."""
    ctl = np.zeros(len(L.CTL_FIELDS))
    ctl[L.C_DT] = dt
    ctl[L.C_TRACK] = cfg.sensor.C_track
    ctl[L.C_IAPP] = cfg.sensor.I_app0
    ctl[L.C_B5] = cfg.I_bias5
    ctl[L.C_B6] = cfg.I_bias6
    ctl[L.C_TURN] = math.radians(mp.turn_deterministic)
    ctl[L.C_TURNR] = math.radians(mp.turn_random_halfwidth)
    ctl[L.C_V1] = mp.v1
    ctl[L.C_V2] = mp.v2
    ctl[L.C_STAU] = cfg.sensor_tau if cfg.sensor_stages else 1.0
    ctl[L.C_STAGES] = cfg.sensor_stages
    ctl[L.C_NOISE] = noise.active_amplitude
    ctl[L.C_REC] = rec_every
    ase_p = np.array([[getattr(p, f) for f in L.ASE_FIELDS]
                      for p in (cfg.ase_left, cfg.ase_right)], dtype=float)
    lif_p = np.zeros((N_NEURONS, 5))
    for j, p in cfg.lif.items():
        lif_p[j] = (p.C_mem, p.g_L, p.V0, p.V_T, p.V_max)
    syn = np.array([[s.source, s.target, s.w, s.I0, s.tau, s.tau_s]
                    for s in cfg.synapses], dtype=float).reshape(-1, 6)
    arena = np.array([env.width, env.height, env.baseline, *env.clip_range], dtype=float)
    return ctl, ase_p, lif_p, syn, env.bump_array(), arena


def initial_state(cfg: NetworkConfig, w0: WormState, C0: float) -> np.ndarray:
    st = np.zeros(L.X_SYN + 2 * len(cfg.synapses))
    st[L.X_X], st[L.X_Y], st[L.X_H] = w0.x, w0.y, _wrap(w0.heading)
    st[L.X_SPEED] = w0.speed
    st[L.X_LAST] = _MOTOR_CODE[Motor(w0.last_motor)]
    st[L.X_F1] = st[L.X_F2] = C0
    for j, p in cfg.lif.items():
        st[L.X_V + j] = p.V0
    for off, side, p in ((L.X_ASE3, Side.LEFT, cfg.ase_left),
                         (L.X_ASE4, Side.RIGHT, cfg.ase_right)):
        a = AseState.adapted(side, C0, p)
        st[off + L.A_V] = a.V
        st[off + L.A_U], st[off + L.A_B], st[off + L.A_I] = 1.0, 0.0, 0.0
        st[off + L.A_UH], st[off + L.A_BH] = 1.0, 0.0
        st[off + L.A_THR] = a.threshold
    st[L.X_V + N3] = cfg.ase_left.V0
    st[L.X_V + N4] = cfg.ase_right.V0
    return st


def simulate(cfg: NetworkConfig, env: ConcentrationField, w0: WormState,
             duration: float, dt: float = 1e-3, seed: int = 0,
             motor: MotorParams = MotorParams(), noise: NoiseModel = NoiseModel(),
             record_interval: float = 0.1, backend=None):
    """Run the network-driven worm and return ``(Trajectory, final WormState)``."""
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if dt <= 0:
        raise ValueError("dt must be positive")
    cfg.validate()
    k = backend or kernels
    rec_every = max(1, int(round(record_interval / dt)))
    n_steps = int(round(duration / dt))
    C0 = concentration_at(env, (w0.x, w0.y))
    st = initial_state(cfg, w0, C0)
    ctl, ase_p, lif_p, syn, bumps, arena = pack_network(cfg, motor, env, noise, dt, rec_every)
    rng = np.random.default_rng(seed)
    rec = np.zeros((n_steps // rec_every + 1, L.N_REC))
    istate = np.zeros(3, dtype=np.int64)
    amp = noise.active_amplitude
    spike_parts = []
    done = 0
    while done < n_steps:
        m = min(CHUNK, n_steps - done)
        noise_arr = rng.uniform(-amp, amp, m) if amp > 0 else np.zeros(m)
        turn_u = rng.random(m)
        spikes = np.zeros((N_NEURONS * (m // 2 + 1), 2), dtype=np.int64)
        istate[2] = 0
        status, steps = k.snn_run(st, istate, m, ctl, ase_p, lif_p, syn, bumps,
                                  arena, noise_arr, turn_u, rec, spikes)
        spike_parts.append(spikes[:istate[2]].copy())
        if status == L.UNSTABLE:
            raise InstabilityError(f"channel state left [0, 1] at t={(done + steps) * dt:.6g} s;"
                                   " reduce dt")
        if status != L.OK:
            raise RuntimeError(f"kernel stopped with status {status}")
        done += m
    r = rec[:istate[1]]
    sp = np.concatenate(spike_parts) if spike_parts else np.zeros((0, 2), dtype=np.int64)
    traj = Trajectory(r[:, 0].copy(), r[:, 1].copy(), r[:, 2].copy(), r[:, 3].copy(),
                      r[:, 4].copy(), r[:, 5].copy(), r[:, 6].copy(),
                      sp[:, 0] * dt, sp[:, 1].copy(), dt, rec_every * dt)
    final = WormState(float(st[L.X_X]), float(st[L.X_Y]), float(st[L.X_H]),
                      float(st[L.X_SPEED]), _CODE_MOTOR[int(st[L.X_LAST])])
    return traj, final


def result_from_trajectory(traj: Trajectory, C_track: float, duration: float,
                           seed: int) -> TrialResult:
    if len(traj) == 0:
        return TrialResult(seed, False, None, None, duration)
    lock, dev = lock_and_deviation(traj.t, traj.C_field, C_track)
    return TrialResult(seed, lock is not None, lock, dev, duration)


def run_trial(cfg: NetworkConfig, env: ConcentrationField, w0: WormState,
              duration: float, dt: float = 1e-3, seed: int = 0,
              motor: MotorParams = MotorParams(), noise: NoiseModel = NoiseModel(),
              record_interval: float = 0.1, backend=None):
    """One seeded trial: ``(Trajectory, TrialResult)``."""
    traj, _ = simulate(cfg, env, w0, duration, dt, seed, motor, noise,
                       record_interval, backend)
    return traj, result_from_trajectory(traj, cfg.sensor.C_track, duration, seed)
