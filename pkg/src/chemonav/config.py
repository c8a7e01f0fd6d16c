"""Experiment configuration: one JSON document covering every module.

Units are fixed per key (documented in the README): times in s, lengths in
mm, concentrations in mM, potentials in mV, angles in degrees, rates in 1/s
(binding scales in 1/(s mM)).  Missing keys fall back to the defaults, so a
config file only needs to state what it changes.
"""

from __future__ import annotations

import dataclasses as dc
import json
from dataclasses import dataclass, field
from pathlib import Path

from .ase import AseParams
from .environment import ConcentrationField, GaussianBump, NoiseModel, default_arena
from .leif import LeifParams, SensorConfig, Synapse
from .levy import LevyParams
from .network import NEURON_NAMES, ConfigError, MotorParams, NetworkConfig, WormState


@dataclass(frozen=True)
class ExperimentConfig:
    network: NetworkConfig = field(default_factory=NetworkConfig)
    motor: MotorParams = field(default_factory=MotorParams)
    arena: ConcentrationField = field(default_factory=default_arena)
    noise: NoiseModel = field(default_factory=NoiseModel)
    levy: LevyParams = field(default_factory=LevyParams)
    dt: float = 1e-3
    duration: float = 1500.0
    record_interval: float = 0.1
    random_heading: bool = True
    heading: float = 0.0  # rad, used when random_heading is false

    @property
    def C_track(self) -> float:
        return self.network.sensor.C_track

    def start_state(self, seed: int) -> WormState:
        import numpy as np
        h = self.heading
        if self.random_heading:
            h = float(np.random.default_rng([seed, 1]).uniform(-np.pi, np.pi))
        x, y = self.arena.start
        return WormState(x, y, h, self.motor.v1)

    def with_noise(self, enabled: bool, amplitude: float | None = None) -> "ExperimentConfig":
        amp = self.noise.amplitude if amplitude is None else amplitude
        return dc.replace(self, noise=NoiseModel(amp, enabled))


def _plain(obj):
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return {f.name: _plain(getattr(obj, f.name)) for f in dc.fields(obj)}


def to_dict(cfg: ExperimentConfig) -> dict:
    net = cfg.network
    return {
        "network": {
            "sensor": _plain(net.sensor),
            "ase_left": _plain(net.ase_left),
            "ase_right": _plain(net.ase_right),
            "lif": {NEURON_NAMES[j]: _plain(p) for j, p in sorted(net.lif.items())},
            "synapses": [
                {**_plain(s), "source": NEURON_NAMES[s.source], "target": NEURON_NAMES[s.target]}
                for s in net.synapses
            ],
            "I_bias5": net.I_bias5,
            "I_bias6": net.I_bias6,
            "sensor_tau": net.sensor_tau,
            "sensor_stages": net.sensor_stages,
        },
        "motor": _plain(cfg.motor),
        "arena": {
            "width": cfg.arena.width,
            "height": cfg.arena.height,
            "baseline": cfg.arena.baseline,
            "clip_range": list(cfg.arena.clip_range),
            "start": list(cfg.arena.start),
            "bumps": [_plain(b) for b in cfg.arena.bumps],
        },
        "noise": _plain(cfg.noise),
        "levy": _plain(cfg.levy),
        "dt": cfg.dt,
        "duration": cfg.duration,
        "record_interval": cfg.record_interval,
        "random_heading": cfg.random_heading,
        "heading": cfg.heading,
    }


def _merge(cls, default, overrides: dict):
    if not overrides:
        return default
    names = {f.name for f in dc.fields(cls)}
    unknown = set(overrides) - names
    if unknown:
        raise KeyError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return dc.replace(default, **overrides)


def _neuron(ref) -> int:
    if isinstance(ref, int):
        return ref
    if ref not in NEURON_NAMES:
        raise KeyError(f"unknown neuron {ref!r}")
    return NEURON_NAMES.index(ref)


def from_dict(d: dict) -> ExperimentConfig:
    """Build a config from a (possibly partial) dict; unknown keys are errors."""
    try:
        return _from_dict(d)
    except (TypeError, KeyError) as e:
        raise ConfigError(f"bad config: {e}") from e


def _from_dict(d: dict) -> ExperimentConfig:
    base = ExperimentConfig()
    d = dict(d)
    n = dict(d.pop("network", {}) or {})
    net = base.network
    lif = dict(net.lif)
    for name, vals in (n.pop("lif", {}) or {}).items():
        j = _neuron(name)
        lif[j] = _merge(LeifParams, lif.get(j, LeifParams()), vals)
    synapses = net.synapses
    if "synapses" in n:
        synapses = tuple(
            Synapse(**{**s, "source": _neuron(s["source"]), "target": _neuron(s["target"])})
            for s in n.pop("synapses"))
    net = dc.replace(
        net,
        sensor=_merge(SensorConfig, net.sensor, n.pop("sensor", None)),
        ase_left=_merge(AseParams, net.ase_left, n.pop("ase_left", None)),
        ase_right=_merge(AseParams, net.ase_right, n.pop("ase_right", None)),
        lif=lif,
        synapses=synapses,
        **n,
    )
    a = dict(d.pop("arena", {}) or {})
    arena = base.arena
    if "bumps" in a:
        a["bumps"] = tuple(GaussianBump(**b) for b in a["bumps"])
    if a:
        arena = dc.replace(arena, **a)
    cfg = dc.replace(
        base,
        network=net,
        motor=_merge(MotorParams, base.motor, d.pop("motor", None)),
        arena=arena,
        noise=_merge(NoiseModel, base.noise, d.pop("noise", None)),
        levy=_merge(LevyParams, base.levy, d.pop("levy", None)),
        **d,
    )
    cfg.network.validate()
    return cfg


DEFAULT_CONFIG_PATH = Path(__file__).with_name("data") / "default_config.json"


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return from_dict(json.load(fh))


def dumps(cfg: ExperimentConfig) -> str:
    return json.dumps(to_dict(cfg), indent=2, sort_keys=True)


def save_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(dumps(cfg) + "\n")
