"""Spiking chemotaxis network with ASE-style gradient detectors."""

from ._backend import BACKEND
from .ase import AseParams, AseState, InstabilityError, Side, step_ase
from .environment import ConcentrationField, GaussianBump, NoiseModel, default_arena
from .leif import LeifParams, SensorConfig, Synapse
from .network import (
    MotorParams, NetworkConfig, Trajectory, WormState, build_network, run_trial,
    step_network,
)
from .results import TrialResult, lock_and_deviation

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AseParams", "AseState", "InstabilityError", "Side", "step_ase",
    "ConcentrationField", "GaussianBump", "NoiseModel", "default_arena",
    "LeifParams", "SensorConfig", "Synapse", "MotorParams", "NetworkConfig",
    "Trajectory", "WormState", "build_network", "run_trial", "step_network",
    "TrialResult", "lock_and_deviation",
]
