"""ASEL/ASER graded-potential dynamics and the spiking gradient detectors N3/N4.

Each ASE neuron carries a three-state depolarizing channel population
(unbound, bound, inactive), a two-state hyperpolarizing population (ASER
only), an adaptive threshold concentration and a membrane potential.  All
updates are single forward-Euler steps and return new values; nothing here
mutates its inputs.

The side convention follows the biology: ``LEFT`` (ASEL) is excited by
concentration rising above its threshold, ``RIGHT`` (ASER) by concentration
falling below it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

#: Tolerated excursion of a channel fraction outside [0, 1] before a step is
#: declared unstable.
GUARD_BAND = 1e-6


class Side(enum.IntEnum):
    LEFT = 0
    RIGHT = 1


class InstabilityError(ValueError):
    """A channel fraction left [0, 1]: the time step is too large for the rates."""


@dataclass(frozen=True)
class DepolChannels:
    u: float = 1.0
    b: float = 0.0
    i: float = 0.0


@dataclass(frozen=True)
class HyperChannels:
    u: float = 1.0
    b: float = 0.0


@dataclass(frozen=True)
class AseParams:
    """Parameters of one ASE neuron.

    Potentials are in mV, times in s, concentrations in mM.  ``alpha_L0_d``
    and ``alpha_R0_d`` are binding rates per mM of threshold mismatch.
    The defaults are calibration artifacts (see README), not measured values.
    """

    tau_m: float = 0.5
    V0: float = 0.0
    Vd: float = 60.0
    Vh: float = -40.0
    k_m: float = 5.0
    beta_d: float = 1.0
    gamma_d: float = 0.3
    delta_d: float = 1.0
    beta_h: float = 0.5
    alpha_L0_d: float = 5.0
    alpha_R0_d: float = 5.0
    alpha_0_h: float = 0.5
    tau_L: float = 2.0
    tau_R: float = 2.0
    C_R_min: float = 1.0
    eta_R: float = 60.0
    V_T: float = 12.0
    V_max: float = 60.0

    def __post_init__(self):
        for name in ("tau_m", "tau_L", "tau_R"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("beta_d", "gamma_d", "delta_d", "beta_h",
                     "alpha_L0_d", "alpha_R0_d", "alpha_0_h", "k_m"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not self.V0 < self.V_T < self.V_max:
            raise ValueError("need V0 < V_T < V_max")
        if self.C_R_min <= 0:
            raise ValueError("C_R_min must be positive")


@dataclass(frozen=True)
class AseState:
    side: Side
    V: float
    depol: DepolChannels
    hyper: HyperChannels
    threshold: float

    @classmethod
    def adapted(cls, side: Side, C: float, p: AseParams) -> "AseState":
        """Resting neuron whose threshold already equals the ambient concentration."""
        thr = C if side == Side.LEFT else max(C, p.C_R_min)
        return cls(Side(side), p.V0, DepolChannels(), HyperChannels(), thr)


def heaviside(x: float) -> int:
    # H(0) = 0 so that nothing is driven exactly at a threshold.
    return 1 if x > 0 else 0


def sgn(x: float) -> int:
    return int(x > 0) - int(x < 0)


def alpha_depol(C: float, threshold: float, side: Side, scale: float) -> float:
    """Binding rate of the depolarizing channels.

    ASEL binds in proportion to how far ``C`` exceeds its threshold, ASER in
    proportion to how far ``C`` lies below it.  Both rates are non-negative.
    """
    if side == Side.LEFT:
        return scale * (C - threshold) * heaviside(C - threshold)
    return scale * (threshold - C) * heaviside(threshold - C)


def alpha_hyper(C: float, eta_R: float, alpha_0_h: float) -> float:
    return alpha_0_h * heaviside(C - eta_R)


def _check_fractions(*xs: float) -> None:
    for x in xs:
        if not (-GUARD_BAND <= x <= 1.0 + GUARD_BAND):
            raise InstabilityError(
                f"channel fraction {x!r} outside [0, 1]; reduce dt")


def step_depol(s: DepolChannels, alpha_d: float, p: AseParams, dt: float) -> DepolChannels:
    du = -alpha_d * s.u + p.beta_d * s.b + p.delta_d * s.i
    db = alpha_d * s.u - (p.beta_d + p.gamma_d) * s.b
    di = p.gamma_d * s.b - p.delta_d * s.i
    u, b, i = s.u + dt * du, s.b + dt * db, s.i + dt * di
    _check_fractions(u, b, i)
    return DepolChannels(u, b, i)


def step_hyper(s: HyperChannels, alpha_h: float, p: AseParams, dt: float) -> HyperChannels:
    flux = alpha_h * s.u - p.beta_h * s.b
    u, b = s.u - dt * flux, s.b + dt * flux
    _check_fractions(u, b)
    return HyperChannels(u, b)


def channel_conductance(b: float, k_m: float) -> float:
    return k_m * b * b


def threshold_rate(side: Side, threshold: float, C: float, p: AseParams) -> float:
    """Time derivative of the adaptive threshold (mM/s)."""
    if side == Side.LEFT:
        if C == threshold:
            # Held at equality, as for ASER; otherwise an adapted ASEL would
            # drop its threshold and re-excite itself.
            return 0.0
        return (C * heaviside(C - threshold) - threshold) / p.tau_L
    d = threshold - C
    return (C * heaviside(d) - sgn(d) * threshold) / p.tau_R


def adapt_threshold(state: AseState, C: float, p: AseParams, dt: float) -> float:
    thr = state.threshold + dt * threshold_rate(state.side, state.threshold, C, p)
    if state.side == Side.RIGHT:
        thr = max(thr, p.C_R_min)
    return thr


def step_membrane(V: float, k_d: float, k_h: float, p: AseParams, dt: float) -> float:
    dV = (p.V0 - V) + k_d * (p.Vd - V) + k_h * (p.Vh - V)
    return V + dt * dV / p.tau_m


def resting_potential(k_d: float, k_h: float, p: AseParams) -> float:
    """Fixed point of the membrane equation for frozen conductances."""
    return (p.V0 + k_d * p.Vd + k_h * p.Vh) / (1.0 + k_d + k_h)


def step_ase(state: AseState, C: float, p: AseParams, dt: float,
             spiking: bool = True) -> tuple[AseState, bool]:
    """Advance one ASE neuron by ``dt`` at sensed concentration ``C``.

    With ``spiking`` the neuron acts as a gradient detector: a potential at
    or above ``V_T`` is reported as ``V_max`` for that step and the next step
    reads exactly ``V0``.  Without it the graded potential is returned as is.
    """
    side = state.side
    scale = p.alpha_L0_d if side == Side.LEFT else p.alpha_R0_d
    a_d = alpha_depol(C, state.threshold, side, scale)
    depol = step_depol(state.depol, a_d, p, dt)
    if side == Side.RIGHT:
        hyper = step_hyper(state.hyper, alpha_hyper(C, p.eta_R, p.alpha_0_h), p, dt)
        k_h = channel_conductance(hyper.b, p.k_m)
    else:
        hyper, k_h = state.hyper, 0.0
    k_d = channel_conductance(depol.b, p.k_m)
    thr = adapt_threshold(state, C, p, dt)

    spiked = False
    if spiking and state.V >= p.V_T:
        V = p.V0
    else:
        V = step_membrane(state.V, k_d, k_h, p, dt)
        if spiking and V >= p.V_T:
            V, spiked = p.V_max, True
    return replace(state, V=V, depol=depol, hyper=hyper, threshold=thr), spiked
