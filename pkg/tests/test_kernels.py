"""Compiled kernels against the pure-Python twin."""

import numpy as np
import pytest

from chemonav import _layout as L
from chemonav._backend import compiled_kernels, python_kernels
from chemonav.ase import AseParams, AseState, Side, step_ase
from chemonav.environment import NoiseModel, default_arena
from chemonav.harness import step_response
from chemonav.levy import run_levy_trial
from chemonav.network import NetworkConfig, WormState, simulate

needs_ext = pytest.mark.skipif(compiled_kernels is None, reason="extension not built")


@needs_ext
def test_layout_agrees():
    lay = compiled_kernels.LAYOUT
    for name, value in lay.items():
        assert getattr(L, name) == value, name
    assert tuple(compiled_kernels.ASE_FIELDS) == L.ASE_FIELDS
    assert tuple(compiled_kernels.CTL_FIELDS) == L.CTL_FIELDS
    assert tuple(compiled_kernels.LEVY_FIELDS) == L.LEVY_FIELDS


def test_python_twin_matches_objects():
    p = AseParams()
    C = np.concatenate([np.full(3000, 40.0), np.full(5000, 52.0), np.linspace(52, 30, 8000)])
    for side in Side:
        got = step_response(list(zip([0.0], [40.0])), 0.001, side)  # smoke
        s = AseState.adapted(side, 40.0, p)
        ref = []
        for c in C:
            s, sp = step_ase(s, c, p, 1e-3)
            ref.append((s.V, s.depol.u, s.depol.b, s.depol.i, s.hyper.u, s.hyper.b,
                        s.threshold, sp))
        st = np.array([p.V0, 1, 0, 0, 1, 0, 40.0])
        out = np.zeros((len(C), 8))
        pa = np.array([getattr(p, f) for f in L.ASE_FIELDS])
        status, n = python_kernels.ase_drive(C, int(side), pa, 1e-3, 1, st, out)
        assert status == L.OK and n == len(C)
        np.testing.assert_allclose(out, np.array(ref, dtype=float), rtol=0, atol=1e-9)
        assert len(got.t) == 1


@needs_ext
@pytest.mark.parametrize("side", list(Side))
def test_ase_drive_bitwise(side):
    rng = np.random.default_rng(0)
    C = np.repeat(rng.uniform(20, 70, 60), 500)
    p = AseParams()
    pa = np.array([getattr(p, f) for f in L.ASE_FIELDS])
    outs = []
    for k in (compiled_kernels, python_kernels):
        st = np.array([p.V0, 1, 0, 0, 1, 0, 40.0])
        out = np.zeros((len(C), 8))
        k.ase_drive(C, int(side), pa, 1e-3, 1, st, out)
        outs.append(out)
    assert np.array_equal(outs[0], outs[1])


@needs_ext
@pytest.mark.parametrize("noise", [False, True])
def test_trial_bitwise(noise):
    arena = default_arena()
    w0 = WormState(*arena.start, 1.1, 0.3)
    runs = [simulate(NetworkConfig(), arena, w0, 30.0, seed=8,
                     noise=NoiseModel(12.0, noise), backend=k)
            for k in (compiled_kernels, python_kernels)]
    (a, wa), (b, wb) = runs
    for name, col in a.columns().items():
        assert np.array_equal(col, b.columns()[name]), name
    assert np.array_equal(a.spike_times, b.spike_times)
    assert np.array_equal(a.spike_neurons, b.spike_neurons)
    assert wa == wb


@needs_ext
def test_levy_bitwise():
    arena = default_arena()
    for seed in range(3):
        a = run_levy_trial(arena, arena.start, 55.0, 400.0, seed=seed, backend=compiled_kernels)
        b = run_levy_trial(arena, arena.start, 55.0, 400.0, seed=seed, backend=python_kernels)
        assert a == b


def test_buffer_full_reported():
    arena = default_arena()
    cfg = NetworkConfig()
    from chemonav.network import initial_state, pack_network
    from chemonav.network import MotorParams
    st = initial_state(cfg, WormState(*arena.start), 40.0)
    ctl, ase_p, lif_p, syn, bumps, ar = pack_network(cfg, MotorParams(), arena,
                                                     NoiseModel(), 1e-3, 1)
    rec = np.zeros((10, L.N_REC))
    spikes = np.zeros((100, 2), dtype=np.int64)
    istate = np.zeros(3, dtype=np.int64)
    status, n = python_kernels.snn_run(st, istate, 50, ctl, ase_p, lif_p, syn, bumps, ar,
                                       np.zeros(50), np.zeros(50), rec, spikes)
    assert status == L.BUFFER_FULL and n == 10
