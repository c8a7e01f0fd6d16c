import dataclasses as dc
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chemonav import harness as H
from chemonav.ase import AseParams, Side
from chemonav.config import ExperimentConfig, from_dict, to_dict
from chemonav.network import Trajectory
from chemonav.results import TrialResult

SHORT = dc.replace(ExperimentConfig(), duration=40.0)


def _res(seed, t=None, dev=None, dur=100.0):
    return TrialResult(seed, t is not None, t, dev, dur)


def test_stats_from_results():
    rs = [_res(0, 10.0, 0.5), _res(1), _res(2, 50.0, 1.5), _res(3, 90.0, None)]
    s = H.BatchStats.from_results(rs)
    assert s.n_trials == 4 and s.n_success == 3
    assert s.success_rate == 0.75
    assert s.mean_deviation == 1.0
    assert s.mean_time_to_target == 50.0
    assert s.fraction_under(50.0) == 0.5
    assert s.fraction_under(5.0) == 0.0
    with pytest.raises(ValueError):
        H.BatchStats.from_results([])


@given(st.lists(st.tuples(st.booleans(), st.floats(0, 100), st.floats(0, 5)),
                min_size=1, max_size=40), st.randoms())
def test_stats_order_independent(spec, rnd):
    rs = [_res(j, t if ok else None, d if ok else None) for j, (ok, t, d) in enumerate(spec)]
    a = H.BatchStats.from_results(rs)
    rnd.shuffle(rs)
    assert H.BatchStats.from_results(rs) == a
    assert 0.0 <= a.success_rate <= 1.0


def test_single_trial_batch_equals_trial():
    stats, recs = H.run_batch("snn", 1, 7, SHORT)
    _, r = H.run_single(SHORT, 7)
    assert recs == [r]
    assert stats.success_rate == (1.0 if r.success else 0.0)


def test_batch_seeds_and_isolation():
    _, a = H.run_batch("levy", 4, 10, SHORT)
    assert [r.seed for r in a] == [10, 11, 12, 13]
    _, b = H.run_batch("levy", 3, 11, SHORT)
    assert a[1:] == b


def test_batch_bad_args():
    with pytest.raises(ValueError):
        H.run_batch("snn", 0, 0, SHORT)
    with pytest.raises(ValueError):
        H.run_batch("ballistic", 1, 0, SHORT)


def test_batch_error_names_trial():
    bad = dc.replace(SHORT, dt=0.5)
    with pytest.raises(H.TrialError, match="trial 0 \\(seed 3\\)"):
        H.run_batch("snn", 2, 3, bad)


def test_parallel_matches_serial():
    s1, r1 = H.run_batch("levy", 3, 0, SHORT, workers=1)
    s2, r2 = H.run_batch("levy", 3, 0, SHORT, workers=2)
    assert r1 == r2 and s1 == s2


def test_freq_curve_zero_gradient():
    rows = H.freq_curve([0.0], [8.0, 10.0, 12.0], duration=10.0)
    assert len(rows) == 6
    assert all(r[3] == 0.0 for r in rows)


def test_freq_curve_monotone_and_shifted():
    grads = [0.0, 0.02, 0.05, 0.1, 0.2, 0.5]
    rows = H.freq_curve(grads, [12.0, 10.0, 8.0], duration=30.0)
    for vt in (12.0, 10.0, 8.0):
        for side in "LR":
            f = [r[3] for r in rows if r[1] == vt and r[2] == side]
            assert all(b >= a for a, b in zip(f, f[1:])), (vt, side, f)
            assert f[-1] > 0


def test_freq_curve_rejects_negative():
    with pytest.raises(ValueError):
        H.freq_curve([-0.1], [10.0])


def test_step_response_constant():
    r = H.step_response([(0.0, 40.0)], 30.0)
    assert np.all(r.V == 0.0)
    assert np.all(r.u == 1.0)


def test_step_response_transient_and_grading():
    r = H.step_response([(0.0, 40.0), (5.0, 50.0)], 60.0)
    assert r.peak(5.0) > 10.0
    assert abs(r.V[-1]) < 0.05 * r.peak(5.0)
    assert np.allclose(r.u + r.b + r.i, 1.0, atol=1e-12)
    peaks = [H.step_response([(0.0, 40.0), (5.0, 40.0 + d)], 30.0).peak(5.0)
             for d in (2, 5, 10, 15)]
    assert all(b > a for a, b in zip(peaks, peaks[1:]))


def test_step_response_right_side_down_step():
    r = H.step_response([(0.0, 40.0), (2.0, 30.0)], 30.0, side=Side.RIGHT)
    assert r.peak(2.0) > 10.0
    assert r.threshold.min() >= AseParams().C_R_min


def test_profile_validation():
    with pytest.raises(ValueError):
        H.profile_series([(1.0, 40.0)], 5.0, 1e-3)
    with pytest.raises(ValueError):
        H.profile_series([(0.0, 40.0), (0.0, 50.0)], 5.0, 1e-3)
    with pytest.raises(ValueError):
        H.profile_series([], 5.0, 1e-3)
    c = H.profile_series([(0.0, 40.0), (0.002, 50.0)], 0.005, 1e-3)
    assert list(c) == [40.0, 40.0, 50.0, 50.0, 50.0]


def test_empty_trajectory_csv(tmp_path):
    p = tmp_path / "t.csv"
    H.export_trajectory(Trajectory.empty(), p)
    assert p.read_text() == ",".join(H.TRAJ_COLUMNS) + "\n"
    assert len(H.read_trajectory(p)) == 0


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_trajectory_round_trip(tmp_path, fmt):
    traj, _ = H.run_single(SHORT, 2)
    p = tmp_path / f"t.{fmt}"
    H.export_trajectory(traj, p, fmt)
    back = H.read_trajectory(p)
    for k, v in traj.columns().items():
        assert np.array_equal(back.columns()[k], v), k
    if fmt == "json":
        assert np.array_equal(back.spike_times, traj.spike_times)
        assert np.array_equal(back.spike_neurons, traj.spike_neurons)


def test_raster_round_trip(tmp_path):
    traj, _ = H.run_single(SHORT, 2)
    p = tmp_path / "r.csv"
    H.export_raster(traj, p)
    t, n = H.read_raster(p)
    assert p.read_text().splitlines()[0] == "t_s,neuron_id"
    assert np.array_equal(t, traj.spike_times) and np.array_equal(n, traj.spike_neurons)


def test_stats_json_has_config_and_reaggregates(tmp_path):
    cfg = dc.replace(SHORT, duration=300.0)
    stats, recs = H.run_batch("levy", 5, 0, cfg)
    p = tmp_path / "s.json"
    H.export_stats(stats, recs, cfg, p, kind="levy")
    doc = json.loads(p.read_text())
    assert doc["config"] == to_dict(cfg)
    assert from_dict(doc["config"]) == cfg
    assert H.BatchStats.from_results(H.read_records(p)).to_dict() == doc["stats"]


def test_stats_csv(tmp_path):
    stats, recs = H.run_batch("levy", 3, 0, SHORT)
    p = tmp_path / "s.csv"
    H.export_stats(stats, recs, SHORT, p, fmt="csv")
    lines = p.read_text().splitlines()
    assert lines[0].startswith("seed,kind,success")
    assert len(lines) == 4


def test_export_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    H.export_trajectory(H.run_single(SHORT, 4)[0], a)
    H.export_trajectory(H.run_single(SHORT, 4)[0], b)
    assert a.read_bytes() == b.read_bytes()


def test_export_error_names_path(tmp_path):
    bad = tmp_path / "missing" / "t.csv"
    with pytest.raises(H.ExportError, match="missing"):
        H.export_trajectory(Trajectory.empty(), bad)
    with pytest.raises(H.ExportError, match="missing"):
        H.export_field(SHORT.arena, bad)


def test_wrong_header_rejected(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        H.read_trajectory(p)
