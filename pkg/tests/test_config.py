import json

import pytest

from chemonav.config import ExperimentConfig, dumps, from_dict, load_config, save_config, to_dict
from chemonav.network import ConfigError, N5


def test_round_trip(tmp_path):
    cfg = ExperimentConfig()
    path = tmp_path / "c.json"
    save_config(cfg, path)
    assert load_config(path) == cfg
    assert dumps(load_config(path)) == dumps(cfg)


def test_partial_override():
    cfg = from_dict({"network": {"ase_left": {"V_T": 8.0}, "lif": {"N5": {"C_mem": 0.05}}},
                     "duration": 100.0})
    assert cfg.network.ase_left.V_T == 8.0
    assert cfg.network.ase_right.V_T == ExperimentConfig().network.ase_right.V_T
    assert cfg.network.lif[N5].C_mem == 0.05
    assert cfg.duration == 100.0


def test_empty_is_default():
    assert from_dict({}) == ExperimentConfig()


@pytest.mark.parametrize("bad", [
    {"nope": 1},
    {"network": {"ase_left": {"Vx": 1}}},
    {"network": {"lif": {"N9": {"C_mem": 1}}}},
    {"network": {"I_bias5": 3.0}},
    {"motor": {"v1": -1}},
])
def test_rejects_bad(bad):
    with pytest.raises(ValueError):
        from_dict(bad)


def test_synapses_by_name():
    d = to_dict(ExperimentConfig())
    assert {s["source"] for s in d["network"]["synapses"]} == {"N1", "N2", "N3", "N4"}
    d["network"]["synapses"][0]["w"] = 5.5
    cfg = from_dict(json.loads(json.dumps(d)))
    assert cfg.network.synapses[0].w == 5.5


def test_start_heading_depends_on_seed_only():
    cfg = ExperimentConfig()
    assert cfg.start_state(3) == cfg.start_state(3)
    assert cfg.start_state(3).heading != cfg.start_state(4).heading
    fixed = from_dict({"random_heading": False, "heading": 0.25})
    assert fixed.start_state(9).heading == 0.25


def test_with_noise():
    cfg = ExperimentConfig().with_noise(True, 6.0)
    assert cfg.noise.enabled and cfg.noise.active_amplitude == 6.0
    with pytest.raises(ConfigError):
        from_dict({"network": {"sensor_stages": 5}})


def test_shipped_default_file_matches_code():
    from chemonav.config import DEFAULT_CONFIG_PATH
    assert load_config(DEFAULT_CONFIG_PATH) == ExperimentConfig()
    assert DEFAULT_CONFIG_PATH.read_text() == dumps(ExperimentConfig()) + "\n"
