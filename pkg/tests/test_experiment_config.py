import pytest

from exceptions import ConfigError
from models.experiment_config import ExperimentConfig, FormSource

def test_defaults():
    config = ExperimentConfig.create({})
    assert config.source == FormSource.DELTA
    assert config.ells == [1]
    assert config.xs == [1000.0]

def test_comma_lists_are_parsed_and_sorted():
    config = ExperimentConfig.create({"xs": "1e4, 1000", "ells": "1,-2", "qs": "3,4"})
    assert config.xs == [1000.0, 10_000.0]
    assert config.ells == [1, -2]
    assert config.qs == [3, 4]

def test_flags_override_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# delta by default\nsource = ones\nxs = 1000, 2000\ncutoff-exponent = 0.125\n", encoding="utf-8")
    config = ExperimentConfig.create({"xs": "3000", "threads": None}, path)
    assert config.source == FormSource.ONES
    assert config.xs == [3000.0]
    assert config.cutoff_exponent == 0.125

def test_echo_leaves_out_run_options():
    echo = ExperimentConfig.create({"threads": 4, "out": "/tmp/x"}).echo()
    assert "threads" not in echo
    assert "out" not in echo
    assert echo["source"] == "delta"

@pytest.mark.parametrize("flags", [
    {"ells": "0"},
    {"xs": "0.5"},
    {"source": "file"},
    {"z": 5.0, "c": 1.0},
    {"threads": 0}
])
def test_invalid_configs(flags):
    with pytest.raises(ConfigError):
        ExperimentConfig.create(flags)

def test_unknown_and_malformed_keys(tmp_path):
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("colour = blue\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        ExperimentConfig.create({}, unknown)
    malformed = tmp_path / "malformed.cfg"
    malformed.write_text("xs 1000\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        ExperimentConfig.create({}, malformed)
    with pytest.raises(ConfigError):
        ExperimentConfig.create({}, tmp_path / "missing.cfg")
