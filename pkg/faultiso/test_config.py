import pytest
import yaml

from faultiso.config import ConfigLoader, ExperimentConfig, ModelConfig
from faultiso.errors import ConfigValidationError
from faultiso.kernel import RankPolicyKind
from faultiso.system import FaultChannel, SignalKind


def test_builtin_configs_load(loader):
    first = loader.load_experiment("scenario1")
    assert first.L == 5
    assert first.kernel.dictionary_source == "nominal"
    assert not first.noise.enabled

    second = loader.load_experiment("scenario2")
    assert second.L == 15
    assert second.noise.snr_db == 25.0
    assert second.scenario.amplitude_reference == "innovation_std"
    assert second.kernel.rank_policy.build().kind == RankPolicyKind.FIXED_ORDER
    assert second.monte_carlo.trials == 50


def test_scenario_builds_segments(loader):
    scenario = loader.load_experiment("scenario1").scenario.build()
    assert [s.channel for s in scenario.segments] == [FaultChannel.actuator(1)] * 3
    assert scenario.segments[1].signal.kind == SignalKind.GEOMETRIC_DECAY
    assert scenario.segments[1].signal.base == 0.95


def test_loader_caches(loader):
    assert loader.load_experiment("scenario1") is loader.load_experiment("scenario1")
    cached = loader.load_experiment("scenario1")
    loader.clear_cache()
    assert loader.load_experiment("scenario1") is not cached


def test_field_errors_name_the_offending_fields(loader):
    raw = loader.load_raw("scenario1")
    raw["L"] = 1
    raw["kernel"]["rank_policy"] = {"kind": "fixed_order"}
    with pytest.raises(ConfigValidationError) as excinfo:
        loader.validate(raw)
    assert "L" in excinfo.value.field_errors
    assert "kernel.rank_policy" in excinfo.value.field_errors


def test_unknown_keys_are_rejected(loader):
    raw = loader.load_raw("scenario1")
    raw["thresholds"]["residul"] = 1.0
    with pytest.raises(ConfigValidationError) as excinfo:
        loader.validate(raw)
    assert "thresholds.residul" in excinfo.value.field_errors


def test_segment_must_fit_the_run(loader):
    raw = loader.load_raw("scenario1")
    raw["scenario"]["samples"] = 150
    with pytest.raises(ConfigValidationError) as excinfo:
        loader.validate(raw)
    assert "exceeds" in str(excinfo.value)


def test_bad_channel_label(loader):
    raw = loader.load_raw("scenario1")
    raw["scenario"]["segments"][0]["channel"] = "q1"
    with pytest.raises(ConfigValidationError):
        loader.validate(raw)


def test_noise_options_are_exclusive():
    with pytest.raises(ConfigValidationError):
        ConfigLoader.validate({"noise": {"enabled": True, "snr_db": 20.0, "covariance": [[1.0]]}})


def test_inline_model_requires_matrices():
    with pytest.raises(ConfigValidationError):
        ConfigLoader.validate({"model": {"source": "inline", "A": [[0.5]]}})
    model = ModelConfig(source="inline", A=[[0.5]], B_u=[[1.0]], C=[[1.0]], D_u=[[0.0]]).build()
    assert model.n == 1 and model.name == "inline"


def test_env_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("FAULTISO_TRIALS", "7")
    monkeypatch.setenv("FAULTISO_MASTER_SEED", "11")
    monkeypatch.setenv("FAULTISO_OUTPUT_DIR", str(tmp_path))
    config = ConfigLoader().load_experiment("scenario2")
    assert config.monte_carlo.trials == 7
    assert config.monte_carlo.master_seed == 11
    assert config.output_dir == str(tmp_path)


def test_env_override_must_be_integer(monkeypatch):
    monkeypatch.setenv("FAULTISO_WORKERS", "many")
    with pytest.raises(ConfigValidationError) as excinfo:
        ConfigLoader().load_experiment("scenario1")
    assert "FAULTISO_WORKERS" in excinfo.value.field_errors


def test_missing_and_malformed_files(tmp_path, loader):
    with pytest.raises(FileNotFoundError):
        loader.load_experiment(tmp_path / "absent.yaml")
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigValidationError):
        loader.load_experiment(listing)


def test_reference_config_round_trips():
    document = yaml.safe_load(ConfigLoader.reference_config())
    assert document["schema_version"] == 1
    assert "thresholds" in document and "monte_carlo" in document
    assert ConfigLoader.validate(document) == ExperimentConfig()


def test_user_file_loads(tmp_path, loader):
    path = tmp_path / "small.yaml"
    path.write_text(yaml.safe_dump({"name": "small", "L": 4, "model": {"source": "random", "n": 2, "n_y": 2}}))
    config = loader.load_experiment(path)
    assert config.name == "small"
    assert config.model.build().n == 2
