import json
import math

import numpy as np
import pytest

from faultiso.classifier import Decision, DecisionStatus
from faultiso.config import ConfigLoader
from faultiso.errors import ModelValidationError, PipelineStageError, WindowTooLong, ZeroSignalPower
from faultiso.pipeline import (
    PipelineState,
    RunStatus,
    StageStatus,
    amplitude_scale,
    calibrate_threshold,
    check_excitation,
    innovation_std,
    monte_carlo,
    output_noise_power,
    run_scenario,
    score,
    snr_db,
    snr_to_noise_scale,
    transient_mask,
    trial_seeds,
)
from faultiso.system import FaultChannel, InputKind, InputSpec, NoiseSpec, StateSpaceModel, generate_input, simulate

A1, S1, S2 = FaultChannel.actuator(1), FaultChannel.sensor(1), FaultChannel.sensor(2)


def _fault(k, *channels):
    status = DecisionStatus.FAULT if len(channels) == 1 else DecisionStatus.AMBIGUOUS
    return Decision(k, status, tuple(channels), 1.0)


@pytest.fixture
def scored():
    active = [None] * 4 + [A1] * 4 + [S1] * 4
    decisions = [
        Decision(0, DecisionStatus.HEALTHY),
        _fault(1, A1),
        Decision(2, DecisionStatus.HEALTHY),
        Decision(3, DecisionStatus.HEALTHY),
        _fault(4, A1),
        _fault(5, A1, S2),
        Decision(6, DecisionStatus.HEALTHY),
        _fault(7, S1),
        _fault(8, S1),
        _fault(9, S1),
    ]
    return score(decisions, active, 3, [A1, S1, S2])


def test_transient_mask_marks_switch_windows():
    active = [None] * 4 + [A1] * 4 + [S1] * 4
    assert np.flatnonzero(transient_mask(active, 3, 10)).tolist() == [2, 3, 6, 7]


def test_score_counts(scored):
    assert scored.evaluated == 10
    assert (scored.healthy_windows, scored.false_alarms) == (4, 1)
    assert (scored.fault_active, scored.detected_active, scored.correct_detected) == (6, 5, 3)
    assert (scored.steady_detected, scored.correct_steady) == (4, 3)
    assert (scored.transient_detected, scored.correct_transient) == (1, 0)
    assert (scored.ambiguous, scored.ambiguous_containing_truth) == (1, 1)


def test_score_accuracies(scored):
    assert scored.accuracy == pytest.approx(0.6)
    assert scored.accuracy_all_active == pytest.approx(0.5)
    assert scored.accuracy_steady == pytest.approx(0.75)
    assert scored.accuracy_transient == 0.0
    assert scored.false_alarm_rate == pytest.approx(0.25)


def test_score_confusion(scored):
    assert scored.confusion["healthy"]["healthy"] == 3
    assert scored.confusion["healthy"]["a1"] == 1
    assert scored.confusion["a1"] == {"healthy": 1, "a1": 1, "s1": 1, "s2": 0, "ambiguous": 1}
    assert scored.confusion["s1"]["s1"] == 2
    frame = scored.confusion_frame()
    assert int(frame.values.sum()) == 10
    assert "definition" in scored.to_dict()


def test_score_without_faults_has_no_accuracy():
    card = score([Decision(0, DecisionStatus.HEALTHY)], [None, None], 2, [A1])
    assert card.accuracy is None
    assert card.accuracy_all_active is None
    assert card.false_alarm_rate == 0.0


def test_snr_helpers(benchmark):
    assert snr_db(1.0, 2.0) == pytest.approx(-10.0 * math.log10(2.0))
    assert snr_db(1.0, 0.0) == math.inf
    assert innovation_std(benchmark) == pytest.approx(math.sqrt((5.25 + 4.87 + 3.59) / 3))


def test_snr_scaling_hits_target(benchmark):
    u = generate_input(InputSpec(InputKind.PRBS, seed=0), 400, 1)
    scale = snr_to_noise_scale(benchmark, u, 20.0)
    assert snr_db(scale.signal_power, scale.noise_power) == pytest.approx(20.0)
    assert snr_to_noise_scale(benchmark, u, math.inf).alpha == 0.0
    lower = snr_to_noise_scale(benchmark, u, 17.0)
    assert lower.alpha / scale.alpha == pytest.approx(10 ** 0.3)


def test_scaled_noise_power_matches_simulation(benchmark):
    alpha = 0.01
    trajectory = simulate(benchmark, np.zeros((40000, 1)), noise=NoiseSpec.on(3, scale=alpha))
    measured = float(np.mean(trajectory.y[1000:] ** 2))
    assert measured == pytest.approx(alpha * output_noise_power(benchmark), rel=0.1)


def test_snr_errors(benchmark):
    with pytest.raises(ZeroSignalPower):
        snr_to_noise_scale(benchmark, np.zeros((50, 1)), 20.0)
    unstable = StateSpaceModel(A=[[1.2]], B_u=[[1.0]], C=[[1.0]], D_u=[[0.0]], Sigma_e=[[1.0]], K=[[0.5]])
    with pytest.raises(ModelValidationError):
        output_noise_power(unstable)


def test_pipeline_state_lifecycle():
    state = PipelineState("demo", trial=2)
    state.add_stage("data")
    state.add_stage("kernel")
    state.start_run()
    state.start_stage("data")
    state.complete_stage("data", samples=10)
    state.skip_stage("kernel", "not needed")
    state.warn("watch out")
    state.complete_run()

    assert state.completed_stages() == ["data"]
    assert state.is_complete()
    document = state.to_dict()
    assert document["status"] == "completed"
    assert document["stages"][0]["metadata"] == {"samples": 10}
    assert document["stages"][1]["status"] == "skipped"
    assert document["warnings"] == ["watch out"]
    assert state.created_at.tzinfo is not None
    assert document["completed_at"].endswith("+00:00")


def test_pipeline_state_failure():
    state = PipelineState("demo")
    state.start_run()
    state.start_stage("kernel")
    state.fail_stage("kernel", "boom")
    state.fail_run("stage 'kernel'")
    assert state.status == RunStatus.FAILED
    assert state.stages["kernel"].status == StageStatus.FAILED
    assert state.stages["kernel"].duration_ms is not None
    assert len(state.errors) == 2


def test_trial_seeds():
    first = trial_seeds(7, 0)
    assert first == trial_seeds(7, 0)
    assert len(set(first.values())) == len(first)
    assert first != trial_seeds(7, 1)
    assert trial_seeds(7, 1) == trial_seeds(8, 0)


@pytest.fixture(scope="module")
def scenario1():
    return ConfigLoader().load_experiment("scenario1")


@pytest.fixture(scope="module")
def scenario1_run(scenario1, tmp_path_factory):
    return run_scenario(scenario1, out_dir=tmp_path_factory.mktemp("scenario1"))


def test_scenario1_writes_artifacts(scenario1_run):
    out = scenario1_run.output_dir
    for name in (
        "filter.json", "dictionaries.json", "trajectory.csv", "residuals.csv",
        "angles.csv", "decisions.csv", "discernibility.json", "summary.json",
    ):
        assert (out / name).exists(), name
    summary = json.loads((out / "summary.json").read_text())
    assert summary["residual_dimension"] == 11
    assert summary["indiscernible_pairs"] == [["a1", "s2"]]
    assert summary["pipeline"]["status"] == "completed"


def test_scenario1_decisions(scenario1_run):
    labels = [d.label for d in scenario1_run.decisions]
    assert all(label == "healthy" for label in labels[:6])
    assert all(label == "a1" for label in labels[10:66])
    assert all(label == "ambiguous(a1|s2)" for label in labels[70:126])
    assert all(label == "a1" for label in labels[130:196])

    card = scenario1_run.score
    assert card.ambiguous >= 56
    assert card.ambiguous_containing_truth == card.ambiguous
    assert card.correct_detected + card.ambiguous == card.detected_active


def test_scenario1_is_deterministic(scenario1, scenario1_run, tmp_path):
    again = run_scenario(scenario1, out_dir=tmp_path)
    original = (scenario1_run.output_dir / "decisions.csv").read_bytes()
    assert (tmp_path / "decisions.csv").read_bytes() == original
    assert again.threshold == scenario1_run.threshold


def test_monte_carlo_single_trial_matches_run(scenario1, scenario1_run, tmp_path):
    summary = monte_carlo(scenario1, out_dir=tmp_path, trials=1)
    assert summary.trials == 1
    assert summary.mean_accuracy == pytest.approx(scenario1_run.accuracy)
    assert summary.std_accuracy == 0.0
    assert summary.totals["ambiguous"] == scenario1_run.score.ambiguous
    assert (tmp_path / "trials.csv").exists()
    document = json.loads((tmp_path / "montecarlo.json").read_text())
    assert document["master_seed"] == 0


def test_scenario1_records_excitation(scenario1_run):
    excitation = scenario1_run.state.stages["data"].metadata["excitation"]
    assert excitation["required"] == 4 + 5
    assert 0 < excitation["rank"] <= excitation["required"]
    assert excitation["satisfied"] == (excitation["rank"] == excitation["required"])

    summary = json.loads((scenario1_run.output_dir / "summary.json").read_text())
    data_stage = next(s for s in summary["pipeline"]["stages"] if s["name"] == "data")
    assert data_stage["metadata"]["excitation"] == excitation


def test_excitation_check(scenario1, benchmark, prbs_data):
    assert check_excitation(scenario1, prbs_data) == {"satisfied": True, "rank": 9, "required": 9}

    constant = simulate(benchmark, np.ones((100, 1)))
    result = check_excitation(scenario1, constant)
    assert not result["satisfied"]
    assert result["rank"] < result["required"] == 9

    short = simulate(benchmark, np.ones((3, 1)))
    assert check_excitation(scenario1, short) is None


def test_unexcited_healthy_data_is_flagged():
    loader = ConfigLoader()
    raw = loader.load_raw("scenario1")
    raw["data"]["healthy_input"] = {"kind": "multi_step", "values": [1.0], "dwell": 20}
    result = run_scenario(loader.validate(raw))
    assert result.state.stages["data"].metadata["excitation"]["satisfied"] is False
    assert any("persistently exciting" in w for w in result.state.warnings)


def test_window_longer_than_data_fails_in_kernel_stage():
    loader = ConfigLoader()
    raw = loader.load_raw("scenario1")
    raw["L"] = 250
    raw["kernel"]["dictionary_source"] = "data"
    config = loader.validate(raw)
    with pytest.raises(PipelineStageError) as excinfo:
        run_scenario(config)
    assert excinfo.value.stage == "kernel"
    assert isinstance(excinfo.value.cause, WindowTooLong)


def test_amplitude_and_threshold_helpers(scenario1, scenario1_run, benchmark):
    assert amplitude_scale(scenario1, benchmark) == 1.0
    relative = scenario1.model_copy(
        update={"scenario": scenario1.scenario.model_copy(update={"amplitude_reference": "innovation_std"})}
    )
    assert amplitude_scale(relative, benchmark) == 1.0

    fixed = scenario1.model_copy(
        update={"thresholds": scenario1.thresholds.model_copy(update={"residual": 0.25})}
    )
    validation = scenario1_run.trajectory
    assert calibrate_threshold(fixed, scenario1_run.kernel, validation) == 0.25
    assert scenario1_run.threshold > 0.0
