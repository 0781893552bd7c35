import numpy as np
import pytest

from faultiso.errors import DimensionMismatch, InvalidChannel, InvalidScenario, InvalidSubset, ModelValidationError
from faultiso.system import (
    BENCHMARK_ZERO,
    ChannelSet,
    FaultChannel,
    FaultScenario,
    FaultSegment,
    FaultSignal,
    InputKind,
    InputSpec,
    NoiseSpec,
    StateSpaceModel,
    all_channels,
    benchmark_model,
    extended_observability,
    fault_subsystem,
    generate_input,
    markov_parameters,
    noise_factor,
    normalize_output_subset,
    random_state_space,
    simulate,
    stacked_fault_map,
    toeplitz,
)


def test_channel_parsing_and_order():
    assert FaultChannel.parse("a1") == FaultChannel.actuator(1)
    assert FaultChannel.parse(" S3 ").label == "s3"
    with pytest.raises(InvalidChannel):
        FaultChannel.parse("x1")
    with pytest.raises(InvalidChannel):
        FaultChannel.sensor(0)
    labels = [c.label for c in all_channels(2, 2)]
    assert labels == ["a1", "a2", "s1", "s2"]


def test_channel_validation_against_model(benchmark):
    FaultChannel.sensor(3).validate(benchmark.n_u, benchmark.n_y)
    with pytest.raises(InvalidChannel):
        FaultChannel.actuator(2).validate(benchmark.n_u, benchmark.n_y)


def test_normalize_output_subset():
    assert normalize_output_subset([3, 1], 3) == (1, 3)
    assert normalize_output_subset(None, 3) is None
    for bad in ([], [1, 1], [0, 2], [4]):
        with pytest.raises(InvalidSubset):
            normalize_output_subset(bad, 3)


def test_model_rejects_bad_shapes_and_unobservable_pairs():
    with pytest.raises(DimensionMismatch):
        StateSpaceModel(A=np.eye(2), B_u=np.ones((2, 1)), C=np.ones((1, 2)), D_u=np.zeros((2, 1)))
    with pytest.raises(ModelValidationError):
        StateSpaceModel(A=np.diag([0.5, 0.3]), B_u=np.ones((2, 1)), C=[[1.0, 0.0]], D_u=[[0.0]])
    with pytest.raises(ModelValidationError):
        StateSpaceModel(A=[[0.5]], B_u=[[1.0]], C=[[1.0]], D_u=[[0.0]], Sigma_e=[[-1.0]])


def test_model_dict_roundtrip(benchmark):
    restored = StateSpaceModel.from_dict(benchmark.to_dict())
    assert np.array_equal(restored.C, benchmark.C)
    assert np.array_equal(restored.Sigma_e, benchmark.Sigma_e)
    assert restored.name == "benchmark"


def test_fault_matrices(benchmark):
    b_f, d_f = benchmark.fault_matrices([FaultChannel.actuator(1), FaultChannel.sensor(2)])
    assert np.array_equal(b_f[:, 0], benchmark.B_u[:, 0])
    assert np.array_equal(b_f[:, 1], np.zeros(4))
    assert np.array_equal(d_f[:, 1], [0.0, 1.0, 0.0])


def test_benchmark_is_stable_with_exact_zero(benchmark):
    assert (benchmark.n, benchmark.n_u, benchmark.n_y) == (4, 1, 3)
    assert benchmark.spectral_radius < 1.0
    v = np.linalg.solve(BENCHMARK_ZERO * np.eye(4) - benchmark.A, benchmark.B_u)
    gain = benchmark.C @ v + benchmark.D_u
    assert abs(gain[0, 0]) < 1e-12
    assert abs(gain[2, 0]) < 1e-12
    assert abs(gain[1, 0]) > 1e-3


def test_tabulated_benchmark_keeps_coefficients():
    model = benchmark_model(exact_zero=False)
    assert model.name == "benchmark-tabulated"
    assert model.C[2, 1] == -0.868


def test_markov_parameters_and_toeplitz(benchmark):
    params = markov_parameters(benchmark, ChannelSet.inputs(), 4)
    assert np.array_equal(params[0], benchmark.D_u)
    assert np.allclose(params[2], benchmark.C @ benchmark.A @ benchmark.B_u)
    t = toeplitz(benchmark, ChannelSet.inputs(), 4)
    assert t.shape == (12, 4)
    assert np.allclose(t[:3, 1:], 0.0)
    assert np.allclose(t[3:6, 1:2], params[0])

    noise = markov_parameters(benchmark, ChannelSet.innovation(), 2, output_subset=[1, 3])
    assert np.array_equal(noise[0], np.eye(3)[[0, 2]])


def test_extended_observability_rank(benchmark):
    obs = extended_observability(benchmark, 5)
    assert obs.shape == (15, 4)
    assert np.linalg.matrix_rank(obs) == 4


def test_stacked_fault_map_shape(benchmark):
    subsystem = fault_subsystem(benchmark, [FaultChannel.actuator(1)], output_subset=[1, 3])
    assert subsystem.label == "a1 -> outputs 1,3"
    assert stacked_fault_map(subsystem, 5).shape == (10, 9)


def test_scenario_overlap_and_bounds():
    a1, s1 = FaultChannel.actuator(1), FaultChannel.sensor(1)
    with pytest.raises(InvalidScenario):
        FaultScenario([FaultSegment(0, 10, a1, FaultSignal.zero()), FaultSegment(5, 15, s1, FaultSignal.zero())])
    with pytest.raises(InvalidScenario):
        FaultSegment(5, 5, a1, FaultSignal.zero())
    scenario = FaultScenario([FaultSegment(0, 30, a1, FaultSignal.constant(1.0))])
    with pytest.raises(InvalidScenario):
        scenario.materialize(20, 1, 3)


def test_scenario_materialize_marks_active_channel():
    s2 = FaultChannel.sensor(2)
    scenario = FaultScenario([FaultSegment(3, 6, s2, FaultSignal.geometric_decay(0.5, 3, amplitude=2.0))])
    f, active = scenario.materialize(8, 1, 3)
    assert f.shape == (8, 4)
    assert np.allclose(f[3:6, 2], [2.0, 1.0, 0.5])
    assert active[2] is None and active[3] == s2 and active[6] is None
    assert np.allclose(scenario.scaled(2.0).materialize(8, 1, 3)[0], 2.0 * f)


def test_generate_input_kinds():
    prbs = generate_input(InputSpec(InputKind.PRBS, seed=7, level=2.0), 100, 2)
    assert prbs.shape == (100, 2)
    assert set(np.unique(prbs)) <= {-2.0, 2.0}
    assert np.array_equal(prbs, generate_input(InputSpec(InputKind.PRBS, seed=7, level=2.0), 100, 2))

    steps = generate_input(InputSpec(InputKind.MULTI_STEP, values=(1.0, 2.0), dwell=3), 8, 1)
    assert steps[:, 0].tolist() == [1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 1.0, 1.0]

    impulse = generate_input(InputSpec(InputKind.IMPULSE, channel=2), 4, 2)
    assert impulse.sum() == 1.0 and impulse[0, 1] == 1.0

    with pytest.raises(ValueError):
        generate_input(InputSpec(), 0, 1)


def test_simulate_sensor_fault_adds_to_output(benchmark):
    u = generate_input(InputSpec(InputKind.PRBS, seed=1), 40, 1)
    scenario = FaultScenario([FaultSegment(5, 10, FaultChannel.sensor(2), FaultSignal.constant(2.0))])
    healthy = simulate(benchmark, u)
    faulty = simulate(benchmark, u, scenario)
    diff = faulty.y - healthy.y
    assert np.allclose(diff[5:10, 1], 2.0)
    diff[5:10, 1] = 0.0
    assert np.allclose(diff, 0.0)


def test_simulate_actuator_fault_matches_shifted_input(benchmark):
    u = generate_input(InputSpec(InputKind.PRBS, seed=2), 50, 1)
    signal = FaultSignal.sinusoid(0.7, 0.05)
    scenario = FaultScenario([FaultSegment(10, 40, FaultChannel.actuator(1), signal)])
    faulty = simulate(benchmark, u, scenario)
    shifted = u.copy()
    shifted[10:40, 0] += signal.evaluate(np.arange(10, 40))
    assert np.allclose(faulty.y, simulate(benchmark, shifted).y, atol=1e-10)


def test_simulate_noise_is_seeded(benchmark):
    u = np.zeros((30, 1))
    first = simulate(benchmark, u, noise=NoiseSpec.on(5))
    second = simulate(benchmark, u, noise=NoiseSpec.on(5))
    assert np.array_equal(first.y, second.y)
    assert not np.allclose(first.e, 0.0)
    with pytest.raises(DimensionMismatch):
        simulate(benchmark, np.zeros((10, 2)))


def test_noise_factor_handles_semidefinite():
    sigma = np.array([[1.0, 1.0], [1.0, 1.0]])
    factor = noise_factor(sigma)
    assert np.allclose(factor @ factor.T, sigma)


def test_trajectory_slice_keeps_initial_state(benchmark):
    u = generate_input(InputSpec(InputKind.PRBS, seed=4), 20, 1)
    trajectory = simulate(benchmark, u)
    part = trajectory.slice(5, 15)
    assert part.sample_count == 10
    assert np.array_equal(part.x0, trajectory.x[5])
    assert part.active_labels() == ["healthy"] * 10


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_random_state_space_is_minimal_and_stable(seed):
    model = random_state_space(3, 1, 2, seed=seed, zero_feedthrough=True)
    assert model.spectral_radius == pytest.approx(0.9)
    assert np.array_equal(model.D_u, np.zeros((2, 1)))
    assert np.linalg.matrix_rank(extended_observability(model, 3)) == 3


def test_simulation_is_superposable(benchmark, rng):
    u1, u2 = rng.standard_normal((60, 1)), rng.standard_normal((60, 1))
    zero = simulate(benchmark, np.zeros((60, 1))).y
    combined = simulate(benchmark, u1 + u2).y
    separate = simulate(benchmark, u1).y + simulate(benchmark, u2).y - zero
    assert np.max(np.abs(combined - separate)) <= 1e-10 * max(1.0, np.max(np.abs(combined)))


def test_data_equation_holds_per_window(benchmark):
    L = 5
    u = generate_input(InputSpec(InputKind.PRBS, seed=6), 80, 1)
    scenario = FaultScenario(
        [
            FaultSegment(10, 40, FaultChannel.actuator(1), FaultSignal.sinusoid(0.8, 0.07)),
            FaultSegment(40, 70, FaultChannel.sensor(3), FaultSignal.constant(-1.5)),
        ]
    )
    trajectory = simulate(benchmark, u, scenario, noise=NoiseSpec.on(8))
    O = extended_observability(benchmark, L)
    T_u = toeplitz(benchmark, ChannelSet.inputs(), L)
    T_f = toeplitz(benchmark, ChannelSet.faults(*benchmark.channels()), L)
    T_e = toeplitz(benchmark, ChannelSet.innovation(), L)

    for k in range(trajectory.sample_count - L + 1):
        y = trajectory.y[k:k + L].reshape(-1)
        predicted = (
            O @ trajectory.x[k]
            + T_u @ trajectory.u[k:k + L].reshape(-1)
            + T_f @ trajectory.f[k:k + L].reshape(-1)
            + T_e @ trajectory.e[k:k + L].reshape(-1)
        )
        assert np.linalg.norm(y - predicted) <= 1e-10 * max(1.0, np.linalg.norm(y)), k


def test_impulse_response_is_markov_sequence(benchmark):
    impulse = generate_input(InputSpec(InputKind.IMPULSE, channel=1), 8, 1)
    response = simulate(benchmark, impulse).y
    params = markov_parameters(benchmark, ChannelSet.inputs(), 8)
    assert np.allclose(response, np.array([p[:, 0] for p in params]), rtol=1e-12, atol=1e-12)


@pytest.mark.slow
def test_innovation_sample_covariance(benchmark):
    trajectory = simulate(benchmark, np.zeros((100_000, 1)), noise=NoiseSpec.on(21))
    sample = np.cov(trajectory.e, rowvar=False)
    assert np.linalg.norm(sample - benchmark.Sigma_e) <= 0.05 * np.linalg.norm(benchmark.Sigma_e)
