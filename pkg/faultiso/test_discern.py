import json

import numpy as np
import pytest

from faultiso.dictionary import build_dictionaries, build_signatures
from faultiso.discern import (
    TheoremCase,
    augment_pair,
    check_nominal_annihilation,
    check_output_observability,
    classify_pair,
    count_zeros_nullity,
    indiscernible_pair,
    intersection_report,
    minimal_delay,
    pencil_zero_oracle,
    zero_dynamic_inputs,
)
from faultiso.errors import HorizonTooShort, InvalidChannel, NotLeftInvertible
from faultiso.kernel import nominal_kernel
from faultiso.system import (
    BENCHMARK_ZERO,
    FaultChannel,
    FaultScenario,
    FaultSegment,
    FaultSignal,
    fault_subsystem,
    random_state_space,
    simulate,
)

A1, A2 = FaultChannel.actuator(1), FaultChannel.actuator(2)
S1, S2, S3 = FaultChannel.sensor(1), FaultChannel.sensor(2), FaultChannel.sensor(3)


@pytest.fixture(scope="module")
def zero_subsystem(benchmark):
    """Actuator fault seen through outputs 1 and 3 only"""
    return fault_subsystem(benchmark, [A1], output_subset=[1, 3])


@pytest.fixture(scope="module")
def report(nominal_dictionaries, benchmark):
    return intersection_report(nominal_dictionaries, oracle=benchmark, strict=True)


def test_minimal_delay(benchmark):
    assert minimal_delay(benchmark, [A1]) == 0
    strictly_proper = random_state_space(3, 1, 1, seed=5, zero_feedthrough=True)
    assert minimal_delay(strictly_proper, [A1]) == 1


def test_minimal_delay_needs_enough_outputs():
    model = random_state_space(3, 2, 1, seed=0)
    with pytest.raises(NotLeftInvertible):
        minimal_delay(model, [A1, A2])


def test_zero_count_of_output_subsystem(zero_subsystem):
    count = count_zeros_nullity(zero_subsystem, L=5)
    assert count.finite == 1
    assert count.infinite == 0
    assert count.minimal_delay == 0
    assert count.to_dict()["total"] == 1


def test_zero_count_needs_long_horizon(zero_subsystem):
    with pytest.raises(HorizonTooShort):
        count_zeros_nullity(zero_subsystem, L=2)


def test_full_output_actuator_has_no_zeros(benchmark, data_kernel):
    assert count_zeros_nullity(benchmark, [A1], L=5).total == 0
    learned = count_zeros_nullity(data_kernel, [A1])
    assert (learned.finite, learned.infinite) == (0, 0)


def test_zero_dynamic_direction_is_geometric(benchmark, zero_subsystem):
    directions = zero_dynamic_inputs(zero_subsystem, L=5)
    assert directions.dim == 1
    f0 = directions.f0[:, 0]
    assert np.allclose(f0[1:], BENCHMARK_ZERO * f0[:-1], atol=1e-8)
    restricted = benchmark.restrict_outputs([1, 3])
    assert check_nominal_annihilation(restricted, directions.f0, [A1], 5) < 1e-8


def test_pencil_oracle_locates_zero(zero_subsystem):
    oracle = pencil_zero_oracle(zero_subsystem)
    assert oracle.finite == 1
    assert abs(oracle.locations[0] - BENCHMARK_ZERO) < 1e-6


def test_classify_pair():
    assert classify_pair(A1, A2, 3) == TheoremCase.ACT_ACT
    assert classify_pair(S1, A1, 3) == TheoremCase.ACT_SEN
    assert classify_pair(S1, S2, 3) == TheoremCase.SEN_SEN_MANY
    assert classify_pair(S1, S2, 2) == TheoremCase.SEN_SEN_TWO


def test_augment_pair(benchmark):
    pair = augment_pair(benchmark, A1, S2)
    assert pair.n_f == 2
    with pytest.raises(InvalidChannel):
        augment_pair(benchmark, A1, A1)


def test_output_observability(benchmark):
    result = check_output_observability(benchmark, [(3, 1), (2, 3)])
    assert result[(1, 3)] is True
    assert set(result) == {(1, 3), (2, 3)}


def test_report_flags_actuator_and_second_sensor(report):
    assert report.pair(A1, S2).d_cap == 1
    assert report.pair(A1, S2).prediction_matches is True
    assert report.pair(A1, S2).fault_directions.shape == (10, 1)
    assert [r.channels for r in report.indiscernible_pairs()] == [(A1, S2)]
    assert report.mismatches() == []


def test_report_formula_agrees(report):
    for record in report.records:
        assert record.formula == record.d_cap
    for c1, c2 in [(S1, S2), (S1, S3), (S2, S3)]:
        record = report.pair(c1, c2)
        assert record.theorem_case == TheoremCase.SEN_SEN_MANY
        assert record.d_cap == 0
        assert record.predicted == 0


def test_report_serialisation(tmp_path, report):
    path = report.save(tmp_path / "discernibility.json")
    document = json.loads(path.read_text())
    assert document["L"] == 5
    assert document["indiscernible_pairs"] == [["a1", "s2"]]
    assert document["dictionary_nullity"] == {"a1": 0, "s1": 0, "s2": 0, "s3": 0}
    assert document["zero_counts"]["a1"]["total"] == 0
    with pytest.raises(InvalidChannel):
        report.pair(A1, FaultChannel.sensor(7))


def test_two_sensor_pair_without_oracle():
    model = random_state_space(3, 1, 2, seed=11)
    kernel = nominal_kernel(model, 5)
    dictionaries = build_dictionaries(kernel, build_signatures(kernel))
    record = intersection_report(dictionaries).pair(S1, S2)
    assert record.theorem_case == TheoremCase.SEN_SEN_TWO
    assert record.d_cap == 3
    assert record.formula is None


def test_indiscernible_pair_gives_identical_outputs(benchmark):
    pairs = indiscernible_pair(benchmark, A1, S2, 5)
    assert pairs
    experiment = pairs[0]
    u = np.zeros((5, 1))
    first = simulate(
        benchmark,
        u,
        FaultScenario([FaultSegment(0, 5, A1, FaultSignal.series(experiment.f1))]),
        x0=experiment.x0,
    )
    second = simulate(benchmark, u, FaultScenario([FaultSegment(0, 5, S2, FaultSignal.series(experiment.f2))]))
    assert np.allclose(first.y, second.y, atol=1e-8)
    assert np.allclose(second.y[:, [0, 2]], 0.0)
