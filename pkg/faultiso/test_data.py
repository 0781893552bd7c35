import numpy as np
import pytest

from faultiso.data import check_rank_condition, hankel, load_trajectory, save_trajectory, window
from faultiso.errors import DimensionMismatch, WindowOutOfRange, WindowTooLong
from faultiso.system import FaultChannel, FaultScenario, FaultSegment, FaultSignal, simulate


def test_hankel_layout():
    signal = np.arange(12, dtype=float).reshape(6, 2)
    stack = hankel(signal, 3)
    assert stack.matrix.shape == (6, 4)
    assert stack.depth == 4
    assert stack.matrix[:, 0].tolist() == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
    assert stack.matrix[:, 1].tolist() == [2.0, 3.0, 4.0, 5.0, 6.0, 7.0]


def test_hankel_column_equals_window():
    signal = np.random.default_rng(0).standard_normal((20, 3))
    stack = hankel(signal, 4)
    assert np.array_equal(stack.matrix[:, 7], window(signal, 7, 4).entries)


def test_hankel_limits():
    assert hankel(np.ones((5, 1)), 5).depth == 1
    with pytest.raises(WindowTooLong):
        hankel(np.ones((5, 1)), 6)
    with pytest.raises(ValueError):
        hankel(np.ones((5, 1)), 0)


def test_hankel_shift_structure(rng):
    signal = rng.standard_normal((30, 2))
    stack = hankel(signal, 6)
    d = 2
    for j in range(stack.depth - 1):
        assert np.array_equal(stack.matrix[d:, j], stack.matrix[:-d, j + 1])


def test_window_out_of_range():
    with pytest.raises(WindowOutOfRange):
        window(np.ones((10, 1)), 8, 3)
    with pytest.raises(WindowOutOfRange):
        window(np.ones((10, 1)), -1, 3)


def test_rank_condition_holds_for_prbs(prbs_data):
    u_stack = hankel(prbs_data.u, 5)
    report = check_rank_condition(prbs_data.x[:u_stack.depth].T, u_stack)
    assert report == {"satisfied": True, "rank": 9, "required": 9}


def test_rank_condition_fails_for_constant_input(benchmark):
    trajectory = simulate(benchmark, np.ones((100, 1)))
    u_stack = hankel(trajectory.u, 5)
    report = check_rank_condition(trajectory.x[:u_stack.depth].T, u_stack)
    assert not report["satisfied"]
    with pytest.raises(DimensionMismatch):
        check_rank_condition(np.zeros((4, 3)), u_stack)


def test_trajectory_csv_roundtrip(tmp_path, benchmark, prbs_data):
    scenario = FaultScenario([FaultSegment(20, 40, FaultChannel.sensor(3), FaultSignal.constant(0.25))])
    trajectory = simulate(benchmark, prbs_data.u[:60], scenario)
    path = save_trajectory(trajectory, tmp_path / "nested" / "trajectory.csv")

    loaded = load_trajectory(path)
    assert np.array_equal(loaded.y, trajectory.y)
    assert np.array_equal(loaded.u, trajectory.u)
    assert loaded.active_labels() == trajectory.active_labels()
    assert np.array_equal(loaded.f, trajectory.f)


def test_trajectory_csv_header(tmp_path, prbs_data):
    path = save_trajectory(prbs_data.slice(0, 5), tmp_path / "t.csv")
    header = path.read_text().splitlines()[0]
    assert header == "k,u_1,y_1,y_2,y_3,f_channel,f_value"


def test_load_rejects_misnumbered_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("k,u_1,y_2\n0,1.0,2.0\n")
    with pytest.raises(DimensionMismatch):
        load_trajectory(path)
