"""Shared fixtures for the faultiso unit tests"""

import numpy as np
import pytest

from faultiso.config.config_loader import ConfigLoader
from faultiso.dictionary.fault_dictionary import build_dictionaries, build_signatures
from faultiso.kernel.kernel_filter import estimate_kernel, nominal_kernel
from faultiso.system.benchmarks import benchmark_model
from faultiso.system.inputs import InputKind, InputSpec, generate_input
from faultiso.system.models import FaultChannel
from faultiso.system.scenarios import FaultScenario, FaultSegment, FaultSignal
from faultiso.system.simulator import simulate


@pytest.fixture(scope="session")
def benchmark():
    return benchmark_model(exact_zero=True)


@pytest.fixture(scope="session")
def prbs_data(benchmark):
    """500 noise-free healthy samples under PRBS excitation"""
    u = generate_input(InputSpec(InputKind.PRBS, seed=3), 500, benchmark.n_u)
    return simulate(benchmark, u)


@pytest.fixture(scope="session")
def data_kernel(prbs_data):
    return estimate_kernel(prbs_data.u, prbs_data.y, 5)


@pytest.fixture(scope="session")
def nominal_filter(benchmark):
    return nominal_kernel(benchmark, 5)


@pytest.fixture(scope="session")
def nominal_dictionaries(nominal_filter):
    return build_dictionaries(nominal_filter, build_signatures(nominal_filter))


@pytest.fixture(scope="session")
def confusion_trajectory(benchmark):
    """Noise-free actuator fault: sine on [10, 70), 0.95 decay on [70, 130), constant on [130, 200)"""
    a1 = FaultChannel.actuator(1)
    scenario = FaultScenario(
        [
            FaultSegment(10, 70, a1, FaultSignal.sinusoid(1.0, 0.1)),
            FaultSegment(70, 130, a1, FaultSignal.geometric_decay(0.95, 70)),
            FaultSegment(130, 200, a1, FaultSignal.constant(-0.5)),
        ]
    )
    u = generate_input(InputSpec(InputKind.MULTI_STEP, values=(1.0, 2.0, 1.5), dwell=20), 200, 1)
    return simulate(benchmark, u, scenario)


@pytest.fixture
def loader():
    return ConfigLoader()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
