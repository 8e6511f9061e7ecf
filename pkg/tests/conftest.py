import logging

import numpy as np
import pytest

import network_aggregation.globals as GV
from network_aggregation.domain.agent_graph import cyclic_path_assignment
from network_aggregation.instances.hard_instance import (
    HardInstanceSpec, generate_hard_instance)
from network_aggregation.protocol.sequential_protocol import (
    fit_global, run_protocol)

import tests.data.build_data as b_data


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: statistical checks on n >= 1e5 samples")


@pytest.fixture(autouse=True)
def reset_globals():
    """
    Every test starts from the default verbosity and thread settings
    """
    GV.VERBOSE_LEVEL = 0
    GV.THREADS = None
    GV.reload_globals()
    yield
    logging.disable(logging.NOTSET)


@pytest.fixture(scope="session")
def small_instance():
    return generate_hard_instance(HardInstanceSpec(k=3, n=4000, seed=7))


@pytest.fixture(scope="session")
def cyclic_graph():
    return cyclic_path_assignment(3, 9)


@pytest.fixture(scope="session")
def cyclic_trace(small_instance, cyclic_graph):
    return run_protocol(small_instance, cyclic_graph)


@pytest.fixture(scope="session")
def small_global_fit(small_instance):
    return fit_global(small_instance)


@pytest.fixture(scope="session")
def logistic_dataset():
    return b_data.logistic_data(3000, [1.0, -0.5, 0.25], seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
