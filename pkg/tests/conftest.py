import numpy as np
import pytest

from restereo import kernels


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _reset_kernels():
    # keep backend/thread choices from leaking between tests
    name = kernels.get_backend()
    threads = kernels.get_num_threads()
    yield
    kernels.set_backend(name)
    kernels.set_num_threads(threads)


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: full-pipeline tests that take more than a second"
    )
