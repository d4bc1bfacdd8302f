import numpy as np
import pytest

from wigner.oracles import Flag, GroundTruth


def e(dim, k):
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


def random_unit(rng, dim):
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def identity_truth(n, flag=Flag.LINEAR, gauge_seed=7):
    return GroundTruth(np.eye(n, dtype=complex), flag, gauge_seed)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
