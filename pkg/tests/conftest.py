import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from psdblk.generators import example_equality

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def example():
    return example_equality()


@pytest.fixture
def rng():
    return np.random.default_rng(20120101)


def complex_gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(rng, n):
    G = complex_gaussian(rng, (n, n))
    return (G + G.conj().T) / 2


def random_psd(rng, n, rank=None):
    G = complex_gaussian(rng, (n, rank or n))
    return G @ G.conj().T


def random_unitary(rng, n):
    Q, R = np.linalg.qr(complex_gaussian(rng, (n, n)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))
