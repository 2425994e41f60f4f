import numpy as np
import pytest
from scipy.stats import unitary_group

from gaussepe import build_thermal_covariance


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (a + a.conj().T)


def random_mixed(rng, n, beta_range=(0.1, 10.0)):
    h = random_hermitian(rng, n)
    beta = rng.uniform(*beta_range)
    return build_thermal_covariance(h, beta).entries


def random_pure(rng, n, n_filled=None):
    """Slater determinant of ``n_filled`` random orbitals."""
    if n_filled is None:
        n_filled = int(rng.integers(0, n + 1))
    U = unitary_group.rvs(n, random_state=rng) if n > 1 else np.eye(1, dtype=complex)
    V = U[:, :n_filled]
    return 2 * V @ V.conj().T - np.eye(n)


def random_split(rng, n, n_parts):
    """Random assignment of ``range(n)`` into ``n_parts`` lists, the first nonempty."""
    labels = rng.integers(0, n_parts, size=n)
    labels[rng.integers(n)] = 0
    return [np.nonzero(labels == k)[0].tolist() for k in range(n_parts)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# PASS/FAIL lines from the acceptance suite, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
