import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def ladder(dim):
    """Dense truncated annihilation matrix, built independently of the package."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def composed_hamiltonian(epsilon, a_coeff, dim, pad):
    """H from products of ladder matrices in a padded space, then cut to ``dim``."""
    big = dim + pad
    a = ladder(big)
    ad = a.conj().T
    num = ad @ a
    h = np.zeros((big, big), dtype=complex)
    for p, eps in enumerate(epsilon, start=1):
        h += eps * np.linalg.matrix_power(num, p)
    for s, coeff in enumerate(a_coeff):
        ns = np.linalg.matrix_power(num, s)
        h += coeff * (ns @ a @ a + ad @ ad @ ns)
    return h[:dim, :dim]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
