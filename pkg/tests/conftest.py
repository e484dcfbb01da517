import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_hermitian(rng, n, real=False):
    a = rng.normal(size=(n, n))
    if not real:
        a = a + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def random_passive(rng, n, n_lossless=0):
    """Random complex matrix with prescribed singular values in [0, 1];
    ``n_lossless`` of them are exactly 1."""
    u, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    w, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    sv = rng.uniform(0, 1, size=n)
    sv[:n_lossless] = 1.0
    return u @ np.diag(sv) @ w.conj().T, sv
