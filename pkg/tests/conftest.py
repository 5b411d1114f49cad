import numpy as np
import pytest


def random_hermitian(d, rng):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (A + A.conj().T) / 2


def random_density(d, rng, rank=None):
    rank = d if rank is None else rank
    G = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_ket(d, rng):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def brute_displacement(p, d):
    """Independent construction straight from the clock and shift matrices."""
    tau = -np.exp(1j * np.pi / d)
    T = np.diag([tau ** (2 * r) for r in range(d)])
    S = np.roll(np.eye(d), 1, axis=0)
    p1, p2 = p
    # negative powers go through the matrix inverse
    return tau ** (p1 * p2) * np.linalg.matrix_power(S, p1) @ np.linalg.matrix_power(T, p2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
