import numpy as np
import pytest


def random_density(rng, size=None, pure=False):
    """Density operators from random Bloch vectors (uniform direction, radius in [0, 1])."""
    shape = () if size is None else (size,)
    v = rng.normal(size=shape + (3,))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    r = 1.0 if pure else rng.uniform(0.0, 1.0, size=shape)[..., None]
    x, y, z = np.moveaxis(v * r, -1, 0)
    rho = np.empty(shape + (2, 2), dtype=complex)
    rho[..., 0, 0] = (1 + z) / 2
    rho[..., 1, 1] = (1 - z) / 2
    rho[..., 0, 1] = (x - 1j * y) / 2
    rho[..., 1, 0] = (x + 1j * y) / 2
    return rho


def random_kets(rng, size):
    k = rng.normal(size=(size, 2)) + 1j * rng.normal(size=(size, 2))
    return k / np.linalg.norm(k, axis=1, keepdims=True)


def shannon_bits(p):
    """Plain-loop Shannon entropy, used as an oracle."""
    return -sum(x * np.log2(x) for x in np.ravel(p) if x > 0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_sink(pytestconfig):
    """Collects acceptance results for the terminal summary."""
    sink = []
    pytestconfig.stash[ACCEPTANCE_KEY] = sink
    return sink


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE_KEY, None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for r in results:
        terminalreporter.write_line(f"{'PASS' if r.passed else 'FAIL'}  {r.id:>2}  {r.claim}  |  {r.measured}  |  tol {r.tolerance}")
