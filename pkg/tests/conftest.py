import numpy as np
import pytest
from scipy.integrate import quad

from doseline import HalfBall, Segment, build_grid, paper_source, sample_segment

PAPER_BOX = np.array([[-1.0, -1.0, -1.0], [1.0, 1.0, 0.0]])


def paper_mu(r):
    return (1.0 + 0.5 * np.sin(2.0 * np.pi * r)) * np.exp(-(r**2))


def axis_field_exact(z):
    """Continuous potential of the half-ball source on the positive x3-axis.

    In spherical coordinates the polar integral is elementary, leaving
    f(0, 0, z) = (pi / z) int_0^1 mu(r) r log((r + z)^2 / (r^2 + z^2)) dr.
    """
    integrand = lambda r: paper_mu(r) * r * np.log((r + z) ** 2 / (r * r + z * z))
    val, _ = quad(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return np.pi / z * val


def brute_force_grid(n1, n2, n3):
    """Masked midpoint grid over the paper box, written without the library."""
    h = np.array([2.0 / n1, 2.0 / n2, 1.0 / n3])
    c = [PAPER_BOX[0, k] + h[k] * (np.arange(n) + 0.5) for k, n in enumerate((n1, n2, n3))]
    X = np.stack(np.meshgrid(*c, indexing="ij"), -1).reshape(-1, 3)
    keep = (np.sum(X * X, axis=1) < 1.0) & (X[:, 2] < 0.0)
    return X[keep], np.prod(h)


def brute_force_field(nodes, w, mu, x):
    total = 0.0
    for chunk in np.array_split(np.arange(len(nodes)), 16):
        d = nodes[chunk] - np.asarray(x)
        total += np.sum(mu[chunk] * w / np.sum(d * d, axis=1))
    return total


@pytest.fixture(scope="session")
def paper_grid():
    return build_grid(HalfBall(1.0), PAPER_BOX, (40, 40, 20))


@pytest.fixture(scope="session")
def paper_source_field(paper_grid):
    return paper_source(paper_grid)


@pytest.fixture(scope="session")
def gamma():
    return Segment((0.0, 0.0, 0.8), (0.0, 0.0, 1.0))


@pytest.fixture(scope="session")
def gamma_sampling(gamma):
    return sample_segment(gamma, 20)


@pytest.fixture(scope="session")
def small_grid():
    return build_grid(HalfBall(1.0), PAPER_BOX, (10, 10, 5))


# --- acceptance reporting -------------------------------------------------------

ACCEPTANCE = {}


def record(number, passed, detail):
    ACCEPTANCE[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
