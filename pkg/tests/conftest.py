import numpy as np
import pytest

from lyapcert import damping, models


def kron_lyapunov_oracle(Atilde, Q):
    """Independent Lyapunov solve: vectorize A^T P + P A = -Q and solve the
    n^2 x n^2 linear system directly (column-major vec convention)."""
    n = Atilde.shape[0]
    M = np.kron(np.eye(n), Atilde.T) + np.kron(Atilde.T, np.eye(n))
    vecP = np.linalg.solve(M, -Q.flatten(order="F"))
    return vecP.reshape((n, n), order="F")


def random_hurwitz(rng, n, margin=0.5):
    """Random matrix shifted left of the imaginary axis by at least `margin`."""
    A = rng.standard_normal((n, n))
    shift = np.max(np.linalg.eigvals(A).real)
    return A - (shift + margin) * np.eye(n)


def random_dissipative_hurwitz(rng, n, margin=0.2):
    """Skew part plus a strictly negative definite symmetric part."""
    S = rng.standard_normal((n, n))
    S = S - S.T
    R = rng.standard_normal((n, n))
    return S - R @ R.T - margin * np.eye(n)


def random_spd(rng, n, shift=0.5):
    M = rng.standard_normal((n, n))
    return M @ M.T + shift * np.eye(n)


@pytest.fixture(scope="session")
def oscillator():
    return models.make_finite_dim(np.array([[0.0, 1.0], [-1.0, 0.0]]),
                                  np.array([[1.0], [0.0]]), k=1.0)


@pytest.fixture(scope="session")
def scalar_system():
    return models.make_finite_dim(np.array([[0.0]]), np.array([[1.0]]), k=1.0)


@pytest.fixture(scope="session")
def kdv64():
    return models.discretize_kdv(2 * np.pi, 64, lambda x: 1.0, k=1.0)


@pytest.fixture(scope="session")
def wave32():
    return models.discretize_wave(32, lambda x: 1.0, k=1.0)


@pytest.fixture(scope="session")
def wave32_undamped():
    return models.discretize_wave(32, lambda x: 0.0, k=1.0)


@pytest.fixture(scope="session")
def clamp1():
    return damping.clamp(1.0)
