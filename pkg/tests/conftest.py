import numpy as np
import pytest


def random_symmetric(m, rng, scale=1.0):
    X = rng.standard_normal((m, m))
    return scale * 0.5 * (X + X.T)


def random_psd(m, rng, scale=1.0):
    B = rng.standard_normal((m, m))
    return scale * (B @ B.T) / m


def random_herglotz(m, rng, eta=0.3):
    """Complex symmetric matrix with Im part >= eta (a valid Green sample)."""
    return random_symmetric(m, rng) + 1j * (random_psd(m, rng) + eta * np.eye(m))


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
