import numpy as np
import pytest

from zs_spectra.potential import Potential, random_trig_potential
from zs_spectra.verify import random_context


def oracle_monodromy(a, b, lam):
    """Closed-form y(1, lambda) for the constant potential (a, b), written independently."""
    lam = np.asarray(lam, dtype=float)
    w2 = lam ** 2 - a * a - b * b
    w = np.sqrt(np.abs(w2))
    C = np.where(w2 >= 0, np.cos(w), np.cosh(w))
    S = np.where(w2 >= 0, np.sinc(w / np.pi), np.where(w > 0, np.sinh(w) / np.where(w > 0, w, 1), 1.0))
    return np.array([[C + S * b, S * (-a - lam)], [S * (lam - a), C - S * b]])


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_trig():
    return random_trig_potential(np.random.default_rng(5), degree=3, norm=0.6)


@pytest.fixture(scope="session")
def const10():
    return Potential.constant(1.0, 0.0)


@pytest.fixture(scope="session")
def verify_context():
    """Five random trig potentials (seed 7) on the window |n| <= 16, shared by the suites."""
    return random_context(7, count=5, N=16)
