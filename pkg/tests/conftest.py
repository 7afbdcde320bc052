import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import orthoseries as olib


@pytest.fixture(scope="session")
def gamma5():
    return olib.schottky_gamma(5)


@pytest.fixture(scope="session")
def gamma5_iota(gamma5):
    return olib.compose_iota(gamma5)


@pytest.fixture(scope="session")
def gamma5_prime():
    return olib.schottky_gamma_prime(5)


@pytest.fixture(scope="session")
def torus_bc():
    return olib.boundary_preset("torus")


@pytest.fixture(scope="session")
def pants_bc():
    return olib.boundary_preset("pants")


@pytest.fixture(scope="session")
def unitary_rep():
    def rot(t):
        return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])

    return olib.Representation.from_generators([rot(0.7), rot(1.3)], label="unitary-toy")


@pytest.fixture(scope="session")
def engine_g5_8(gamma5, torus_bc):
    """Shared medium-depth term engine for Gamma_5."""
    return olib.TermEngine(gamma5, torus_bc, 8)


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
