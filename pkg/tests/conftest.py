import numpy as np
import pytest

from jcgaudin import bethe, model

SEED = 20260823


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def one_spin():
    return model.make_params(1, 1.0, 1.0, [0.0])


@pytest.fixture(scope="session")
def three_spin():
    return model.make_params(3, 1.0, 0.0, [-1.0, 0.0, 1.0])


@pytest.fixture(scope="session")
def three_signs():
    return (1, -1, 1)


@pytest.fixture(scope="session")
def three_bethe(three_spin, three_signs):
    return bethe.solve_bethe(three_spin, three_signs)


@pytest.fixture(scope="session")
def five_spin():
    return model.make_params(5, 0.7, 0.3, [-2.0, -0.9, 0.1, 1.1, 2.3])


def random_state(params, rng):
    """Uniform point of the phase space: spins on their spheres, b Gaussian."""
    v = rng.normal(size=(params.n, 3))
    v *= params.s / np.linalg.norm(v, axis=1)[:, None]
    b = complex(rng.normal(), rng.normal())
    return model.make_state(params, b, v)
