import numpy as np
import pytest
from mngn.schemas.solver import Problem
from mngn.services.problems import derivative_operator, make_paraboloid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def paraboloid():
    return make_paraboloid()


@pytest.fixture
def random_pair(rng):
    """Random 8 x 10 Jacobian paired with the second-difference operator."""
    return rng.standard_normal((8, 10)), derivative_operator(2, 10)


@pytest.fixture
def linear_problem(rng):
    A = rng.standard_normal((3, 5))
    b = rng.standard_normal(3)
    return Problem(m=3, n=5, residual=lambda x: A @ x, jacobian=lambda x: A, b=b), A
