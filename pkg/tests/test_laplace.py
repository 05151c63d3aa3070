# tests/test_laplace.py
import cmath
import math

import numpy as np
import pytest

from src.utils.errors import DomainError, EvaluationError
from src.verification.grid import GridFunction
from src.verification.laplace import numerical_laplace, talbot_invert

# original, closed-form image
PAIRS = {
    "one": (lambda t: np.ones_like(t), lambda s: 1.0 / s),
    "ramp": (lambda t: t, lambda s: 1.0 / s**2),
    "phase": (lambda t: np.exp(1j * t), lambda s: 1.0 / (s - 1j)),
    "inverse_sqrt": (lambda t: t**-0.5 / math.gamma(0.5), lambda s: s**-0.5),
}


def test_numerical_laplace_examples():
    est = numerical_laplace(lambda t: np.ones_like(t), 2.0, horizon=40.0)
    assert abs(est.value - 0.5) <= 1e-12
    assert est.horizon == 40.0
    assert est.tail_bound < 1e-30

    est = numerical_laplace(lambda t: np.exp(1j * t), 2.0)
    assert abs(est.value - (0.4 + 0.2j)) <= 1e-10

    est = numerical_laplace(lambda t: t, 1.0)
    assert abs(est.value - 1.0) <= 1e-10
    assert est.tail_bound <= 1e-12


def test_numerical_laplace_needs_right_half_plane():
    with pytest.raises(DomainError):
        numerical_laplace(lambda t: t, 0.0)
    with pytest.raises(DomainError):
        numerical_laplace(lambda t: t, -1.0 + 2.0j)


def test_numerical_laplace_of_grid_function():
    f = GridFunction.from_callable(np.ones_like, 40.0, 8000)
    est = numerical_laplace(f, 2.0)
    assert abs(est.value - 0.5) <= 1e-8
    assert est.horizon == pytest.approx(40.0)

    # odd interval count: Simpson with an end correction
    g = GridFunction.from_callable(lambda t: np.exp(1j * t), 40.0, 8001)
    assert abs(numerical_laplace(g, 2.0).value - (0.4 + 0.2j)) <= 1e-7


def test_talbot_examples():
    assert abs(talbot_invert(lambda s: 1.0 / s, 1.0) - 1.0) <= 1e-10
    assert abs(talbot_invert(lambda s: 1.0 / s**2, 0.5) - 0.5) <= 1e-10
    assert abs(talbot_invert(lambda s: s**-0.5, 1.0) - 1.0 / math.gamma(0.5)) <= 1e-8


@pytest.mark.parametrize("name", sorted(PAIRS))
def test_laplace_round_trip(name):
    f, image = PAIRS[name]
    for s in [1.5, 3.0 + 1.0j]:
        assert abs(numerical_laplace(f, s).value - image(s)) <= 1e-7
    for t in [0.25, 0.5, 1.0]:
        expected = complex(f(np.array([t]))[0])
        assert abs(talbot_invert(image, t) - expected) <= 1e-7


def test_talbot_rejects_bad_arguments():
    with pytest.raises(DomainError):
        talbot_invert(lambda s: 1.0 / s, 0.0)
    with pytest.raises(EvaluationError):
        talbot_invert(lambda s: cmath.exp(s * s), 1.0)
