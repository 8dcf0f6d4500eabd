import numpy as np
import pytest

from mesocolony.errors import ValidationError
from mesocolony.potential import BumpSpec, IrregularPoint, PolynomialPotential, bump, effective_potential


def test_potential_validation():
    with pytest.raises(ValidationError):
        PolynomialPotential((0.0, 0.0, 0.0, 1.0))  # odd degree
    with pytest.raises(ValidationError):
        PolynomialPotential((0.0, 0.0, -1.0))  # negative leading coefficient
    with pytest.raises(ValidationError):
        PolynomialPotential((0.0, 0.0, 1.0), 0.0)


def test_potential_roundtrip_and_derivative():
    V = PolynomialPotential((1.0, 0.0, -2.0, 0.0, 0.25), 0.7)
    W = PolynomialPotential.from_dict(V.to_dict())
    assert W == V
    x = 0.3
    h = 1e-6
    assert abs(V.derivative(x) - (V(x + h) - V(x - h)) / (2 * h)) < 1e-8


def test_bump_plateau_support_and_smoothness():
    b = BumpSpec((2.5, 3.5), (2.0, 4.0))
    assert np.all(bump(np.linspace(2.5, 3.5, 11), b) == 1.0)
    assert np.all(bump(np.array([1.0, 2.0, 4.0, 5.0]), b) == 0.0)
    x = np.linspace(2.0, 2.5, 2001)
    v = bump(x, b)
    assert np.all(np.diff(v) >= -1e-15)
    assert np.max(np.abs(np.diff(v))) < 1e-2  # no jumps anywhere


def test_bump_spec_rejects_bad_nesting():
    with pytest.raises(ValidationError):
        BumpSpec((1.0, 2.0), (1.5, 3.0))


def test_irregular_point_validation():
    with pytest.raises(ValidationError):
        IrregularPoint(3.0, 0, -1.0)
    with pytest.raises(ValidationError):
        IrregularPoint(3.0, -1, 1.0)


def test_effective_potential_semicircle(gauss, gauss_measure):
    # phi(x) = x sqrt(x^2 - 2) - 2 log((x + sqrt(x^2 - 2))/sqrt 2) for x > sqrt 2
    x = np.array([1.6, 2.0, 3.0])
    s = np.sqrt(x * x - 2)
    expect = x * s - 2 * np.log((x + s) / np.sqrt(2))
    assert np.allclose(effective_potential(gauss, gauss_measure, x), expect, atol=1e-12)
    assert np.max(np.abs(effective_potential(gauss, gauss_measure, np.linspace(-1.4, 1.4, 9)))) < 1e-12
