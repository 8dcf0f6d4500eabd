import math

import numpy as np
import pytest

from mesocolony import hyperelliptic as hyp
from mesocolony.equilibrium import (SingularField, construct_irregular_potential, detect_irregular_point,
                                    g_function, solve_equilibrium, verify_variational)
from mesocolony.errors import ValidationError
from mesocolony.potential import PolynomialPotential, effective_potential


def semicircle(x, r2=2.0):
    return np.sqrt(np.maximum(r2 - x * x, 0.0)) / np.pi


def test_semicircle_endpoints_density_and_robin(gauss_measure):
    mu = gauss_measure
    assert np.allclose(mu.endpoints, [-math.sqrt(2), math.sqrt(2)], atol=1e-12)
    x = np.linspace(-1.5, 1.5, 3001)
    assert np.max(np.abs(mu.density(x) - semicircle(x))) < 1e-12
    # g(x) = x^2/2 - 1/2 - log 2 / 2 on the band, and l = -1 - log 2 at T = 1
    assert abs(mu.robin - (-1.0 - math.log(2.0))) < 1e-12
    assert abs(g_function(mu, 0.0) - (-0.5 - 0.5 * math.log(2.0))) < 1e-12
    assert abs(mu.moment(0) - 1.0) < 1e-13
    assert abs(mu.moment(2) - 0.5) < 1e-13


def test_temperature_and_mass_scaling(gauss):
    # the support of T * m scales as sqrt(T m)
    V = PolynomialPotential((0.0, 0.0, 1.0), 2.0)
    mu = solve_equilibrium(V, mass=0.5)
    assert np.allclose(mu.endpoints, [-math.sqrt(2), math.sqrt(2)], atol=1e-12)
    mu = solve_equilibrium(gauss, mass=0.25)
    assert np.allclose(mu.endpoints, [-math.sqrt(0.5), math.sqrt(0.5)], atol=1e-12)


def test_two_cut_quartic(quartic_two_cut):
    mu = solve_equilibrium(quartic_two_cut)
    s2, s6 = math.sqrt(2), math.sqrt(6)
    assert np.allclose(mu.endpoints, [-s6, -s2, s2, s6], atol=1e-10)
    # the explicit density |x| sqrt((x^2 - 2)(6 - x^2)) / (2 pi)
    x = np.linspace(1.5, 2.3, 9)
    expect = np.abs(x) * np.sqrt((x * x - 2) * (6 - x * x)) / (2 * np.pi)
    assert np.allclose(mu.density(x), expect, atol=1e-10)
    rep = verify_variational(quartic_two_cut, mu)
    assert rep.regular


def test_grid_backend_matches_closed_form(gauss):
    mu = solve_equilibrium(gauss, backend="grid")
    assert np.allclose(mu.endpoints, [-math.sqrt(2), math.sqrt(2)], atol=1e-5)
    assert abs(mu.robin - (-1.0 - math.log(2.0))) < 1e-6


def test_validation_errors(gauss):
    with pytest.raises(ValidationError):
        solve_equilibrium(gauss, mass=0.0)
    with pytest.raises(ValidationError):
        solve_equilibrium(gauss, backend="simplex")
    with pytest.raises(ValidationError):
        solve_equilibrium(gauss, excluded=(2.0, 1.0))
    # the singular field must sit inside the excluded region
    with pytest.raises(ValidationError):
        solve_equilibrium(gauss, excluded=(2.5, 3.5), extra_field=SingularField(5.0, -0.1))


def test_branch_sign_convention():
    alphas = [-3.0, -1.0, 1.0, 3.0]
    assert hyp.branch_sign(5.0, alphas) == 1.0
    assert hyp.branch_sign(0.0, alphas) == -1.0
    assert hyp.branch_sign(-5.0, alphas) == 1.0
    with pytest.raises(ValidationError):
        hyp.branch_sign(2.0, alphas)


def test_singular_field_derivative():
    f = SingularField(3.0, -0.2, (0.1, -0.05), 0.3)
    x = np.array([2.0, 4.5])
    h = 1e-6
    assert np.allclose(f.derivative(x), (f(x + h) - f(x - h)) / (2 * h), rtol=1e-7)


@pytest.mark.parametrize("nu,x0,deg", [(0, 3.0, 6), (0, 2.0, 8), (1, 4.0, 8), (1, 4.0, 10)])
def test_irregular_fixture_is_irregular(nu, x0, deg):
    V, mu, irr = construct_irregular_potential(nu, x0, deg)
    assert np.allclose(mu.endpoints, [-1.0, 1.0], atol=1e-12)
    assert abs(mu.mass - 1.0) < 1e-10
    phi = effective_potential(V, mu, np.array([x0]))[0]
    assert abs(phi) < 1e-10
    rep = verify_variational(V, mu)
    assert not rep.regular
    assert rep.max_on_support < 1e-9
    # phi ~ C0 s^(2nu+2) near x0
    s = 1e-2
    val = effective_potential(V, mu, np.array([x0 + s]))[0]
    assert abs(val / (irr.c0 * s ** (2 * nu + 2)) - 1) < 0.05


def test_detect_irregular_point_recovers_fixture(outpost0):
    V, mu, irr = outpost0
    mu2 = solve_equilibrium(V)
    found = detect_irregular_point(V, mu2, (2.0, 4.0))
    assert found.nu == 0
    assert abs(found.x0 - irr.x0) < 1e-8
    assert abs(found.c0 - irr.c0) < 1e-4 * irr.c0


def test_fixture_rejects_low_degree():
    with pytest.raises(ValidationError):
        construct_irregular_potential(1, 4.0, 4)
