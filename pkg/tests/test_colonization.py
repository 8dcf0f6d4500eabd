import numpy as np
import pytest

from mesocolony import colonization as col
from mesocolony.equilibrium import solve_equilibrium
from mesocolony.errors import ValidationError
from mesocolony.mesoscopic import meso_equilibrium
from mesocolony.potential import IrregularPoint, PolynomialPotential


@pytest.fixture(scope="module")
def plan0(outpost0, shifted_meso):
    V, mu, irr = outpost0
    return col.build_plan(V, mu, irr, shifted_meso, 8, 512, t=0.5)


@pytest.mark.parametrize("nu,t,k", [(0, 0.25, 7), (0, 0.5, 3), (0, 0.75, 1),
                                    (1, 0.25, 13), (1, 0.5, 5), (1, 0.75, 2)])
def test_choose_truncation_table(nu, t, k):
    assert col.choose_truncation(nu, t) == k


def test_choose_truncation_validation():
    for t in (0.0, 1.0, 1.5, -0.2):
        with pytest.raises(ValidationError):
            col.choose_truncation(0, t)


def test_growth_bound():
    # gamma = 1/2, k = 3: kappa < N^(2/3)
    assert col.growth_bound_ok(63, 512, 3, 0)
    assert not col.growth_bound_ok(65, 512, 3, 0)


def test_scaling_map_basics(outpost0):
    V, mu, irr = outpost0
    sc = col.scaling_map(irr, V, mu, 8, 512)
    assert abs(sc.epsilon - (8 / (irr.c0 * 512)) ** 0.5) < 1e-12
    assert abs(sc.linear_coefficient() * sc.epsilon - 1) < 1e-9
    dmin, zeros = sc.conformality()
    assert dmin > 0 and zeros == 1
    # kappa eta^2 = N phi on the real axis
    x = irr.x0 + np.linspace(-0.3, 0.3, 7)
    from mesocolony.potential import effective_potential
    assert np.allclose(8 * sc.eta(x) ** 2, 512 * effective_potential(V, mu, x), rtol=1e-8, atol=1e-9)


def test_scaling_map_nu1(outpost1):
    V, mu, irr = outpost1
    sc = col.scaling_map(irr, V, mu, 8, 2048)
    assert abs(sc.linear_coefficient() * sc.epsilon - 1) < 1e-9
    assert sc.conformality()[1] == 3
    xs = irr.x0 + np.array([-0.1, 0.05, 0.2]) * sc.radius
    assert np.allclose(sc.eta(xs), col.series.evaluate(sc.eta_series(), xs - irr.x0), atol=1e-11)


def test_scaling_map_validation(outpost0):
    V, mu, irr = outpost0
    with pytest.raises(ValidationError):
        col.scaling_map(irr, V, mu, 2.5, 512)
    with pytest.raises(ValidationError):
        col.scaling_map(irr, V, mu, 0, 512)
    with pytest.raises(ValidationError):
        col.scaling_map(IrregularPoint(irr.x0, 0, 2 * irr.c0), V, mu, 8, 512)


def test_beta_tends_to_b(outpost0, shifted_meso):
    V, mu, irr = outpost0
    for N in (10 ** 4, 10 ** 6, 10 ** 8):
        sc = col.scaling_map(irr, V, mu, 4, N)
        beta = col.laurent_coefficients(sc, shifted_meso, 3)
        assert np.max(np.abs(beta - shifted_meso.b[:3])) < 10 * sc.epsilon


def test_laurent_coefficients_need_series_order(outpost0, shifted_meso):
    V, mu, irr = outpost0
    sc = col.scaling_map(irr, V, mu, 4, 1024, order=6)
    with pytest.raises(ValidationError):
        col.laurent_coefficients(sc, shifted_meso, 8)


def test_kappa_zero_plan_is_trivial(outpost0, shifted_meso):
    V, mu, irr = outpost0
    p = col.build_plan(V, mu, irr, shifted_meso, 0, 512, k=3)
    x = np.linspace(2.0, 4.0, 101)
    assert np.all(p.A(x) == 0.0)
    assert np.array_equal(p.Vhat(x), V(x))
    assert p.constrained is mu


def test_plan_interpolation_and_cancellation(plan0):
    assert plan0.info["interp_error"] < 1e-8
    x0 = plan0.scaling.x0
    # divided differences across the outpost stay bounded (no log blow-up)
    dd = [(plan0.A(x0 + h) - plan0.A(x0 - h)) / (2 * h) for h in (1e-2, 1e-3, 1e-4, 1e-5)]
    scale = max(1.0, col.sup_A(plan0))
    assert abs(dd[-1] - dd[-2]) < 1e-6 * scale
    assert np.all(np.isfinite(dd))


def test_perturbed_potential_bump_structure(plan0):
    V = plan0.V
    (ja, jb), (Ja, Jb) = plan0.bump.inner, plan0.bump.outer
    out = np.array([Ja - 0.1, Ja, Jb, Jb + 0.5, 0.0])
    assert np.array_equal(plan0.Vhat(out), V(out))
    inside = np.linspace(ja, jb, 11)
    assert np.allclose(plan0.Vhat(inside), V(inside) + plan0.A(inside), rtol=0, atol=1e-15)
    for e in (Ja, Jb):
        assert abs(plan0.Vhat(e + 1e-9) - plan0.Vhat(e - 1e-9)) < 1e-6


def test_constrained_measure_mass_and_support(plan0):
    con = plan0.constrained
    assert abs(con.mass - (1 - 8 / 512)) < 1e-12
    assert con.endpoints[-1] < plan0.bump.inner[0]


def test_F_term_is_order_eps(outpost0, shifted_meso):
    V, mu, irr = outpost0
    eps, sup = [], []
    for kap in (4, 8, 16):
        p = col.build_plan(V, mu, irr, shifted_meso, kap, 1024, t=0.5)
        xs = np.linspace(*p.bump.inner, 2001)
        eps.append(p.scaling.epsilon)
        sup.append(np.max(np.abs(p.scaling.tau * V.temperature * shifted_meso.F(p.scaling.eta(xs)))))
    slope = np.polyfit(np.log(eps), np.log(sup), 1)[0]
    assert abs(slope - 1) < 0.15


def test_kappa_zero_rejected_without_plan_path(outpost0, shifted_meso):
    V, mu, irr = outpost0
    with pytest.raises(ValidationError):
        col.build_plan(V, mu, irr, shifted_meso, 8, 512)  # neither k nor t


# ------------------------------------------------------------ endpoint flow

@pytest.fixture(scope="module")
def ode_fixture():
    from mesocolony.equilibrium import construct_irregular_potential
    V, mu, irr = construct_irregular_potential(0, 3.0, 8)
    m = meso_equilibrium(0, [-10.0], order=16)
    sc = col.scaling_map(irr, V, mu, 1, 10 ** 6)
    return V, mu, irr, m, sc


def test_endpoint_flow_matches_direct_solves(ode_fixture):
    V, mu, irr, m, sc = ode_fixture
    flow = col.EndpointFlow.from_plan_inputs(sc, m, 12)
    eps, alpha = col.integrate_endpoints(flow, V, 0.05, 50)
    init = mu.endpoints
    for i in (10, 30, 50):
        d = col.direct_endpoints(flow, V, eps[i], init)
        init = d
        assert np.max(np.abs(d - alpha[i])) < 1e-6


def test_mass_depletion_derivative(ode_fixture):
    V, mu, irr, m, sc = ode_fixture
    flow = col.EndpointFlow(None, sc.x0, 0, sc.c0, np.zeros(3), np.zeros((3, 3)), mu.endpoints.copy())
    e, h = 0.03, 1e-4
    a0 = col.direct_endpoints(flow, V, e, mu.endpoints)
    rate, _ = col.endpoint_ode(a0, flow, e, V)
    fd = (col.direct_endpoints(flow, V, e + h, a0) - col.direct_endpoints(flow, V, e - h, a0)) / (2 * h)
    assert np.allclose(rate, fd, rtol=1e-5, atol=1e-8)


def test_endpoint_flow_mirror_parity(ode_fixture):
    V, mu, irr, m, sc = ode_fixture
    flow = col.EndpointFlow.from_plan_inputs(sc, m, 6)
    Vm = PolynomialPotential(tuple(c * (-1) ** j for j, c in enumerate(V.coeffs)), V.temperature)
    mum = solve_equilibrium(Vm)
    irrm = IrregularPoint(-irr.x0, 0, irr.c0)
    scm = col.scaling_map(irrm, Vm, mum, 1, 10 ** 6)
    # mirrored local model: t_1 -> -t_1
    mm = meso_equilibrium(0, [10.0], order=16)
    flowm = col.EndpointFlow.from_plan_inputs(scm, mm, 6)
    r, _ = col.endpoint_ode(mu.endpoints, flow, 0.02, V)
    rm, _ = col.endpoint_ode(mum.endpoints, flowm, 0.02, Vm)
    assert np.allclose(rm, -r[::-1], rtol=1e-8, atol=1e-12)


def test_endpoint_ode_rejects_three_bands(ode_fixture):
    V, mu, irr, m, sc = ode_fixture
    flow = col.EndpointFlow.from_plan_inputs(sc, m, 3)
    with pytest.raises(ValidationError):
        col.endpoint_ode(np.array([-3.0, -2.0, -1.0, 0.0, 1.0, 2.0]), flow, 0.01, V)
