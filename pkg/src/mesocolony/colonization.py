"""Perturbation that grows a colony of about kappa eigenvalues at an outpost.

Given an irregular potential V (phi ~ C0 s**(2nu+2), s = x - x0) and a local
potential V_mes, the construction uses

* the conformal coordinate eta with kappa eta**(2nu+2) = (N/T) phi(x) and
  its length scale eps = (kappa T / (C0 N))**gamma, gamma = 1/(2nu+2);
* the Laurent polynomial f(x/eps) = sum_i beta_i (eps/s)**i, the principal
  part at x0 of f_mes(eta(x)) = sum_j b_j eta**(-j);
* H(x) = ln|s/eps| - f(x/eps) and the equilibrium measure of
  V - 2 tau T H on R minus J, with mass 1 - tau and tau = kappa/N;
* the correction A, localized by a bump, that makes the local effective
  potential equal kappa (V_mes - 2 g_hat_mes + l_mes) in the eta plane.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as Pn

from . import hyperelliptic as hyp, series
from .equilibrium import SingularField, solve_equilibrium
from .errors import NumericalError, QuadratureError, ValidationError
from .potential import BumpSpec, bump

_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)
SERIES_ORDER = 64


def _check_kappa(kappa):
    if isinstance(kappa, (bool, np.bool_)) or int(kappa) != kappa:
        raise ValidationError(f"kappa must be an integer, got {kappa!r}")
    return int(kappa)


def _sqrt_q_local(z, alphas, x0):
    """Branch of sqrt(q) that is analytic on the disk around x0 missing the bands."""
    z = np.asarray(z)
    sign = hyp.branch_sign(x0, alphas)
    out = np.full(z.shape, sign, dtype=np.result_type(z, complex) if np.iscomplexobj(z) else float)
    for a in alphas:
        sg = 1.0 if x0 > a else -1.0
        out = out * np.sqrt(sg * (z - a))
    return out


@dataclass
class ScalingMap:
    """Local coordinate eta(x) around an irregular point.

    ``phi_series[n]`` is the coefficient of s**n in phi(x0 + s); ``c0`` is
    read from it (the fitted value in ``irregular`` is only checked).
    """

    irregular: object
    kappa: int
    bigN: int
    T: float
    gamma: float
    epsilon: float
    c0: float
    phi_series: np.ndarray
    radius: float
    alphas: np.ndarray
    F: hyp.RationalFunction

    @property
    def x0(self):
        return self.irregular.x0

    @property
    def nu(self):
        return self.irregular.nu

    @property
    def tau(self):
        return self.kappa / self.bigN

    @property
    def order(self):
        return 2 * self.nu + 2

    @property
    def P(self):
        """Coefficients of 1 + P(s) = phi(x0 + s) / (c0 s**(2nu+2))."""
        return self.phi_series[self.order:] / self.c0

    def _phi_prime_exact(self, z):
        return self.F(z) * _sqrt_q_local(z, self.alphas, self.x0)

    def _phi_exact(self, z):
        """int_0^s phi'(x0 + t) dt along the segment (real or complex z)."""
        z = np.asarray(z)
        s = z - self.x0
        t = 0.5 * s[..., None] * (_GL_X + 1.0)
        vals = self._phi_prime_exact(self.x0 + t)
        return 0.5 * s * np.sum(vals * _GL_W, axis=-1)

    def _local(self, z, coeffs, exact):
        # monomial F loses the high-order zero at x0 to cancellation, so the
        # Taylor series (with its low terms set to zero) is used on the disk
        z = np.asarray(z)
        s = z - self.x0
        near = np.abs(s) <= 1.5 * self.radius
        if np.all(near):
            return series.evaluate(coeffs, s)
        out = np.asarray(exact(z)).astype(np.result_type(z, float))
        out[near] = series.evaluate(coeffs, s[near])
        return out

    def phi(self, z):
        return self._local(z, self.phi_series, self._phi_exact)

    def phi_prime(self, z):
        return self._local(z, series.derivative(self.phi_series), self._phi_prime_exact)

    def eta(self, x):
        """Real-axis eta(x) = sign(s) ((N/(kappa T)) phi(x))**gamma."""
        x = np.asarray(x, dtype=float)
        s = x - self.x0
        ph = self.phi(x)
        if np.any(ph < 0):
            raise NumericalError("phi is negative near the outpost", stage="scaling")
        return np.sign(s) * (ph / (self.c0 * self.epsilon ** self.order)) ** self.gamma

    def eta_prime(self, x):
        x = np.asarray(x, dtype=float)
        s = x - self.x0
        e = self.eta(x)
        ph = self.phi(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = self.gamma * e * self.phi_prime(x) / ph
        return np.where(s == 0, 1.0 / self.epsilon, d)

    def eta_series(self, n=None):
        """Coefficients of eta(x0 + s) in powers of s."""
        p = self.P
        n = p.size if n is None else n
        out = np.zeros(n + 1)
        out[1:] = series.power(p, self.gamma, n) / self.epsilon
        return out

    def conformality(self, n=64):
        """(min |eta'| on the boundary circle, number of zeros of phi' inside)."""
        z = self.x0 + self.radius * np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)
        ph = self._phi_exact(z)
        dph = self._phi_prime_exact(z)
        mod_eta = (np.abs(ph) / (self.c0 * self.epsilon ** self.order)) ** self.gamma
        d = self.gamma * mod_eta * np.abs(dph) / np.abs(ph)
        roots = np.roots(self.F.poly[::-1]) if self.F.poly.size > 1 else np.zeros(0)
        inside = int(np.sum(np.abs(roots - self.x0) < self.radius))
        return float(np.min(d)), inside

    def linear_coefficient(self, h=None):
        """Slope of the real-axis eta at x0 (symmetric difference with Richardson)."""
        h = 1e-3 * self.radius if h is None else h
        d = lambda hh: (self.eta(self.x0 + hh) - self.eta(self.x0 - hh)) / (2 * hh)
        return float((4 * d(h / 2) - d(h)) / 3)

    def to_dict(self):
        return {"x0": self.x0, "nu": self.nu, "c0": self.c0, "gamma": self.gamma,
                "epsilon": self.epsilon, "kappa": self.kappa, "N": self.bigN, "T": self.T,
                "radius": self.radius, "phi_series": self.phi_series.tolist()}


def phi_series_at(mu, x0, order):
    """Taylor coefficients of phi at x0 from phi' = F sqrt(q)."""
    if mu.F is None:
        raise ValidationError("the scaling map needs a measure from the Newton backend")
    if mu.F.pole.size:
        raise ValidationError("the scaling map needs the unperturbed measure")
    alphas = mu.endpoints
    n = order
    Fs = series.trunc(series.shift_poly(mu.F.poly, x0), n)
    sq = series.sqrt_product(alphas, x0, n, hyp.branch_sign(x0, alphas))
    return series.integrate(series.mul(Fs, sq, n))


def _analytic_radius(mu, x0):
    """Distance from x0 to the nearest endpoint or other critical point of phi."""
    d = float(np.min(np.abs(mu.endpoints - x0)))
    poly = mu.F.poly
    if poly.size > 1:
        roots = np.roots(poly[::-1])
        # the multiple root at x0 itself comes back as a small cluster
        far = roots[np.abs(roots - x0) > 1e-3 * d]
        if far.size:
            d = min(d, float(np.min(np.abs(far - x0))))
    return d


def scaling_map(irr, V, mu, kappa, bigN, order=SERIES_ORDER, c0_rtol=1e-3):
    """Build the local coordinate at ``irr`` for a colony of ``kappa`` out of ``bigN``."""
    kappa = _check_kappa(kappa)
    if kappa < 1:
        raise ValidationError("kappa must be at least 1")
    if int(bigN) != bigN or bigN <= kappa:
        raise ValidationError("N must be an integer larger than kappa")
    x0, nu = float(irr.x0), int(irr.nu)
    if mu.on_band(x0):
        raise ValidationError("the outpost lies on the support")
    T = V.temperature
    ps = phi_series_at(mu, x0, order)
    p = 2 * nu + 2
    if ps.size < p + 2:
        raise ValidationError("series order too small for this nu")
    c0 = float(ps[p])
    scale = np.max(np.abs(ps[: p + 4]))
    low = np.max(np.abs(ps[:p])) if p else 0.0
    if c0 <= 0 or low > 1e-6 * scale:
        raise NumericalError("phi does not vanish to the stated order at x0", stage="scaling")
    if abs(c0 - irr.c0) > c0_rtol * c0:
        raise ValidationError(f"fitted C0 = {irr.c0} disagrees with the series value {c0}")
    ps[:p] = 0.0
    gamma = 1.0 / p
    eps = (kappa * T / (c0 * bigN)) ** gamma
    radius = 0.5 * _analytic_radius(mu, x0)
    return ScalingMap(irr, kappa, int(bigN), T, gamma, eps, c0, ps, radius, mu.endpoints, mu.F)


def choose_truncation(nu, t):
    """Next-to-minimal k with k > (2nu+2)(1/t - 1) - 1."""
    if not 0 < t < 1:
        raise ValidationError(f"growth exponent t must lie in (0, 1), got {t}")
    tf = Fraction(t).limit_denominator(10 ** 6)
    if abs(float(tf) - t) > 1e-12:
        tf = Fraction(t)
    bound = (2 * nu + 2) * (1 / tf - 1) - 1
    minimal = math.floor(bound) + 1
    return int(minimal + 1)


def growth_bound_ok(kappa, bigN, k, nu):
    """kappa < N**(1 - 1/(gamma (k+1) + 1))."""
    gamma = 1.0 / (2 * nu + 2)
    return kappa < bigN ** (1.0 - 1.0 / (gamma * (k + 1) + 1.0))


def _power_table(P, gamma, k, n):
    """Rows j = 1..k: coefficients of (1+P)**(-j gamma) to n terms."""
    return np.array([series.power(P, -j * gamma, n) for j in range(1, k + 1)])


def laurent_coefficients(scaling, meso, k):
    """beta_1..beta_k of the principal part of f_mes(eta(x)) at x0."""
    if k == 0:
        return np.zeros(0)
    P = scaling.P
    if P.size < k:
        raise ValidationError(f"phi series too short for k = {k}; raise the series order")
    b = meso_b(meso, k)
    c = _power_table(P, scaling.gamma, k, k)
    eps = scaling.epsilon
    beta = np.zeros(k)
    for i in range(1, k + 1):
        beta[i - 1] = sum(b[j - 1] * eps ** (j - i) * c[j - 1, j - i] for j in range(i, k + 1))
    return beta


def meso_b(meso, k):
    from .mesoscopic import meso_moments
    return meso_moments(meso, k)


def H_epsilon(scaling, beta, x):
    """ln|s/eps| - sum_i beta_i (eps/s)**i."""
    x = np.asarray(x, dtype=float)
    s = x - scaling.x0
    if np.any(s == 0):
        raise ValidationError("H is singular at the outpost")
    eps = scaling.epsilon
    r = eps / s
    f = Pn.polyval(r, np.concatenate([[0.0], beta]))
    return np.log(np.abs(s / eps)) - f


def constrained_field(x0, nu, c0, T, eps, beta):
    """-2 tau T H as a :class:`SingularField` (tau T = c0 eps**(2nu+2))."""
    tT = c0 * eps ** (2 * nu + 2)
    poles = tuple(2 * tT * bi * eps ** (i + 1) for i, bi in enumerate(beta))
    return SingularField(x0, -2 * tT, poles, 2 * tT * math.log(eps) if eps > 0 else 0.0)


@dataclass
class ColonizationPlan:
    V: object
    mu: object
    scaling: ScalingMap
    meso: object
    k: int
    beta: np.ndarray
    bump: BumpSpec
    constrained: object
    a_cheb: np.ndarray
    info: dict = field(default_factory=dict)

    @property
    def kappa(self):
        return 0 if self.scaling is None else self.scaling.kappa

    @property
    def ell_tilde(self):
        tT = 0.0 if self.scaling is None else self.scaling.tau * self.V.temperature
        return self.constrained.robin - tT * self.meso.ell_mes

    def _X(self, x):
        lo, hi = self.bump.outer
        return (np.asarray(x, dtype=float) - 0.5 * (lo + hi)) / (0.5 * (hi - lo))

    def A(self, x):
        """Chebyshev interpolant of the perturbation on J~ (0 outside J~)."""
        X = self._X(x)
        return np.where(np.abs(X) <= 1.0, C.chebval(np.clip(X, -1, 1), self.a_cheb), 0.0)

    def f(self, x):
        s = np.asarray(x, dtype=float) - self.scaling.x0
        return Pn.polyval(self.scaling.epsilon / s, np.concatenate([[0.0], self.beta]))

    def H(self, x):
        return H_epsilon(self.scaling, self.beta, x)

    def Vhat(self, x):
        return perturbed_potential(self, x)

    def to_dict(self):
        return {
            "kappa": self.kappa,
            "k": self.k,
            "beta": self.beta.tolist(),
            "bump": self.bump.to_dict(),
            "scaling": None if self.scaling is None else self.scaling.to_dict(),
            "ell_tilde": self.ell_tilde,
            "ell_mes": self.meso.ell_mes,
            "constrained": self.constrained.to_dict(),
            "A_chebyshev": self.a_cheb.tolist(),
            "info": self.info,
        }


class PerturbedPotential:
    """V + B_J A as a vectorized callable with the temperature attached."""

    def __init__(self, plan):
        self.plan = plan
        self.temperature = plan.V.temperature

    @property
    def T(self):
        return self.temperature

    def __call__(self, x):
        return perturbed_potential(self.plan, x)

    @property
    def features(self):
        """Intervals where the weight has structure finer than the bulk."""
        return [self.plan.bump.outer]


def perturbed_potential(plan, x):
    """V(x) + B_J(x) A(x); exactly V outside J~."""
    x = np.asarray(x, dtype=float)
    v = plan.V(x)
    lo, hi = plan.bump.outer
    m = (x > lo) & (x < hi)
    if not np.any(m):
        return v
    out = np.array(v, dtype=float, copy=True)
    xm = x[m]
    out[m] = out[m] + bump(xm, plan.bump) * plan.A(xm)
    return out.reshape(np.shape(v)) if np.ndim(v) else float(out)


def default_bump(scaling, inner=0.6, outer=0.9):
    r = scaling.radius
    x0 = scaling.x0
    return BumpSpec((x0 - inner * r, x0 + inner * r), (x0 - outer * r, x0 + outer * r))


def _local_difference(scaling, meso, beta, k, x, switch, nterms=60):
    """H - g_hat_mes(eta) on the real axis: series near x0, direct beyond ``switch``."""
    x = np.asarray(x, dtype=float)
    s = x - scaling.x0
    out = np.empty(x.shape)
    near = np.abs(s) < switch
    P = scaling.P
    n = min(nterms, P.size)
    g = scaling.gamma
    eps = scaling.epsilon
    b = meso_b(meso, k)
    if np.any(near):
        lg = series.log1p_series(series.trunc(P, n) - np.eye(1, n)[0], n)
        reg = np.zeros(n)
        if k:
            c = _power_table(P, g, k, n + k)
            for j in range(1, k + 1):
                reg += b[j - 1] * eps ** j * c[j - 1, j:j + n]
        out[near] = series.evaluate(-g * lg + reg, s[near])
    far = ~near
    if np.any(far):
        eta = scaling.eta(x[far])
        from .mesoscopic import truncated_g
        gh, _ = truncated_g(_B(b), k, eta) if k else (np.log(np.abs(eta)), 0.0)
        out[far] = H_epsilon(scaling, beta, x[far]) - gh
    return out


@dataclass
class _B:
    """Minimal stand-in carrying only the far-field coefficients."""
    b: np.ndarray


def _a_exact(V, mu, constrained, scaling, meso, beta, k, ell_tilde, x, switch):
    x = np.asarray(x, dtype=float)
    T = V.temperature
    tT = scaling.tau * T
    g0 = mu.log_potential(x)
    g1 = constrained.log_potential(x)
    eta = scaling.eta(x)
    loc = _local_difference(scaling, meso, beta, k, x, switch)
    return -2 * T * (g0 - g1) + (mu.robin - ell_tilde) + tT * (meso.F(eta) + 2 * loc)


def build_plan(V, mu, irr, meso, kappa, bigN, k=None, t=None, bump_spec=None,
               order=SERIES_ORDER, interp_tol=1e-10):
    """Assemble scaling map, beta, constrained measure and the perturbation A.

    Exactly one of ``k`` and ``t`` is normally given; with ``t`` the
    next-to-minimal truncation is used.
    """
    kappa = _check_kappa(kappa)
    if k is None:
        if t is None:
            raise ValidationError("give either the truncation k or the growth exponent t")
        k = choose_truncation(irr.nu, t)
    if meso.nu != irr.nu:
        raise ValidationError("local potential degree does not match the outpost order")
    if kappa == 0:
        # no colony: nothing to perturb
        bs = bump_spec or BumpSpec((irr.x0 - 0.1, irr.x0 + 0.1), (irr.x0 - 0.2, irr.x0 + 0.2))
        return ColonizationPlan(V, mu, None, meso, k, np.zeros(k), bs, mu, np.zeros(1))
    sc = scaling_map(irr, V, mu, kappa, bigN, order)
    beta = laurent_coefficients(sc, meso, k)
    bs = bump_spec or default_bump(sc)
    (ja, jb), (Ja, Jb) = bs.inner, bs.outer
    if Ja <= mu.intervals[0][0] <= Jb or any(a < Jb and b > Ja for a, b in mu.intervals):
        raise ValidationError("the bump region overlaps the support")
    reach = sc.epsilon * float(np.max(np.abs(meso.measure.endpoints)))
    if reach > 0.8 * min(sc.x0 - ja, jb - sc.x0):
        raise ValidationError("the colony does not fit inside J; raise N or lower kappa")
    tau = sc.tau
    extra = constrained_field(sc.x0, sc.nu, sc.c0, V.temperature, sc.epsilon, beta)
    con = solve_equilibrium(V, 1.0 - tau, excluded=bs.inner, extra_field=extra,
                            backend="newton", initial=mu.endpoints)
    ell_tilde = con.robin - tau * V.temperature * meso.ell_mes
    switch = 0.5 * sc.radius
    fa = lambda X: _a_exact(V, mu, con, sc, meso, beta, k, ell_tilde,
                            0.5 * (Ja + Jb) + 0.5 * (Jb - Ja) * X, switch)
    # continuity of the two evaluation branches at the switch radius
    xs = sc.x0 + switch * np.array([-1 - 1e-12, -1 + 1e-12, 1 - 1e-12, 1 + 1e-12])
    xs = xs[(xs > Ja) & (xs < Jb)]
    if xs.size == 4:
        loc = _local_difference(sc, meso, beta, k, xs, switch)
        jump = max(abs(loc[1] - loc[0]), abs(loc[3] - loc[2]))
        if jump > 1e-9 * max(1.0, np.max(np.abs(loc))):
            raise NumericalError(f"local series and direct evaluation disagree by {jump:.3g}",
                                 stage="plan")
    coef = None
    for deg in (32, 64, 128, 256):
        cf = C.chebinterpolate(fa, deg)
        sc_ = max(np.max(np.abs(cf)), 1e-300)
        if np.max(np.abs(cf[-3:])) < interp_tol * sc_:
            coef = cf
            break
    if coef is None:
        raise QuadratureError("perturbation not resolved by a degree-256 interpolant", stage="plan")
    Xc = np.linspace(-0.999, 0.999, 97)
    err = float(np.max(np.abs(C.chebval(Xc, coef) - fa(Xc))))
    if err > 1e-8:
        raise QuadratureError(f"interpolation error {err:.3g} exceeds 1e-8", residual=err, stage="plan")
    keep = np.nonzero(np.abs(coef) > 1e-17 * sc_)[0]
    coef = coef[: keep[-1] + 1]
    plan = ColonizationPlan(V, mu, sc, meso, k, beta, bs, con, coef)
    plan.info.update({"interp_error": err, "epsilon": sc.epsilon, "tau": tau,
                      "growth_bound_ok": bool(growth_bound_ok(kappa, bigN, k, sc.nu))})
    return plan


def perturbation_A(plan, x):
    return plan.A(x)


def sup_A(plan, n=2001):
    """sup over J of |A|."""
    xs = np.linspace(plan.bump.inner[0], plan.bump.inner[1], n)
    return float(np.max(np.abs(plan.A(xs))))


# ---------------------------------------------------------- endpoint flow

@dataclass
class EndpointFlow:
    """Data for d(alpha)/d(eps) of the constrained problem at fixed V, x0, beta(eps)."""

    V: object
    x0: float
    nu: int
    c0: float
    b: np.ndarray
    ctab: np.ndarray
    alphas0: np.ndarray
    ablate: bool = False

    @classmethod
    def from_plan_inputs(cls, scaling, meso, k, ablate=False):
        b = meso_b(meso, k)
        ctab = _power_table(scaling.P, scaling.gamma, k, k) if k else np.zeros((0, 0))
        return cls(None, scaling.x0, scaling.nu, scaling.c0, b, ctab, scaling.alphas.copy(), ablate)

    @property
    def k(self):
        return self.b.size

    def a_coeffs(self, eps):
        """a_i(eps) = beta_i eps**i = sum_{j>=i} b_j c^(j)_{j-i} eps**j."""
        k = self.k
        return np.array([sum(self.b[j - 1] * self.ctab[j - 1, j - i] * eps ** j
                             for j in range(i, k + 1)) for i in range(1, k + 1)])

    def beta(self, eps):
        a = self.a_coeffs(eps)
        return a / eps ** np.arange(1, self.k + 1) if eps > 0 else self.b * np.diag(self.ctab)

    def field(self, eps):
        tT = self.c0 * eps ** (2 * self.nu + 2)
        a = self.a_coeffs(eps)
        return SingularField(self.x0, -2 * tT, tuple(2 * tT * a), 2 * tT * math.log(eps) if eps > 0 else 0.0)

    def dfield_poles(self, eps):
        """Coefficients r_m of s**(-m) in d/d eps of the field derivative."""
        p = 2 * self.nu + 2
        k = self.k
        r = np.zeros(k + 1)
        r[0] = -2 * p * self.c0 * eps ** (p - 1)
        if not self.ablate:
            for i in range(1, k + 1):
                dD = self.c0 * sum(self.b[j - 1] * self.ctab[j - 1, j - i] * (p + j) * eps ** (p + j - 1)
                                   for j in range(i, k + 1))
                r[i] = -2 * i * dD
        return r


def endpoint_ode(state, flow, eps, V, T=None, mass=None):
    """d alpha_j / d eps and F at endpoints ``state`` (array or measure).

    With y = phi~' = F sqrt(q) and omega = d y / d eps, R = omega sqrt(q) is
    the principal part at x0 of (d/d eps of the field derivative) sqrt(q),
    plus a constant that kills the gap period when there are two bands.
    Then d alpha_j / d eps = -2 R(alpha_j) / (F(alpha_j) prod_{k!=j}(alpha_j - alpha_k)).
    """
    alphas = np.asarray(state.endpoints if hasattr(state, "endpoints") else state, dtype=float)
    nb = alphas.size
    g = nb // 2 - 1
    if g not in (0, 1):
        raise ValidationError("the endpoint flow supports one or two bands only")
    T = V.temperature if T is None else T
    p = 2 * flow.nu + 2
    mass = 1.0 - flow.c0 * eps ** p / T if mass is None else mass
    fld = flow.field(eps)
    F, res = hyp.resolve(alphas, V.deriv_coeffs(1), flow.x0, fld.derivative_poles(), T, mass)
    r = flow.dfield_poles(eps)
    R = r.size
    sq = series.sqrt_product(alphas, flow.x0, R + 1, hyp.branch_sign(flow.x0, alphas))
    pp = np.array([np.dot(r[m - 1:], sq[: R - m + 1]) for m in range(1, R + 1)])

    def Rfun(x, r0=0.0):
        s = np.asarray(x, dtype=float) - flow.x0
        return Pn.polyval(1.0 / s, np.concatenate([[0.0], pp])) + r0

    r0 = 0.0
    if g == 1:
        lo, hi = alphas[1], alphas[2]
        n = 96
        th = (np.arange(n) + 0.5) * np.pi / n
        xg = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(th)
        w = 1.0 / np.sqrt(np.abs((xg - alphas[0]) * (xg - alphas[3])))
        r0 = -np.sum(w * Rfun(xg)) / np.sum(w)
    Fa = F(alphas)
    scale = max(1.0, float(np.max(np.abs(Fa))))
    if np.any(np.abs(Fa) < 1e-9 * scale):
        raise NumericalError("an endpoint is not simple (F vanishes there)", stage="endpoint-ode")
    prod = np.array([np.prod(alphas[j] - np.delete(alphas, j)) for j in range(nb)])
    return -2 * Rfun(alphas, r0) / (Fa * prod), F


def integrate_endpoints(flow, V, eps_end, steps=50, alphas0=None):
    """Classical RK4 for alpha(eps) from eps = 0; returns (eps grid, alpha table)."""
    a = np.array(flow.alphas0 if alphas0 is None else alphas0, dtype=float)
    h = eps_end / steps
    out = [a.copy()]
    e = 0.0
    for _ in range(steps):
        k1 = endpoint_ode(a, flow, e, V)[0]
        k2 = endpoint_ode(a + 0.5 * h * k1, flow, e + 0.5 * h, V)[0]
        k3 = endpoint_ode(a + 0.5 * h * k2, flow, e + 0.5 * h, V)[0]
        k4 = endpoint_ode(a + h * k3, flow, e + h, V)[0]
        a = a + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        e += h
        out.append(a.copy())
    return np.linspace(0.0, eps_end, steps + 1), np.array(out)


def direct_endpoints(flow, V, eps, initial, excluded=None):
    """Endpoints of the constrained problem at ``eps`` by a Newton re-solve."""
    p = 2 * flow.nu + 2
    tau = flow.c0 * eps ** p / V.temperature
    fld = flow.field(eps)
    if excluded is None:
        d = float(np.min(np.abs(np.asarray(initial) - flow.x0)))
        excluded = (flow.x0 - 0.25 * d, flow.x0 + 0.25 * d)
    mu = solve_equilibrium(V, 1.0 - tau, excluded=excluded, extra_field=fld, backend="newton",
                           initial=initial)
    return mu.endpoints
