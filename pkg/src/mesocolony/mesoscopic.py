"""Local (rescaled) problem at the outpost.

The local potential is V_mes(eta) = eta**(2nu+2) + sum_j t_j eta**j at unit
temperature and unit mass. Its log transform has the far-field expansion

    g_mes(xi) = ln xi - sum_{j>=1} b_j xi**(-j),   b_j = (1/j) int eta**j rho_mes,

and the truncation to j <= k is used by the colonization construction.
"""

from dataclasses import dataclass

import numpy as np

from .equilibrium import EquilibriumMeasure, solve_equilibrium
from .errors import BandCountError, ValidationError
from .potential import PolynomialPotential

DEFAULT_ORDER = 12


@dataclass
class MesoscopicModel:
    nu: int
    t: tuple
    measure: EquilibriumMeasure
    b: np.ndarray
    ell_mes: float
    k: int = None

    @property
    def potential(self):
        return self.measure.potential

    @property
    def n_bands(self):
        return len(self.measure.bands)

    def F(self, eta):
        """The lower-order part sum_j t_j eta**j."""
        return np.polynomial.polynomial.polyval(eta, np.concatenate([[0.0], self.t]))

    def density(self, eta):
        return self.measure.density(eta)

    def g(self, xi):
        return self.measure.log_potential(xi)

    def to_dict(self):
        return {"nu": self.nu, "t": list(self.t), "b": self.b.tolist(), "ell_mes": self.ell_mes,
                "k": self.k, "measure": self.measure.to_dict()}


def meso_potential(nu, t):
    nu = int(nu)
    if nu < 0:
        raise ValidationError("nu must be non-negative")
    t = tuple(float(v) for v in t)
    if len(t) > 2 * nu + 1:
        raise ValidationError(f"at most 2 nu + 1 = {2 * nu + 1} lower coefficients, got {len(t)}")
    t = t + (0.0,) * (2 * nu + 1 - len(t))
    return PolynomialPotential((0.0,) + t + (1.0,), 1.0), t


def meso_equilibrium(nu, t, order=DEFAULT_ORDER, backend="newton"):
    """Equilibrium measure, moments and Robin constant of the local potential."""
    V, t = meso_potential(nu, t)
    mu = solve_equilibrium(V, 1.0, backend=backend)
    if len(mu.bands) > nu + 1:
        raise BandCountError(f"{len(mu.bands)} bands exceed the bound nu + 1 = {nu + 1}",
                             stage="meso")
    m = MesoscopicModel(int(nu), t, mu, np.zeros(0), float(mu.robin))
    m.b = meso_moments(m, order)
    return m


def meso_moments(m, k):
    """b_1..b_k from the moments of the local measure."""
    if k < 0:
        raise ValidationError("k must be non-negative")
    if m.b.size >= k:
        return m.b[:k].copy()
    return np.array([m.measure.moment(j) / j for j in range(1, k + 1)])


def far_field_fit(m, k, reach=2.0, n=64):
    """b_1..b_k from g_mes sampled on the circle |xi| = reach * R.

    g_mes(xi) - ln xi = sum_l w_l log(1 - eta_l / xi) is evaluated by
    quadrature over the bands; on equispaced circle points the trapezoid
    rule is the least-squares projection onto the powers xi**(-j).
    """
    R = float(np.max(np.abs(m.measure.endpoints)))
    r = reach * R
    xi = r * np.exp(2j * np.pi * np.arange(n) / n)
    D = np.zeros(n, dtype=complex)
    for band in m.measure.bands:
        x, w = band.quadrature()
        D += np.log1p(-x[None, :] / xi[:, None]) @ w
    j = np.arange(1, k + 1)
    return -np.real(np.mean(D[None, :] * xi[None, :] ** j[:, None], axis=1))


def truncated_g(m, k, eta):
    """(g_hat_mes(eta), f_mes(eta)) with k far-field terms.

    Real input uses ln|eta| (the real part); complex input the principal log.
    """
    eta = np.asarray(eta)
    if np.any(eta == 0):
        raise ValidationError("truncated g is singular at eta = 0")
    b = meso_moments(m, k)
    inv = 1.0 / eta
    f = np.polynomial.polynomial.polyval(inv, np.concatenate([[0.0], b]))
    lg = np.log(eta) if np.iscomplexobj(eta) else np.log(np.abs(eta))
    return lg - f, f
