"""Algebra of the hyperelliptic ansatz phi'(x) = F(x) sqrt(q(x)).

For an external field whose derivative is

    W'(z) = P(z) + sum_m r_m (z - x0)**(-m)

(P a polynomial, finitely many poles at an outpost x0 off the support) and
a trial support with endpoints alpha_1 < ... < alpha_{2g+2}, q(z) = prod
(z - alpha_j) and sqrt(q) ~ z**(g+1) at infinity. The function F is the
polynomial part of P/sqrt(q) plus the principal part of W'/sqrt(q) at x0,
and the endpoints are fixed by

    [u^e](W'/sqrt(q) - F) = 0          e = 1..g+1
    [u^(g+2)](W'/sqrt(q) - F) = 2 T m
    int_gap F sqrt|q| = 0              for each of the g gaps

with u = 1/z. All expansions are finite series computations.
"""

from dataclasses import dataclass
from math import comb

import numpy as np
from numpy.polynomial import polynomial as Pn

from . import series
from .errors import ValidationError


@dataclass
class RationalFunction:
    """poly(x) + sum_m pole[m-1] (x - x0)**(-m)."""

    poly: np.ndarray
    x0: float = 0.0
    pole: np.ndarray = None

    def __post_init__(self):
        self.poly = np.atleast_1d(np.asarray(self.poly, dtype=float))
        self.pole = np.zeros(0) if self.pole is None else np.asarray(self.pole, dtype=float)

    def __call__(self, x):
        x = np.asarray(x)
        out = Pn.polyval(x, self.poly)
        if self.pole.size:
            s = x - self.x0
            out = out + Pn.polyval(1.0 / s, np.concatenate([[0.0], self.pole]))
        return out

    def derivative(self):
        dp = Pn.polyder(self.poly) if self.poly.size > 1 else np.zeros(1)
        if not self.pole.size:
            return RationalFunction(dp)
        m = np.arange(1, self.pole.size + 1)
        dpole = np.concatenate([[0.0], -m * self.pole])
        return RationalFunction(dp, self.x0, dpole)

    def to_dict(self):
        return {"poly": self.poly.tolist(), "x0": self.x0, "pole": self.pole.tolist()}


def branch_sign(x, alphas):
    """Sign of the branch of sqrt(q) (~ z**(g+1)) at a real x off the bands."""
    n_right = int(np.sum(np.asarray(alphas) > x))
    if n_right % 2:
        raise ValidationError("point lies inside a band")
    return -1.0 if (n_right // 2) % 2 else 1.0


def sqrt_q(x, alphas):
    """Real value of the branch sqrt(q) at real x off the bands (0 inside)."""
    x = np.asarray(x, dtype=float)
    alphas = np.asarray(alphas)
    val = np.sqrt(np.abs(np.prod(x[..., None] - alphas, axis=-1)))
    n_right = np.sum(alphas > x[..., None], axis=-1)
    sign = np.where((n_right // 2) % 2 == 1, -1.0, 1.0)
    return np.where(n_right % 2 == 1, 0.0, sign * val)


def inv_sqrt_at_infinity(alphas, n):
    """S(u) with 1/sqrt(q(z)) = u**(g+1) S(u), u = 1/z."""
    Q = np.array([1.0])
    for a in alphas:
        Q = np.convolve(Q, [1.0, -a])
    return series.power(Q, -0.5, n)


def sqrt_at_infinity(alphas, n):
    """S+(u) with sqrt(q(z)) = z**(g+1) S+(u)."""
    Q = np.array([1.0])
    for a in alphas:
        Q = np.convolve(Q, [1.0, -a])
    return series.power(Q, 0.5, n)


def _pole_at_inf(e, x0, orders):
    """[u^E] of sum_m e_m (z-x0)^(-m) for E in ``orders``."""
    out = np.zeros(len(orders))
    for k, E in enumerate(orders):
        for m in range(1, min(E, e.size) + 1):
            out[k] += e[m - 1] * comb(E - 1, m - 1) * x0 ** (E - m)
    return out


def resolve(alphas, P, x0=0.0, rpole=None, T=1.0, mass=1.0):
    """Return (F, residual vector) for trial endpoints ``alphas``."""
    alphas = np.asarray(alphas, dtype=float)
    nb = alphas.size
    if nb % 2 or nb < 2:
        raise ValidationError("need an even number of endpoints")
    g = nb // 2 - 1
    P = np.atleast_1d(np.asarray(P, dtype=float))
    rpole = np.zeros(0) if rpole is None else np.asarray(rpole, dtype=float)
    D = P.size - 1
    S = inv_sqrt_at_infinity(alphas, D + 3)

    # P/sqrt(q): exponent of u for P_i z^i * u^(g+1+l) is l+g+1-i
    poly = np.zeros(max(D - g, 1))
    cinf = np.zeros(g + 3)
    for i, Pi in enumerate(P):
        for l in range(S.size):
            E = l + g + 1 - i
            if E <= 0:
                poly[-E] += Pi * S[l]
            elif E <= g + 2:
                cinf[E] += Pi * S[l]
    if rpole.size:
        cinf[g + 2] += rpole[0]

    e = np.zeros(0)
    if rpole.size:
        R = rpole.size
        sign = branch_sign(x0, alphas)
        tau = series.power(series.sqrt_product(alphas, x0, R + 1), -1.0, R + 1) * sign
        e = np.array([np.dot(rpole[m - 1:], tau[: R - m + 1]) for m in range(1, R + 1)])
        cinf[1:] -= _pole_at_inf(e, x0, list(range(1, g + 3)))

    F = RationalFunction(poly, x0, e)
    res = list(cinf[1:g + 2]) + [cinf[g + 2] - 2.0 * T * mass]
    for k in range(g):
        res.append(gap_integral(F, alphas, k))
    return F, np.array(res)


def gap_integral(F, alphas, k, n=80):
    """int over the k-th gap of F(x) sqrt|q(x)| dx."""
    lo, hi = alphas[2 * k + 1], alphas[2 * k + 2]
    if F.pole.size and lo < F.x0 < hi:
        raise ValidationError("outpost inside a gap is not supported by the ansatz")
    c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
    i = np.arange(1, n + 1)
    th = i * np.pi / (n + 1)
    X = np.cos(th)
    w = np.pi / (n + 1) * np.sin(th) ** 2
    x = c + h * X
    others = np.delete(alphas, [2 * k + 1, 2 * k + 2])
    rest = np.sqrt(np.abs(np.prod(x[:, None] - others, axis=1)))
    return h * h * np.sum(w * F(x) * rest)
