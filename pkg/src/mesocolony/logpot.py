"""Band densities with a square-root edge factor and their log potentials.

On a band [a, b] the density is stored as

    rho(x) = sqrt((x - a)(b - x)) * sum_k u_k U_k(X),   X = (x - c)/h,

with c, h the band center and half-width and U_k the Chebyshev polynomials
of the second kind. Against this weight the logarithmic potential and the
Stieltjes transform of each U_k are elementary, which gives log-kernel
integrals to machine precision at any distance from the band.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P

from .errors import QuadratureError

_LOG2 = np.log(2.0)


def cheb_t_to_u(t):
    t = np.asarray(t, dtype=float)
    u = np.zeros_like(t)
    for n, tn in enumerate(t):
        if n == 0:
            u[0] += tn
        else:
            u[n] += 0.5 * tn
            if n >= 2:
                u[n - 2] -= 0.5 * tn
    return u


def cheb_u_to_t(u):
    """Inverse of :func:`cheb_t_to_u` (U_k = 2 sum T_j over j = k, k-2, ...)."""
    u = np.asarray(u, dtype=float)
    t = np.zeros_like(u)
    for k, uk in enumerate(u):
        for j in range(k, -1, -2):
            t[j] += uk if j == 0 else 2.0 * uk
    return t


@dataclass
class BandDensity:
    a: float
    b: float
    u: np.ndarray
    t: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.t = cheb_u_to_t(self.u)

    @classmethod
    def from_function(cls, a, b, r, deg=None, tol=1e-15, max_deg=512):
        """Interpolate the smooth factor ``r(x) = rho(x)/sqrt((x-a)(b-x))``."""
        c, h = 0.5 * (a + b), 0.5 * (b - a)
        f = lambda X: r(c + h * X)
        degs = [deg] if deg else [16, 32, 64, 128, 256, max_deg]
        for d in degs:
            t = C.chebinterpolate(f, d)
            scale = max(np.max(np.abs(t)), 1e-300)
            if deg or np.max(np.abs(t[-4:])) <= tol * scale * 10:
                break
        else:
            raise QuadratureError(f"band factor not resolved with {max_deg} Chebyshev terms",
                                  residual=float(np.max(np.abs(t[-4:])) / scale))
        # chop the negligible tail
        keep = np.nonzero(np.abs(t) > tol * scale)[0]
        t = t[: (keep[-1] + 1 if keep.size else 1)]
        return cls(float(a), float(b), cheb_t_to_u(t))

    @property
    def center(self):
        return 0.5 * (self.a + self.b)

    @property
    def half_width(self):
        return 0.5 * (self.b - self.a)

    def _X(self, x):
        return (np.asarray(x, dtype=float) - self.center) / self.half_width

    @property
    def mass(self):
        return self.half_width ** 2 * 0.5 * np.pi * self.u[0]

    def factor(self, x):
        return C.chebval(self._X(x), self.t)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        X = self._X(x)
        inside = np.abs(X) <= 1.0
        w = self.half_width * np.sqrt(np.clip(1.0 - X * X, 0.0, None))
        return np.where(inside, w * C.chebval(X, self.t), 0.0)

    def quadrature(self, n=None):
        """Nodes and weights with sum(w f(x)) = int f rho (Gauss-Chebyshev U)."""
        n = n or max(64, 2 * self.u.size + 16)
        i = np.arange(1, n + 1)
        th = i * np.pi / (n + 1)
        X = np.cos(th)
        wq = np.pi / (n + 1) * np.sin(th) ** 2
        x = self.center + self.half_width * X
        return x, self.half_width ** 2 * wq * C.chebval(X, self.t)

    def moment(self, j):
        x, w = self.quadrature(max(64, self.u.size + j + 8))
        return float(np.sum(w * x ** j))

    def log_potential(self, x):
        """int log|x - s| rho(s) ds for real x."""
        x = np.asarray(x, dtype=float)
        X = self._X(x)
        h = self.half_width
        u = self.u
        K = u.size
        out = np.empty(X.shape)
        inside = np.abs(X) <= 1.0
        if np.any(inside):
            c = np.zeros(K + 2)
            c[0] -= u[0] * _LOG2
            c[2] += 0.5 * u[0]
            for k in range(1, K):
                c[k + 2] += u[k] / (k + 2)
                c[k] -= u[k] / k
            out[inside] = 0.5 * np.pi * C.chebval(X[inside], c)
        if np.any(~inside):
            Xo = X[~inside]
            w = Xo + np.sign(Xo) * np.sqrt(Xo * Xo - 1.0)
            v = 1.0 / w
            d = np.zeros(K + 2)
            d[2] += 0.5 * u[0]
            for k in range(1, K):
                d[k + 2] += u[k] / (k + 2)
                d[k] -= u[k] / k
            out[~inside] = 0.5 * np.pi * (u[0] * np.log(np.abs(w) / 2.0) + P.polyval(v, d))
        return h * h * (np.log(h) * 0.5 * np.pi * u[0] + out)

    def stieltjes(self, x):
        """int rho(s)/(x - s) ds, principal value on the band."""
        x = np.asarray(x, dtype=float)
        X = self._X(x)
        u = self.u
        out = np.empty(X.shape)
        inside = np.abs(X) <= 1.0
        if np.any(inside):
            c = np.concatenate([[0.0], u])
            out[inside] = C.chebval(X[inside], c)
        if np.any(~inside):
            Xo = X[~inside]
            v = 1.0 / (Xo + np.sign(Xo) * np.sqrt(Xo * Xo - 1.0))
            out[~inside] = P.polyval(v, np.concatenate([[0.0], u]))
        return self.half_width * np.pi * out

    def to_dict(self):
        return {"interval": [self.a, self.b], "u_coeffs": self.u.tolist()}
