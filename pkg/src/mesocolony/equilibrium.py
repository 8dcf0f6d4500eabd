"""Equilibrium measures of polynomial (plus outpost-singular) external fields.

Two backends are available. ``"newton"`` solves the endpoint conditions of
the ansatz phi'(x) = F(x) sqrt(q(x)) (see :mod:`.hyperelliptic`) and
returns band densities with a square-root edge factor; ``"grid"`` solves a
discretized convex energy minimization (see :mod:`.gridsolve`).
"""

from dataclasses import dataclass, field
import logging

import numpy as np
from numpy.polynomial import polynomial as Pn
from scipy.optimize import brentq

from . import gridsolve, hyperelliptic as hyp
from .errors import BandCountError, ConvergenceError, NumericalError, ValidationError
from .logpot import BandDensity
from .potential import IrregularPoint, PolynomialPotential, effective_potential

log = logging.getLogger(__name__)

MAX_BANDS = 4


@dataclass(frozen=True)
class SingularField:
    """W(x) = log_coeff ln|x - x0| + const + sum_m poles[m-1] (x - x0)**(-m)."""

    x0: float
    log_coeff: float = 0.0
    poles: tuple = ()
    const: float = 0.0

    def __call__(self, x):
        s = np.asarray(x, dtype=float) - self.x0
        with np.errstate(divide="ignore"):
            out = self.log_coeff * np.log(np.abs(s)) + self.const
        if self.poles:
            out = out + Pn.polyval(1.0 / s, np.concatenate([[0.0], self.poles]))
        return out

    def derivative_poles(self):
        """Coefficients r_m of (x - x0)**(-m) in W'(x), m = 1, 2, ..."""
        m = np.arange(1, len(self.poles) + 1)
        return np.concatenate([[self.log_coeff], -m * np.asarray(self.poles, dtype=float)])

    def derivative(self, x):
        r = self.derivative_poles()
        s = np.asarray(x, dtype=float) - self.x0
        return Pn.polyval(1.0 / s, np.concatenate([[0.0], r]))

    def to_dict(self):
        return {"x0": self.x0, "log_coeff": self.log_coeff, "poles": list(self.poles),
                "const": self.const}


@dataclass
class CellDensity:
    """Piecewise-constant density on cells [lo_i, hi_i] (grid backend)."""

    lo: np.ndarray
    hi: np.ndarray
    rho: np.ndarray

    @property
    def a(self):
        return float(self.lo[0])

    @property
    def b(self):
        return float(self.hi[-1])

    @property
    def mass(self):
        return float(np.sum(self.rho * (self.hi - self.lo)))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        i = np.searchsorted(self.hi, x)
        inside = (i < self.lo.size) & (x >= self.lo[np.minimum(i, self.lo.size - 1)])
        return np.where(inside, self.rho[np.minimum(i, self.lo.size - 1)], 0.0)

    @staticmethod
    def _psi(u):
        au = np.abs(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(au > 0, u * np.log(au) - u, 0.0)

    def log_potential(self, x):
        x = np.asarray(x, dtype=float)
        xs = x.reshape(-1, 1)
        val = self._psi(xs - self.lo) - self._psi(xs - self.hi)
        return (val @ self.rho).reshape(x.shape)

    def stieltjes(self, x):
        x = np.asarray(x, dtype=float)
        xs = x.reshape(-1, 1)
        with np.errstate(divide="ignore"):
            val = np.log(np.abs(xs - self.lo)) - np.log(np.abs(xs - self.hi))
        return (val @ self.rho).reshape(x.shape)

    def moment(self, j):
        return float(np.sum(self.rho * (self.hi ** (j + 1) - self.lo ** (j + 1))) / (j + 1))

    def to_dict(self):
        return {"interval": [self.a, self.b], "cells_lo": self.lo.tolist(),
                "cells_hi": self.hi.tolist(), "rho": self.rho.tolist()}


@dataclass
class EquilibriumMeasure:
    """Equilibrium measure of ``potential`` (+ ``extra``) with total mass ``mass``."""

    bands: list
    mass: float
    robin: float
    potential: PolynomialPotential
    extra: SingularField = None
    excluded: tuple = None
    backend: str = "newton"
    F: hyp.RationalFunction = None
    info: dict = field(default_factory=dict)

    @property
    def T(self):
        return self.potential.temperature

    @property
    def intervals(self):
        return [(b.a, b.b) for b in self.bands]

    @property
    def endpoints(self):
        return np.array([e for b in self.bands for e in (b.a, b.b)])

    def log_potential(self, x):
        return sum(b.log_potential(x) for b in self.bands)

    def stieltjes(self, x):
        return sum(b.stieltjes(x) for b in self.bands)

    def density(self, x):
        return sum(b.density(x) for b in self.bands)

    def moment(self, j):
        return sum(b.moment(j) for b in self.bands)

    def field(self, x):
        """Total external field V (+ extra)."""
        v = self.potential(np.asarray(x, dtype=float))
        return v if self.extra is None else v + self.extra(x)

    def on_band(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            out |= (x >= a) & (x <= b)
        return out

    def scaled(self, factor):
        """Same shape with the density multiplied by ``factor`` (diagnostics)."""
        bands = [BandDensity(b.a, b.b, factor * b.u) if isinstance(b, BandDensity)
                 else CellDensity(b.lo, b.hi, factor * b.rho) for b in self.bands]
        return EquilibriumMeasure(bands, factor * self.mass, self.robin, self.potential,
                                  self.extra, self.excluded, self.backend, self.F)

    def to_dict(self):
        return {
            "backend": self.backend,
            "endpoints": self.endpoints.tolist(),
            "bands": [b.to_dict() for b in self.bands],
            "mass": self.mass,
            "robin": self.robin,
            "potential": self.potential.to_dict(),
            "extra": None if self.extra is None else self.extra.to_dict(),
            "excluded": None if self.excluded is None else list(self.excluded),
        }

    def profile(self, n=400):
        """(x, rho) samples over the support, for CSV export."""
        xs = np.concatenate([np.linspace(a, b, n) for a, b in self.intervals])
        return xs, self.density(xs)


@dataclass
class VariationalReport:
    max_on_support: float
    min_off_support: float
    regular: bool
    argmin_off_support: float = float("nan")

    def to_dict(self):
        return {"max_on_support": self.max_on_support, "min_off_support": self.min_off_support,
                "regular": self.regular, "argmin_off_support": self.argmin_off_support}


def g_function(mu, x):
    """int log|x - t| dmu(t)."""
    return mu.log_potential(x)


# ---------------------------------------------------------------- newton

def _band_signs(nbands):
    # sign of F on band k that gives a positive density: (-1)**(bands to its right)
    return np.array([(-1.0) ** (nbands - 1 - k) for k in range(nbands)])


def _newton(alphas, P, x0, rpole, T, mass, tol=1e-13, max_iter=80):
    alphas = np.array(alphas, dtype=float)
    res_scale = max(1.0, float(np.max(np.abs(P))), T * mass)

    def resid(al):
        if np.any(np.diff(al) <= 0):
            return None
        if rpole is not None and np.any((al[0::2] <= x0) & (x0 <= al[1::2])):
            return None
        try:
            return hyp.resolve(al, P, x0, rpole, T, mass)[1] / res_scale
        except (ValidationError, ValueError):
            return None

    r = resid(alphas)
    if r is None:
        raise ConvergenceError("invalid initial endpoints", stage="newton")
    nr = float(np.linalg.norm(r))
    for it in range(max_iter):
        if nr < tol:
            break
        J = np.empty((r.size, alphas.size))
        for j in range(alphas.size):
            h = 1e-7 * max(1.0, abs(alphas[j]))
            ap = alphas.copy()
            am = alphas.copy()
            ap[j] += h
            am[j] -= h
            rp, rm = resid(ap), resid(am)
            if rp is None or rm is None:
                raise ConvergenceError("endpoints collided during Newton", residual=nr, stage="newton")
            J[:, j] = (rp - rm) / (2 * h)
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Newton Jacobian", residual=nr, stage="newton") from exc
        lam = 1.0
        while lam > 1e-4:
            trial = alphas + lam * step
            rt = resid(trial)
            if rt is not None and np.linalg.norm(rt) < (1 - 1e-4 * lam) * nr:
                break
            lam *= 0.5
        else:
            if nr < 1e-9:
                break
            raise ConvergenceError("Newton line search failed", residual=nr, stage="newton")
        alphas, r, nr = trial, rt, float(np.linalg.norm(rt))
        if np.max(np.abs(lam * step)) < 1e-15 * max(1.0, np.max(np.abs(alphas))) and nr < 1e-9:
            break
    else:
        if nr > 1e-9:
            raise ConvergenceError("Newton did not converge", residual=nr, stage="newton")
    return alphas, nr


def measure_from_ansatz(alphas, F, V, mass, extra=None, excluded=None, simple_tol=1e-9):
    """Band densities |F| sqrt|q| / (2 pi T) and Robin constant for given endpoints."""
    T = V.temperature
    alphas = np.asarray(alphas, dtype=float)
    nb = alphas.size // 2
    signs = _band_signs(nb)
    scale = max(1.0, float(np.max(np.abs(F(alphas)))))
    bands = []
    for k in range(nb):
        a, b = alphas[2 * k], alphas[2 * k + 1]
        others = np.delete(alphas, [2 * k, 2 * k + 1])
        th = np.linspace(0.0, np.pi, 129)
        xs = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(th)
        Fs = signs[k] * F(xs)
        if np.min(Fs[1:-1]) < 0:
            raise BandCountError(f"negative density on band [{a:.6g}, {b:.6g}]", stage="ansatz")
        if min(Fs[0], Fs[-1]) < simple_tol * scale:
            raise NumericalError(f"endpoint of band [{a:.6g}, {b:.6g}] is not simple", stage="ansatz")

        def r(x, others=others, s=signs[k]):
            rest = np.sqrt(np.abs(np.prod(np.asarray(x)[..., None] - others, axis=-1))) if others.size else 1.0
            return s * F(x) * rest / (2 * np.pi * T)

        bands.append(BandDensity.from_function(a, b, r))
    mtot = sum(b.mass for b in bands)
    if abs(mtot - mass) > 1e-10 * max(1.0, mass):
        raise NumericalError(f"band masses sum to {mtot!r}, expected {mass!r}", residual=abs(mtot - mass),
                             stage="ansatz")
    a1 = alphas[0]
    logp = sum(b.log_potential(a1) for b in bands)
    field = V(a1) + (extra(a1) if extra is not None else 0.0)
    robin = float(2 * T * logp - field)
    return EquilibriumMeasure(bands, mass, robin, V, extra, excluded, "newton", F)


def _seed_from_F(mu):
    """Split the band on which F changes sign into two (for a retry)."""
    out = []
    signs = _band_signs(len(mu.bands))
    for k, (a, b) in enumerate(mu.intervals):
        xs = np.linspace(a, b, 401)
        neg = signs[k] * mu.F(xs) < 0
        if np.any(neg[1:-1]):
            i = np.nonzero(neg)[0]
            c, d = xs[max(i[0] - 1, 0)], xs[min(i[-1] + 1, xs.size - 1)]
            out.extend([a, c, d, b])
        else:
            out.extend([a, b])
    return out


def _newton_attempt(V, mass, extra, excluded, alphas0):
    P = V.deriv_coeffs(1)
    x0 = extra.x0 if extra is not None else 0.0
    rpole = extra.derivative_poles() if extra is not None else None
    alphas, nr = _newton(alphas0, P, x0, rpole, V.temperature, mass)
    F, _ = hyp.resolve(alphas, P, x0, rpole, V.temperature, mass)
    return alphas, F, nr


def _probe_ok(V, mu, tol):
    xs = _probe_grid(mu, 400)
    phi = effective_potential(V, mu, xs)
    return float(np.min(phi)) >= -tol * V.scale()


def _solve_newton(V, mass, extra, excluded, initial, tol):
    field = _field(V, extra)
    if initial is not None:
        seeds = {len(initial) // 2: list(initial)}
    else:
        bands, _ = gridsolve.coarse_bands(field, V.temperature, mass, excluded)
        seeds = {len(bands): [e for ab in bands for e in ab]}
        # a coarse grid may show a spurious sliver where phi nearly vanishes;
        # the one-band seed is the widest band
        seeds.setdefault(1, list(max(bands, key=lambda ab: ab[1] - ab[0])))
    last = None
    for nb in range(1, MAX_BANDS + 1):
        seed = seeds.get(nb)
        if seed is None:
            continue
        try:
            alphas, F, nr = _newton_attempt(V, mass, extra, excluded, seed)
            mu = measure_from_ansatz(alphas, F, V, mass, extra, excluded)
            mu.info["newton_residual"] = nr
            if _probe_ok(V, mu, tol):
                return mu
            last = ConvergenceError(f"{nb}-band solution violates the inequality off the support",
                                    stage="newton")
        except BandCountError as exc:
            # the ansatz converged but F changes sign on a band: split it
            last = exc
            seeds.setdefault(nb + 1, _seed_from_F(_Fview(alphas, F)))
        except NumericalError as exc:
            last = exc
    # last resort: a refined grid solve for the band count and seeds
    sol = gridsolve.solve_grid(field, V.temperature, mass, excluded)
    nbg = len(sol.bands)
    seed = [e for ab in sol.bands for e in ab]
    try:
        alphas, F, nr = _newton_attempt(V, mass, extra, excluded, seed)
        mu = measure_from_ansatz(alphas, F, V, mass, extra, excluded)
        mu.info["newton_residual"] = nr
        return mu
    except NumericalError as exc:
        raise BandCountError(f"no admissible band count up to {MAX_BANDS} (grid suggests {nbg}); "
                             f"last error: {last or exc}", stage="newton") from exc


@dataclass
class _Fview:
    alphas: np.ndarray
    F: hyp.RationalFunction

    @property
    def bands(self):
        return list(range(len(self.alphas) // 2))

    @property
    def intervals(self):
        return [(self.alphas[2 * k], self.alphas[2 * k + 1]) for k in range(len(self.alphas) // 2)]


def _field(V, extra):
    if extra is None:
        return V
    return lambda x: V(x) + extra(x)


def _solve_grid(V, mass, extra, excluded, n_cells):
    sol = gridsolve.solve_grid(_field(V, extra), V.temperature, mass, excluded, n_cells=n_cells)
    lo, hi = sol.edges[:, 0], sol.edges[:, 1]
    bands = []
    for a, b in sol.bands:
        sel = (hi > a - 1e-14) & (lo < b + 1e-14) & (sol.rho > 0)
        bands.append(CellDensity(lo[sel], hi[sel], sol.rho[sel]))
    mu = EquilibriumMeasure(bands, mass, sol.robin, V, extra, excluded, "grid")
    mu.info["edge_estimates"] = [list(ab) for ab in sol.bands]
    return mu


def solve_equilibrium(V, mass=1.0, excluded=None, extra_field=None, backend="newton", initial=None,
                      n_cells=1000, tol=1e-8):
    """Equilibrium measure of ``V`` (+ ``extra_field``) with total ``mass``.

    Parameters
    ----------
    V : PolynomialPotential
    mass : float in (0, 1]
    excluded : (float, float), optional
        Interval the measure may not charge.
    extra_field : SingularField, optional
        Added to V; its singular point must lie inside ``excluded``.
    backend : {"newton", "grid"}
    initial : sequence of floats, optional
        Starting endpoints for the Newton backend (skips the band search).
    """
    if not (0.0 < mass <= 1.0):
        raise ValidationError(f"mass must lie in (0, 1], got {mass}")
    if excluded is not None:
        excluded = (float(excluded[0]), float(excluded[1]))
        if not excluded[0] < excluded[1]:
            raise ValidationError("excluded interval is empty")
    if extra_field is not None and (excluded is None or
                                    not excluded[0] < extra_field.x0 < excluded[1]):
        raise ValidationError("the singular point of the extra field must lie in the excluded interval")
    if backend == "newton":
        mu = _solve_newton(V, mass, extra_field, excluded, initial, tol)
        if excluded is not None and any(a < excluded[1] and b > excluded[0] for a, b in mu.intervals):
            raise BandCountError("support overlaps the excluded interval", stage="newton")
        return mu
    if backend == "grid":
        return _solve_grid(V, mass, extra_field, excluded, n_cells)
    raise ValidationError(f"unknown backend {backend!r}")


# ---------------------------------------------------------- verification

def _probe_range(mu):
    """Window holding the support and every point where the field is low."""
    R = gridsolve._initial_radius(mu.field, mu.T, mu.excluded)
    a, b = mu.intervals[0][0], mu.intervals[-1][1]
    w = b - a
    return min(a - w, -R), max(b + w, R)


def _probe_grid(mu, n=1000):
    lo, hi = _probe_range(mu)
    xs = np.linspace(lo, hi, n)
    keep = ~mu.on_band(xs)
    if mu.excluded is not None:
        keep &= (xs < mu.excluded[0]) | (xs > mu.excluded[1])
    return xs[keep]


def _gap_regions(mu):
    """Off-band intervals (gaps and the two outer rays cut at the probe range)."""
    iv = mu.intervals
    lo, hi = _probe_range(mu)
    regions = [(lo, iv[0][0])]
    regions += [(iv[k][1], iv[k + 1][0]) for k in range(len(iv) - 1)]
    regions.append((iv[-1][1], hi))
    if mu.excluded is not None:
        ja, jb = mu.excluded
        out = []
        for lo, hi in regions:
            if hi <= ja or lo >= jb:
                out.append((lo, hi))
            else:
                if lo < ja:
                    out.append((lo, ja))
                if hi > jb:
                    out.append((jb, hi))
        regions = out
    return regions


def _interior_zeros(V, mu, zero_tol):
    """Off-band local minima of phi whose value is at most ``zero_tol``."""
    found = []
    for lo, hi in _gap_regions(mu):
        xs = np.linspace(lo, hi, 801)[1:-1]
        if xs.size < 3:
            continue
        phi = effective_potential(V, mu, xs)
        i = np.nonzero((phi[1:-1] <= phi[:-2]) & (phi[1:-1] <= phi[2:]))[0] + 1
        for j in i:
            x = _refine_min(V, mu, xs[j - 1], xs[j + 1])
            v = float(effective_potential(V, mu, x))
            if v <= zero_tol:
                found.append((x, v))
    return found


def _phi_prime(V, mu, x):
    x = np.asarray(x, dtype=float)
    out = V.derivative(x) - 2 * V.temperature * mu.stieltjes(x)
    if mu.extra is not None:
        out = out + mu.extra.derivative(x)
    return out


def _refine_min(V, mu, lo, hi):
    d = lambda x: float(_phi_prime(V, mu, x))
    dl, dh = d(lo), d(hi)
    if dl < 0 < dh:
        return brentq(d, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    return 0.5 * (lo + hi)


def verify_variational(V, mu, tol=1e-8, n_probe=1000):
    """Check phi = 0 on the bands, phi >= 0 off them, and strictness."""
    on = []
    for a, b in mu.intervals:
        th = np.linspace(0.0, np.pi, 65)
        on.append(0.5 * (a + b) - 0.5 * (b - a) * np.cos(th))
    on = np.concatenate(on)
    max_on = float(np.max(np.abs(effective_potential(V, mu, on))))
    xs = _probe_grid(mu, n_probe)
    phi = effective_potential(V, mu, xs)
    i = int(np.argmin(phi))
    min_off, arg = float(phi[i]), float(xs[i])
    scale = V.scale()
    zeros = _interior_zeros(V, mu, 1e-8 * scale)
    if zeros:
        x, v = min(zeros, key=lambda t: t[1])
        if v < min_off:
            min_off, arg = v, x
    regular = max_on <= tol * scale and min_off >= -tol * scale and not zeros
    return VariationalReport(max_on, min_off, bool(regular), arg)


def _fit_order(V, mu, x0, dist):
    s = dist * np.geomspace(0.02, 0.2, 9)
    phi = 0.5 * (effective_potential(V, mu, x0 + s) + effective_potential(V, mu, x0 - s))
    if np.any(phi <= 0):
        raise NumericalError("effective potential not positive around the candidate point",
                             stage="irregular-fit")
    p = np.polyfit(np.log(s), np.log(phi), 1)[0]
    return p, s, phi


def detect_irregular_point(V, mu, search, fit_tol=None):
    """Locate an off-band zero of phi in ``search`` and fit its order.

    Returns
    -------
    IrregularPoint or None
    """
    lo, hi = float(search[0]), float(search[1])
    if any(a < hi and b > lo for a, b in mu.intervals):
        raise ValidationError("search interval overlaps the support")
    fit_tol = 1e-8 * V.scale() if fit_tol is None else fit_tol
    xs = np.linspace(lo, hi, 2001)
    phi = effective_potential(V, mu, xs)
    j = int(np.argmin(phi))
    if phi[j] > 10 * fit_tol and j not in (0, xs.size - 1):
        return None
    j = min(max(j, 1), xs.size - 2)
    x0 = _refine_min(V, mu, xs[j - 1], xs[j + 1])
    if effective_potential(V, mu, x0) > fit_tol:
        return None
    dist = min(min(abs(x0 - e) for e in mu.endpoints), x0 - lo, hi - x0)
    p, s, phi = _fit_order(V, mu, x0, dist)
    nu = int(np.floor((p - 2.0) / 2.0 + 0.5))
    nu = max(nu, 0)
    if abs(p - (2 * nu + 2)) > 0.1:
        lo_nu = max(int(np.floor((p - 2.0) / 2.0)), 0)
        raise NumericalError(f"ambiguous vanishing order {p:.3f}: nu = {lo_nu} or {lo_nu + 1}",
                             stage="irregular-fit")
    c = phi / s ** (2 * nu + 2)
    # c(s) = C0 + c2 s^2 for the symmetrized stencil; extrapolate to s = 0
    c0 = float(np.polyval(np.polyfit(s ** 2, c, 1), 0.0))
    return IrregularPoint(float(x0), nu, c0)


# ------------------------------------------------------ irregular fixtures

def _gl_edge(f, a, b, n=200):
    """int_a^b f, with f ~ sqrt(x - a) near a (substitution x = a + v**2)."""
    v, w = np.polynomial.legendre.leggauss(n)
    L = np.sqrt(b - a)
    v = 0.5 * L * (v + 1)
    w = 0.5 * L * w
    x = a + v * v
    return float(np.sum(w * 2 * v * f(x)))


def construct_irregular_potential(nu, x0, family_degree, support=(-1.0, 1.0), T=1.0, mass=1.0):
    """Potential with a one-band measure on ``support`` whose phi vanishes to order 2 nu + 2 at x0.

    The derivative of phi is prescribed as

        phi'(x) = h (x - x0)**(2 nu + 1) (x - c) (1 + x**2)**p sqrt((x - a)(x - b))

    with p = (family_degree - 2 nu - 4)/2. The zero c in (b, x0) makes phi(x0) = 0,
    h fixes the mass and V' is the polynomial part at infinity. Everything is
    closed form, so no iteration (and no initial guess) is involved.

    Returns
    -------
    (PolynomialPotential, EquilibriumMeasure, IrregularPoint)
    """
    if nu < 0 or int(nu) != nu:
        raise ValidationError("nu must be a non-negative integer")
    d = int(family_degree)
    if d % 2 or d < 2 * nu + 4:
        raise ValidationError(f"family_degree must be even and >= 2 nu + 4 = {2 * nu + 4}, got {d}")
    a, b = float(support[0]), float(support[1])
    x0 = float(x0)
    if not x0 > b:
        raise ValidationError("x0 must lie to the right of the support")
    p = (d - 2 * nu - 4) // 2
    H = Pn.polypow([1.0, 0.0, 1.0], p) if p else np.array([1.0])
    base = Pn.polymul(Pn.polypow([-x0, 1.0], 2 * nu + 1), H)
    sq = lambda x: np.sqrt((x - a) * (x - b))
    wfun = lambda x: Pn.polyval(x, base) * sq(x)
    I0 = _gl_edge(wfun, b, x0)
    I1 = _gl_edge(lambda x: x * wfun(x), b, x0)
    c = I1 / I0
    if not b < c < x0:
        raise ConvergenceError("outpost absorbed into the band", stage="fixture")
    Fpoly = Pn.polymul(base, [-c, 1.0])
    # F sqrt(q) at infinity: z^(deg F + 1) * S+(u)
    degF = Fpoly.size - 1
    S = hyp.sqrt_at_infinity([a, b], degF + 4)
    # coefficient of z^(degF + 1 - l) in F sqrt(q)
    top = degF + 1
    coef = {}
    for i, Fi in enumerate(Fpoly):
        for l, sl in enumerate(S):
            e = i + 1 - l
            coef[e] = coef.get(e, 0.0) + Fi * sl
    h = -2 * T * mass / coef[-1]
    Vp = np.array([h * coef.get(e, 0.0) for e in range(top + 1)])
    Vc = Pn.polyint(Vp)
    V = PolynomialPotential(tuple(Vc), T)
    F = hyp.RationalFunction(h * Fpoly)
    mu = measure_from_ansatz([a, b], F, V, mass)
    Hx0 = Pn.polyval(x0, H)
    C0 = h * (x0 - c) * Hx0 * sq(x0) / (2 * nu + 2)
    mu.info["outpost_zero"] = c
    return V, mu, IrregularPoint(x0, int(nu), float(C0))
