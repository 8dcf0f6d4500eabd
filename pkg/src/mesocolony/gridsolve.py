"""Grid backend: equilibrium measure as a convex quadratic program.

The measure is piecewise constant on cells; the logarithmic energy is
assembled exactly cell-by-cell (closed form for neighbours, a sixth-order
multipole expansion for well separated pairs). The QP

    minimize  -T rho' G rho + b' rho   s.t.  rho >= 0,  sum(dx rho) = m

is solved by a primal active-set iteration on the KKT system. A coarse
uniform pass finds the bands; later passes grid only a candidate region
around each band, with cells clustered at the current edge estimates, and
re-estimate each edge from a fit of rho**2 (linear at a soft edge).
"""

from dataclasses import dataclass
import numpy as np

from .errors import ConvergenceError

_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)


def _edge_fit(mid, rho, i_edge, inward, npts=6):
    """Root of a quadratic fit of rho**2 over cells next to the edge cell."""
    idx = [i_edge + inward * k for k in range(1, npts + 1)]
    idx = [i for i in idx if 0 <= i < rho.size and rho[i] > 0]
    if len(idx) < 3:
        return None
    x = mid[idx]
    y = rho[idx] ** 2
    c = np.polyfit(x - mid[i_edge], y, 2)
    roots = np.roots(c)
    roots = roots[np.isreal(roots)].real + mid[i_edge]
    if roots.size == 0:
        return None
    return float(roots[np.argmin(np.abs(roots - mid[i_edge]))])


@dataclass
class GridSolution:
    edges: np.ndarray
    rho: np.ndarray
    phi: np.ndarray
    robin: float
    bands: list

    @property
    def mid(self):
        return self.edges.mean(axis=1)

    @property
    def widths(self):
        return self.edges[:, 1] - self.edges[:, 0]


def _log_energy_matrix_cells(lo, hi):
    A = hi - lo
    mid = 0.5 * (lo + hi)
    D = mid[:, None] - mid[None, :]
    Ai, Bj = A[:, None], A[None, :]
    near = np.abs(D) <= 4.0 * (Ai + Bj)
    with np.errstate(divide="ignore", invalid="ignore"):
        a2, b2 = Ai * Ai, Bj * Bj
        t2 = (a2 + b2) / 12.0
        t4 = a2 * a2 / 80.0 + a2 * b2 / 24.0 + b2 * b2 / 80.0
        t6 = a2 ** 3 / 448.0 + a2 * a2 * b2 / 64.0 + a2 * b2 * b2 / 64.0 + b2 ** 3 / 448.0
        D2 = D * D
        G = Ai * Bj * (0.5 * np.log(D2) - t2 / (2 * D2) - t4 / (4 * D2 * D2) - t6 / (6 * D2 ** 3))
    ii, jj = np.nonzero(near)
    a, b, c, d = lo[ii], hi[ii], lo[jj], hi[jj]
    G[ii, jj] = _Phi(b - c) - _Phi(a - c) - _Phi(b - d) + _Phi(a - d)
    return G


def _Phi(u):
    au = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 0.5 * u * u * np.log(au) - 0.75 * u * u
    return np.where(au > 0, val, 0.0)


def _cell_integrals_cells(field, lo, hi):
    h = 0.5 * (hi - lo)
    x = 0.5 * (lo + hi)[:, None] + h[:, None] * _GL_X[None, :]
    return np.sum(field(x) * _GL_W[None, :], axis=1) * h


def _active_set(G, b, dx, T, mass, start=None, max_iter=300, tol=1e-12):
    n = dx.size
    H = -2.0 * T * G
    active = np.ones(n, dtype=bool) if start is None else start.copy()
    scale = np.max(np.abs(b / dx)) + 1.0
    for it in range(max_iter):
        S = np.nonzero(active)[0]
        k = S.size
        K = np.empty((k + 1, k + 1))
        K[:k, :k] = H[np.ix_(S, S)]
        K[:k, k] = -dx[S]
        K[k, :k] = dx[S]
        K[k, k] = 0.0
        rhs = np.concatenate([-b[S], [mass]])
        sol = np.linalg.solve(K, rhs)
        lam = sol[k]
        r = sol[:k]
        if np.any(r < 0):
            neg = np.nonzero(r < 0)[0]
            order = neg[np.argsort(r[neg])]
            active[S[order[: neg.size // 2 + 1]]] = False
            continue
        rho = np.zeros(n)
        rho[S] = r
        phi = (H @ rho + b) / dx - lam
        viol = (~active) & (phi < -tol * scale)
        if not np.any(viol):
            return rho, phi, -lam
        cand = np.nonzero(viol)[0]
        cand = cand[np.argsort(phi[cand])]
        active[cand[: cand.size // 2 + 1]] = True
    raise ConvergenceError("active-set iteration did not settle", stage="grid")


def _region_cells(lo, hi, n, excluded, cluster=False):
    e = np.linspace(lo, hi, n + 1)
    if excluded is not None:
        ja, jb = excluded
        keep = (e[1:] <= ja) | (e[:-1] >= jb)
        return e[:-1][keep], e[1:][keep]
    return e[:-1], e[1:]


def _initial_radius(field, T, excluded=None):
    xs = np.linspace(-50, 50, 20001)
    if excluded is not None:
        xs = xs[(xs < excluded[0]) | (xs > excluded[1])]
    v = field(xs)
    vmin = np.min(v)
    # support sits where V - min V is at most a few T(1 + log scale)
    ok = np.nonzero(v - vmin <= 6.0 * T * (1.0 + np.log1p(np.abs(xs))))[0]
    R = max(abs(xs[ok[0]]), abs(xs[ok[-1]])) if ok.size else 2.0
    return max(1.0, 1.25 * R)


def _band_cells(a, b, n, delta, excluded):
    """Cells on [a - delta, b + delta], clustered at the estimated edges a, b.

    The interior is Chebyshev-graded; the outer layers have geometrically
    growing cells starting from the width of the first interior cell.
    """
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    e = c - h * np.cos(np.pi * np.arange(n + 1) / n)
    w1 = e[1] - e[0]
    layer = [0.0]
    w = w1
    while layer[-1] < delta:
        layer.append(layer[-1] + w)
        w *= 1.25
    layer = np.array(layer[1:])
    e = np.concatenate([a - layer[::-1], e, b + layer])
    lo, hi = e[:-1], e[1:]
    if excluded is not None:
        ja, jb = excluded
        keep = (hi <= ja) | (lo >= jb)
        lo, hi = lo[keep], hi[keep]
    return lo, hi


def _active_start(lo, hi, bands):
    mid = 0.5 * (lo + hi)
    act = np.zeros(mid.size, dtype=bool)
    for a, b in bands:
        act |= (mid > a) & (mid < b)
    return act


def coarse_bands(field, T, mass, excluded=None, cells=300, bounds=None):
    """Band estimates and cell width from one uniform grid pass."""
    if bounds is None:
        R = _initial_radius(field, T, excluded)
        bounds = (-R, R)
    lo_b, hi_b = bounds
    for _ in range(8):
        lo, hi = _region_cells(lo_b, hi_b, cells, excluded)
        _, _, mid, rho, phi, robin = _solve_from_cells(lo, hi, field, T, mass)
        if rho[0] > 0 or rho[-1] > 0:
            w = hi_b - lo_b
            lo_b, hi_b = lo_b - 0.5 * w, hi_b + 0.5 * w
            continue
        comps = _components_cells(lo, hi, rho > 0)
        return [(lo[s], hi[e]) for s, e in comps], hi[0] - lo[0]
    raise ConvergenceError("support keeps touching the grid boundary", stage="grid")


def solve_grid(field, T, mass, excluded=None, n_cells=1000, passes=6, coarse=400, bounds=None):
    """Multi-pass grid solve; returns a :class:`GridSolution`.

    ``field`` is the vectorized total external field and ``excluded`` an
    interval removed from the admissible set.
    """
    bands, w0 = coarse_bands(field, T, mass, excluded, coarse, bounds)
    deltas = [(2.0 * w0, 2.0 * w0) for _ in bands]
    sol = None
    for p in range(passes):
        total = sum(b - a for a, b in bands)
        los, his = [], []
        for (a, b), (da, db) in zip(bands, deltas):
            n = max(60, int(round(n_cells * (b - a) / total)))
            l_, h_ = _band_cells(a, b, n, max(da, db), excluded)
            los.append(l_)
            his.append(h_)
        lo = np.concatenate(los)
        hi = np.concatenate(his)
        if np.any(lo[1:] < hi[:-1] - 1e-15):
            raise ConvergenceError("candidate regions of two bands overlap", stage="grid")
        dx = hi - lo
        G = _log_energy_matrix_cells(lo, hi)
        bvec = _cell_integrals_cells(field, lo, hi)
        rho, phi, robin = _active_set(G, bvec, dx, T, mass, start=_active_start(lo, hi, bands))
        mid = 0.5 * (lo + hi)
        comps = _components_cells(lo, hi, rho > 0)
        if len(comps) != len(bands):
            raise ConvergenceError("band count changed during grid refinement", stage="grid")
        new_bands, new_deltas, hit = [], [], False
        for (s, e), (a, b) in zip(comps, bands):
            if s == 0 or lo[s] > hi[s - 1] + 1e-15 or e == lo.size - 1 or hi[e] + 1e-15 < lo[e + 1]:
                hit = True
            a_new = _edge_fit(mid, rho, s, +1)
            b_new = _edge_fit(mid, rho, e, -1)
            a_new = lo[s] if a_new is None else min(max(a_new, lo[s] - dx[s]), hi[s])
            b_new = hi[e] if b_new is None else max(min(b_new, hi[e] + dx[e]), lo[e])
            new_bands.append((a_new, b_new))
            new_deltas.append((max(4.0 * abs(a_new - a), 4.0 * dx[s]),
                               max(4.0 * abs(b_new - b), 4.0 * dx[e])))
        if hit:
            deltas = [(4.0 * da, 4.0 * db) for da, db in deltas]
            continue
        moved = max(max(abs(na - a), abs(nb - b)) for (na, nb), (a, b) in zip(new_bands, bands))
        bands, deltas = new_bands, new_deltas
        sol = GridSolution(np.column_stack([lo, hi]), rho, phi, robin, list(bands))
        if moved < 1e-8 * total:
            break
    if sol is None:
        raise ConvergenceError("grid refinement never produced an interior support", stage="grid")
    return sol


def _solve_from_cells(lo, hi, field, T, mass):
    dx = hi - lo
    mid = 0.5 * (lo + hi)
    G = _log_energy_matrix_cells(lo, hi)
    b = _cell_integrals_cells(field, lo, hi)
    rho, phi, robin = _active_set(G, b, dx, T, mass)
    return lo, hi, mid, rho, phi, robin


def _components_cells(lo, hi, active):
    """Contiguous active runs, where contiguity also requires touching cells."""
    comps = []
    start = None
    for i in range(active.size):
        if active[i]:
            if start is None:
                start = i
            elif lo[i] > hi[i - 1] + 1e-15:
                comps.append((start, i - 1))
                start = i
        elif start is not None:
            comps.append((start, i - 1))
            start = None
    if start is not None:
        comps.append((start, active.size - 1))
    return comps
