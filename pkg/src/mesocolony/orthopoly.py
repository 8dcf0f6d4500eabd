"""Orthogonal polynomials for weights exp(-(N/T) W(x)) on the real line.

The recurrence is computed by a discretized Stieltjes procedure in Lanczos
form: the vectors v_j = p_j sqrt(w) on a composite Gauss-Legendre rule are
built by the three-term recurrence of the orthonormal polynomials p_j, with
inner products accumulated in twice the working precision. Kernel values
are evaluated with the scaled orthonormal recurrence, so no monic value is
ever formed at large n.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .errors import QuadratureError, ValidationError

_GL_N = 20
_GLX, _GLW = np.polynomial.legendre.leggauss(_GL_N)
TAIL_DIGITS = 40 * math.log(10.0)
MAX_DOUBLINGS = 4


@dataclass
class Weight:
    """exp(-(N/T) W(x)) with W a vectorized callable carrying ``temperature``."""

    W: object
    bigN: float
    T: float = None
    features: tuple = ()

    def __post_init__(self):
        if self.T is None:
            self.T = float(getattr(self.W, "temperature", 1.0))
        if not self.bigN > 0 or not self.T > 0:
            raise ValidationError("N and T must be positive")
        if not self.features:
            self.features = tuple(getattr(self.W, "features", ()))

    @property
    def beta(self):
        return self.bigN / self.T

    def log_weight(self, x):
        return -self.beta * np.asarray(self.W(x), dtype=float)

    def to_dict(self):
        return {"N": self.bigN, "T": self.T, "features": [list(f) for f in self.features]}


@dataclass
class RecurrenceTable:
    """x p_j = sqrt(b_{j+1}) p_{j+1} + a_j p_j + sqrt(b_j) p_{j-1}.

    ``a[j]`` for j < n_max, ``b[j]`` for 1 <= j <= n_max (``b[0]`` unused,
    stored as 0). Norms of the monic polynomials are h_j = h_0 b_1 ... b_j,
    kept as logarithms together with the log of the weight shift.
    """

    a: np.ndarray
    b: np.ndarray
    log_h0: float
    weight: Weight
    cutoff: tuple
    shift: float
    nodes: int
    info: dict = field(default_factory=dict)

    @property
    def n_max(self):
        return self.a.size

    @property
    def log_h(self):
        return self.log_h0 + np.concatenate([[0.0], np.cumsum(np.log(self.b[1:self.n_max]))])

    @property
    def h(self):
        return np.exp(self.log_h)

    def to_dict(self):
        return {"n_max": self.n_max, "a": self.a.tolist(), "b": self.b.tolist(),
                "log_h": self.log_h.tolist(), "cutoff": list(self.cutoff),
                "nodes": self.nodes, "weight": self.weight.to_dict()}


def _panels(lo, hi, m, features):
    br = [np.linspace(lo, hi, m + 1)]
    for fa, fb in features:
        fa, fb = max(fa, lo), min(fb, hi)
        if fb > fa:
            br.append(np.linspace(fa, fb, max(8, m // 4) + 1))
    br = np.unique(np.concatenate(br))
    return br


def _rule(lo, hi, m, features):
    br = _panels(lo, hi, m, features)
    c = 0.5 * (br[1:] + br[:-1])
    h = 0.5 * (br[1:] - br[:-1])
    x = (c[:, None] + h[:, None] * _GLX[None, :]).ravel()
    w = (h[:, None] * _GLW[None, :]).ravel()
    return x, w


def _tail_level(wt, n):
    """Minimum of W and a window outside which the degree-n integrand is below the tail level.

    |pi_n|**2 is bounded by (1 + |x - x_min|)**(2n) up to a constant, which
    is all that is needed for a starting window; the final cutoff is
    checked against the computed functions.
    """
    xs = np.linspace(-60, 60, 24001)
    v = np.asarray(wt.W(xs), dtype=float)
    i = int(np.argmin(v))
    vmin, xmin = float(v[i]), xs[i]
    excess = wt.beta * (v - vmin) - 2 * n * np.log1p(np.abs(xs - xmin))
    ok = np.nonzero(excess <= TAIL_DIGITS)[0]
    lo, hi = xs[ok[0]], xs[ok[-1]]
    return vmin, float(lo) - 1e-3, float(hi) + 1e-3


_RESCALE = 1e100
_LOG_RESCALE = math.log(_RESCALE)


def _stieltjes(x, lw, n, use_numba=None):
    """Lanczos-form Stieltjes on nodes ``x`` with log weights ``lw``.

    Each vector is stored as a mantissa times a per-node scale exp(s_i), so
    nodes where sqrt(w) underflows still carry the growing polynomial.
    """
    lh0 = float(np.max(lw)) + math.log(math.fsum(np.exp(lw - np.max(lw))))
    sc = 0.5 * (lw - lh0)
    u = np.ones_like(x)
    up = np.zeros_like(x)
    a = np.zeros(n)
    b = np.zeros(n + 1)
    v = np.exp(sc)
    vp = np.zeros_like(x)
    for j in range(n):
        xv = x * v
        a[j] = kernels.dot2(xv, v, use_numba)
        ru = (x - a[j]) * u - math.sqrt(b[j]) * up
        r = ru * np.exp(sc)
        # one local re-orthogonalization against the last two vectors
        c1 = kernels.dot2(r, v, use_numba)
        c0 = kernels.dot2(r, vp, use_numba) if j else 0.0
        ru = ru - c1 * u - c0 * up
        a[j] += c1
        r = ru * np.exp(sc)
        bj = kernels.dot2(r, r, use_numba)
        if not bj > 0:
            raise QuadratureError(f"non-positive recurrence weight at step {j + 1}", stage="orthopoly")
        b[j + 1] = bj
        up, u = u, ru / math.sqrt(bj)
        big = np.abs(u) > _RESCALE
        if np.any(big):
            u[big] /= _RESCALE
            up[big] /= _RESCALE
            sc[big] += _LOG_RESCALE
        vp, v = v, u * np.exp(sc)
        vp = up * np.exp(sc)
    return a, b, lh0, vp, v


def recurrence_table(W, bigN, n_max, T=None, panels=None, rtol=1e-10, use_numba=None):
    """a_j, b_j and h_j for the weight exp(-(N/T) W(x)), j < n_max.

    The cutoff starts where (N/T)(W - min W) reaches 40 ln 10 and is widened
    until the last orthonormal function is negligible at both ends. The node
    count is doubled until two successive tables agree to ``rtol``.
    """
    if int(n_max) != n_max or n_max < 1:
        raise ValidationError("n_max must be a positive integer")
    n_max = int(n_max)
    wt = W if isinstance(W, Weight) else Weight(W, bigN, T)
    vmin, lo, hi = _tail_level(wt, n_max)
    m = max(64, n_max) if panels is None else int(panels)
    prev = None
    for attempt in range(MAX_DOUBLINGS + 1):
        try:
            cur = _attempt(wt, vmin, lo, hi, m, n_max, use_numba)
        except QuadratureError:
            if attempt == MAX_DOUBLINGS:
                raise
            prev, m = None, 2 * m
            continue
        a, b, lh0, lo, hi, nodes = cur
        if prev is not None:
            pa, pb = prev[0], prev[1]
            scale = max(1.0, float(np.max(np.abs(a))), float(np.sqrt(np.max(b))))
            diff = max(float(np.max(np.abs(a - pa))), float(np.max(np.abs(np.sqrt(b) - np.sqrt(pb)))))
            if diff < rtol * scale:
                tab = RecurrenceTable(a, b, lh0 - wt.beta * vmin, wt, (lo, hi), vmin, nodes)
                tab.info["node_check"] = diff
                return tab
        prev, m = cur, 2 * m
    raise QuadratureError("recurrence did not settle under node doubling", stage="orthopoly")


def _log_diag(x, lw, a, b, n, lh0):
    """log K_n(x, x) from the recurrence, with lw the log weight (shifted like the table)."""
    p, q, dp, dq, ls, _ = kernels.orthonormal_eval(x, a, np.sqrt(b[:n]), n)
    with np.errstate(divide="ignore", invalid="ignore"):
        return lw - lh0 + 2 * ls + np.log(np.maximum(dq * p - dp * q, 0.0))


def _attempt(wt, vmin, lo, hi, m, n_max, use_numba):
    scan = np.linspace(-60, 60, 24001)
    lw_scan = -wt.beta * (np.asarray(wt.W(scan), dtype=float) - vmin)
    for _ in range(30):
        x, w = _rule(lo, hi, m, wt.features)
        lw = np.log(w) - wt.beta * (np.asarray(wt.W(x), dtype=float) - vmin)
        a, b, lh0, _, _ = _stieltjes(x, lw, n_max, use_numba)
        # the diagonal kernel must be negligible outside the window: a
        # missed well (or a short tail) shows up as a large value there
        ld = _log_diag(scan, lw_scan, a, b, n_max, lh0)
        live = scan[ld > np.max(ld) + math.log(1e-18)]
        width = hi - lo
        new_lo = min(lo, live[0] - 0.05 * width) if live[0] <= lo else lo
        new_hi = max(hi, live[-1] + 0.05 * width) if live[-1] >= hi else hi
        if new_lo == lo and new_hi == hi:
            return a, b, lh0, lo, hi, x.size
        lo, hi = new_lo, new_hi
    raise QuadratureError("cutoff could not be placed in the weight tail", stage="orthopoly")


def eval_poly(tab, n, x):
    """(pi_n, pi_{n-1}, pi_n', pi_{n-1}') of the monic polynomials at x."""
    if n < 1 or n > tab.n_max:
        raise ValidationError(f"n must lie in 1..{tab.n_max}")
    x = np.asarray(x, dtype=float)
    pm, p = np.zeros_like(x), np.ones_like(x)
    dpm, dp = np.zeros_like(x), np.zeros_like(x)
    for j in range(n):
        t = x - tab.a[j]
        bj = tab.b[j]
        pn = t * p - bj * pm
        dpn = p + t * dp - bj * dpm
        pm, p, dpm, dp = p, pn, dp, dpn
    return p, pm, dp, dpm


@dataclass
class KernelEvaluator:
    tab: RecurrenceTable
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= self.tab.n_max:
            raise ValidationError(f"n must lie in 1..{self.tab.n_max}")

    def _data(self, x, want_sum=False):
        t = self.tab
        sqb = np.sqrt(t.b[: self.n])
        return kernels.orthonormal_eval(x, t.a, sqb, self.n, want_sum)

    def _logw(self, x):
        # log w(x) / h0, with the same shift as the table
        return self.tab.weight.log_weight(x) - self.tab.log_h0

    def __call__(self, x, y):
        return cd_kernel(self, x, y)

    def diagonal(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        p, q, dp, dq, ls, _ = self._data(x)
        return np.exp(self._logw(x) + 2 * ls) * (dq * p - dp * q)

    def sum_form(self, x, y):
        """sum_{j<n} pi_j(x) pi_j(y) / h_j times the weight factor (check only)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        t = self.tab
        px, py = np.ones_like(x), np.ones_like(y)
        pxm, pym = np.zeros_like(x), np.zeros_like(y)
        s = np.ones(np.broadcast(x, y).shape)
        sq = np.sqrt(t.b)
        for j in range(self.n - 1):
            nx = ((x - t.a[j]) * px - sq[j] * pxm) / sq[j + 1]
            ny = ((y - t.a[j]) * py - sq[j] * pym) / sq[j + 1]
            pxm, px, pym, py = px, nx, py, ny
            s = s + px * py
        return np.exp(0.5 * (self._logw(x) + self._logw(y))) * s


def cd_kernel(k, x, y, confluent_tol=1e-8):
    """Christoffel-Darboux kernel with the weight factor sqrt(w(x) w(y)) included."""
    x, y = np.broadcast_arrays(np.atleast_1d(np.asarray(x, dtype=float)),
                               np.atleast_1d(np.asarray(y, dtype=float)))
    out = np.empty(x.shape)
    close = np.abs(x - y) < confluent_tol
    if np.any(close):
        xm = 0.5 * (x[close] + y[close])
        out[close] = k.diagonal(xm)
    far = ~close
    if np.any(far):
        xf, yf = x[far], y[far]
        px, qx, _, _, lx, _ = k._data(xf)
        py, qy, _, _, ly, _ = k._data(yf)
        lw = 0.5 * (k._logw(xf) + k._logw(yf)) + lx + ly
        out[far] = np.exp(lw) * (qx * py - px * qy) / (xf - yf)
    return out


@dataclass
class DensityProfile:
    x: np.ndarray
    value: np.ndarray
    n: int

    def to_rows(self):
        return np.column_stack([self.x, self.value])


def density_profile(k, grid):
    """K_n(x, x) / n on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if not np.all(np.isfinite(grid)):
        raise ValidationError("grid must be finite")
    return DensityProfile(grid, k.diagonal(grid) / k.n, k.n)


def orthogonality_residual(tab, n=None, panels_factor=2):
    """Max |<p_i, p_j>| - delta_ij on a rule twice as fine as the table's."""
    n = tab.n_max if n is None else n
    wt = tab.weight
    lo, hi = tab.cutoff
    x, w = _rule(lo, hi, panels_factor * max(64, tab.n_max), wt.features)
    lw = np.log(w) + wt.log_weight(x) - tab.log_h0
    # columns p_j sqrt(w) / sqrt(h0) by the stable orthonormal recurrence
    sq = np.sqrt(tab.b)
    P = np.empty((n, x.size))
    pm, p = np.zeros_like(x), np.exp(0.5 * lw)
    P[0] = p
    for j in range(n - 1):
        pn = ((x - tab.a[j]) * p - sq[j] * pm) / sq[j + 1]
        pm, p = p, pn
        P[j + 1] = p
    G = P @ P.T
    return float(np.max(np.abs(G - np.eye(n))))
