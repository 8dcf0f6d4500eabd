"""Hot numeric inner loops.

Every kernel exists twice: a numba ``@njit`` loop and a pure-numpy
implementation. The public wrappers dispatch on
``mesocolony._config.USE_NUMBA`` (environment flag
``MESOCOLONY_DISABLE_NUMBA``). Both paths implement the same arithmetic so
results agree to rounding; ``benchmarks/bench_kernels.py`` times them.
"""

import math

import numpy as np

from . import _config

_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitting constant
_BIG = 1e150
_LOG_BIG = math.log(_BIG)


# ---------------------------------------------------------------------------
# compensated dot product (Ogita, Rump & Oishi "Dot2")
# ---------------------------------------------------------------------------

def _dot2_numpy(x, y):
    p = x * y
    c = _SPLIT * x
    xh = c - (c - x)
    xl = x - xh
    c = _SPLIT * y
    yh = c - (c - y)
    yl = y - yh
    err = xl * yl - (((p - xh * yh) - xl * yh) - xh * yl)
    return math.fsum(p) + float(np.sum(err))


def _poly_horner_numpy(coeffs, x):
    out = np.zeros_like(x)
    for c in coeffs[::-1]:
        out = out * x + c
    return out


def _metropolis_numpy(X, coeffs, beta, step, normals, uniforms, record):
    chains, n = X.shape
    nsweep = normals.shape[0]
    accepted = np.zeros(chains, dtype=np.int64)
    out = np.empty((nsweep if record else 0, chains, n))
    for s in range(nsweep):
        for i in range(n):
            xi = X[:, i]
            prop = xi + step * normals[s, :, i]
            dlog = -beta * (_poly_horner_numpy(coeffs, prop) - _poly_horner_numpy(coeffs, xi))
            for j in range(n):
                if j != i:
                    xj = X[:, j]
                    dlog += 2.0 * (np.log(np.abs(prop - xj)) - np.log(np.abs(xi - xj)))
            ok = np.log(uniforms[s, :, i]) < dlog
            X[ok, i] = prop[ok]
            accepted += ok
        if record:
            out[s] = X
    return accepted, out


def _opeval_numpy(x, a, sqb, n, want_sum):
    x = np.asarray(x, dtype=float)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    dp_prev = np.zeros_like(x)
    dp = np.zeros_like(x)
    logscale = np.zeros_like(x)
    sumsq = p * p if want_sum else np.zeros_like(x)
    for j in range(n - 1):
        t = x - a[j]
        p_next = (t * p - sqb[j] * p_prev) / sqb[j + 1]
        dp_next = (p + t * dp - sqb[j] * dp_prev) / sqb[j + 1]
        p_prev, p, dp_prev, dp = p, p_next, dp, dp_next
        if want_sum:
            sumsq = sumsq + p * p
        big = np.abs(p) > _BIG
        if np.any(big):
            f = np.where(big, 1.0 / _BIG, 1.0)
            p = p * f
            p_prev = p_prev * f
            dp = dp * f
            dp_prev = dp_prev * f
            sumsq = sumsq * f * f
            logscale = logscale + np.where(big, _LOG_BIG, 0.0)
    t = x - a[n - 1]
    q = t * p - sqb[n - 1] * p_prev
    dq = p + t * dp - sqb[n - 1] * dp_prev
    return p, q, dp, dq, logscale, sumsq


if _config.USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _dot2_numba(x, y):
        a = x[0]
        b = y[0]
        p = a * b
        c = _SPLIT * a
        ah = c - (c - a)
        al = a - ah
        c = _SPLIT * b
        bh = c - (c - b)
        bl = b - bh
        s = al * bl - (((p - ah * bh) - al * bh) - ah * bl)
        for i in range(1, x.shape[0]):
            a = x[i]
            b = y[i]
            h = a * b
            c = _SPLIT * a
            ah = c - (c - a)
            al = a - ah
            c = _SPLIT * b
            bh = c - (c - b)
            bl = b - bh
            r = al * bl - (((h - ah * bh) - al * bh) - ah * bl)
            t = p + h
            z = t - p
            q = (p - (t - z)) + (h - z)
            p = t
            s += q + r
        return p + s

    @njit(cache=True)
    def _horner_scalar(coeffs, x):
        out = 0.0
        for k in range(coeffs.shape[0] - 1, -1, -1):
            out = out * x + coeffs[k]
        return out

    @njit(cache=True)
    def _metropolis_numba(X, coeffs, beta, step, normals, uniforms, record):
        chains, n = X.shape
        nsweep = normals.shape[0]
        accepted = np.zeros(chains, dtype=np.int64)
        out = np.empty((nsweep if record else 0, chains, n))
        for s in range(nsweep):
            for c in range(chains):
                for i in range(n):
                    xi = X[c, i]
                    prop = xi + step[c] * normals[s, c, i]
                    dlog = -beta * (_horner_scalar(coeffs, prop) - _horner_scalar(coeffs, xi))
                    for j in range(n):
                        if j != i:
                            xj = X[c, j]
                            dlog += 2.0 * (math.log(abs(prop - xj)) - math.log(abs(xi - xj)))
                    if math.log(uniforms[s, c, i]) < dlog:
                        X[c, i] = prop
                        accepted[c] += 1
            if record:
                for c in range(chains):
                    for i in range(n):
                        out[s, c, i] = X[c, i]
        return accepted, out

    @njit(cache=True)
    def _opeval_numba(x, a, sqb, n, want_sum):
        m = x.shape[0]
        P = np.empty(m)
        Q = np.empty(m)
        DP = np.empty(m)
        DQ = np.empty(m)
        LS = np.zeros(m)
        SS = np.zeros(m)
        for i in range(m):
            xi = x[i]
            p_prev = 0.0
            p = 1.0
            dp_prev = 0.0
            dp = 0.0
            ls = 0.0
            ss = 1.0 if want_sum else 0.0
            for j in range(n - 1):
                t = xi - a[j]
                p_next = (t * p - sqb[j] * p_prev) / sqb[j + 1]
                dp_next = (p + t * dp - sqb[j] * dp_prev) / sqb[j + 1]
                p_prev = p
                p = p_next
                dp_prev = dp
                dp = dp_next
                if want_sum:
                    ss += p * p
                if abs(p) > _BIG:
                    f = 1.0 / _BIG
                    p *= f
                    p_prev *= f
                    dp *= f
                    dp_prev *= f
                    ss *= f * f
                    ls += _LOG_BIG
            t = xi - a[n - 1]
            P[i] = p
            Q[i] = t * p - sqb[n - 1] * p_prev
            DP[i] = dp
            DQ[i] = p + t * dp - sqb[n - 1] * dp_prev
            LS[i] = ls
            SS[i] = ss
        return P, Q, DP, DQ, LS, SS


def dot2(x, y, use_numba=None):
    """Dot product evaluated as if in twice the working precision."""
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    if x.size == 0:
        return 0.0
    if _use(use_numba):
        return float(_dot2_numba(x, y))
    return _dot2_numpy(x, y)


def metropolis_sweeps(X, coeffs, beta, step, normals, uniforms, record=True, use_numba=None):
    """Run single-coordinate Metropolis sweeps in place on ``X``.

    ``X`` has shape (chains, n); ``normals`` and ``uniforms`` have shape
    (sweeps, chains, n) and fully determine the trajectory. Returns the
    per-chain acceptance counts and, if ``record``, the state after each
    sweep with shape (sweeps, chains, n).
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    step = np.ascontiguousarray(step, dtype=float)
    if _use(use_numba):
        return _metropolis_numba(X, coeffs, float(beta), step, normals, uniforms, record)
    return _metropolis_numpy(X, coeffs, float(beta), step, normals, uniforms, record)


def orthonormal_eval(x, a, sqb, n, want_sum=False, use_numba=None):
    """Orthonormal polynomial data at the points ``x``.

    With p_0 = 1 and sqb[j] = sqrt(b_j) this returns scaled values of
    p_{n-1}, q_n = sqrt(b_n) p_n, their derivatives, the log of the common
    scale factor that was divided out, and (optionally) the scaled sum of
    p_j**2 for j < n.
    """
    x = np.ascontiguousarray(np.atleast_1d(x), dtype=float)
    a = np.ascontiguousarray(a, dtype=float)
    sqb = np.ascontiguousarray(sqb, dtype=float)
    if _use(use_numba):
        return _opeval_numba(x, a, sqb, int(n), bool(want_sum))
    return _opeval_numpy(x, a, sqb, int(n), bool(want_sum))


def _use(flag):
    if flag is None:
        return _config.USE_NUMBA
    return bool(flag) and _config.USE_NUMBA
