"""Truncated power series in one variable.

A series is a 1-d float array of coefficients in ascending order; every
routine takes the truncation length ``n`` explicitly.
"""

import math

import numpy as np


def trunc(a, n):
    a = np.asarray(a, dtype=float)
    out = np.zeros(n)
    m = min(n, a.size)
    out[:m] = a[:m]
    return out


def mul(a, b, n):
    """Product of two series, truncated to ``n`` terms."""
    return trunc(np.convolve(trunc(a, n), trunc(b, n)), n)


def power(a, p, n):
    """``a**p`` for a series with a[0] > 0 (J.C.P. Miller recurrence)."""
    a = trunc(a, n)
    if a[0] <= 0:
        raise ValueError("power series needs a positive constant term")
    b = np.zeros(n)
    b[0] = a[0] ** p
    for m in range(1, n):
        k = np.arange(1, m + 1)
        b[m] = np.dot(((p + 1) * k - m) * a[1:m + 1], b[m - k]) / (m * a[0])
    return b


def log1p_series(c, n):
    """log(1 + c(s)) for a series with c[0] == 0."""
    c = trunc(c, n)
    if abs(c[0]) > 0:
        raise ValueError("log1p_series needs a vanishing constant term")
    # d/ds log(1+c) = c' / (1+c)
    dc = np.arange(1, n) * c[1:]
    inv = power(c + np.eye(1, n)[0], -1.0, n)
    q = mul(dc, inv, n - 1)
    out = np.zeros(n)
    out[1:] = q / np.arange(1, n)
    return out


def shift_poly(coeffs, x0):
    """Coefficients of p(x0 + s) in powers of s."""
    coeffs = np.asarray(coeffs, dtype=float)
    d = coeffs.size
    out = np.zeros(d)
    for k in range(d):
        j = np.arange(k, d)
        binom = np.array([math.comb(int(jj), k) for jj in j], dtype=float)
        out[k] = np.sum(coeffs[j] * binom * x0 ** (j - k))
    return out


def sqrt_product(roots, x0, n, branch_sign=1.0):
    """Series of ``sqrt(prod (x0 + s - r))`` about s = 0.

    Each factor is expanded as sqrt|x0 - r| (1 + s/(x0 - r))**(1/2); the
    overall sign is supplied by the caller (it depends on the branch of
    the square root at x0).
    """
    out = np.zeros(n)
    out[0] = 1.0
    scale = 1.0
    for r in roots:
        d = x0 - r
        scale *= math.sqrt(abs(d))
        out = mul(out, power([1.0, 1.0 / d], 0.5, n), n)
    return branch_sign * scale * out


def evaluate(a, s):
    """Horner evaluation of a series at (possibly complex) ``s``."""
    s = np.asarray(s)
    out = np.zeros_like(s, dtype=np.result_type(s, float))
    for c in a[::-1]:
        out = out * s + c
    return out


def integrate(a):
    """Antiderivative vanishing at 0 (one extra coefficient)."""
    a = np.asarray(a, dtype=float)
    out = np.zeros(a.size + 1)
    out[1:] = a / np.arange(1, a.size + 1)
    return out


def derivative(a):
    a = np.asarray(a, dtype=float)
    if a.size <= 1:
        return np.zeros(1)
    return a[1:] * np.arange(1, a.size)
