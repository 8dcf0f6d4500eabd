"""Metropolis sampler for the n-point log-gas, used as an oracle for the kernel density.

The target is exp(-(N/T) sum V(x_i) + 2 sum_{j<k} log|x_j - x_k|). Every
chain draws from its own Philox stream (key = seed, counter offset by the
chain index in the upper 64 bits), so runs are reproducible bit for bit.
"""

from dataclasses import dataclass
import logging

import numpy as np

from . import kernels
from .errors import ConvergenceError, ValidationError

log = logging.getLogger(__name__)

BLOCK = 2000
ADAPT_EVERY = 200
TARGET = (0.25, 0.4)


@dataclass
class SampleSet:
    """Pooled post-burn-in states, shape (records, n), plus diagnostics."""

    samples: np.ndarray
    acceptance: np.ndarray
    step: np.ndarray
    ess: float
    seed: int

    @property
    def marginal(self):
        return self.samples.ravel()

    def to_dict(self):
        return {"n_samples": int(self.samples.size), "acceptance": self.acceptance.tolist(),
                "step": self.step.tolist(), "ess": self.ess, "seed": self.seed}


def chain_rng(seed, chain):
    """Philox generator for one chain."""
    return np.random.Generator(np.random.Philox(key=int(seed) + (int(chain) << 64)))


def _draws(rngs, sweeps, n):
    normals = np.stack([r.standard_normal((sweeps, n)) for r in rngs], axis=1)
    uniforms = np.stack([r.random((sweeps, n)) for r in rngs], axis=1)
    return normals, 1.0 - uniforms  # uniforms in (0, 1]


def _generic_sweeps(X, W, beta, step, normals, uniforms):
    """Vectorized-over-chains Metropolis for an arbitrary potential callable."""
    chains, n = X.shape
    nsweep = normals.shape[0]
    accepted = np.zeros(chains, dtype=np.int64)
    out = np.empty((nsweep, chains, n))
    for s in range(nsweep):
        for i in range(n):
            xi = X[:, i]
            prop = xi + step * normals[s, :, i]
            dlog = -beta * (W(prop) - W(xi))
            for j in range(n):
                if j != i:
                    dlog += 2.0 * (np.log(np.abs(prop - X[:, j])) - np.log(np.abs(xi - X[:, j])))
            ok = np.log(uniforms[s, :, i]) < dlog
            X[ok, i] = prop[ok]
            accepted += ok
        out[s] = X
    return accepted, out


def _run(X, W, beta, step, normals, uniforms, record):
    coeffs = getattr(W, "coeffs", None)
    if coeffs is not None:
        return kernels.metropolis_sweeps(X, np.asarray(coeffs), beta, step, normals, uniforms, record)
    acc, out = _generic_sweeps(X, W, beta, step, normals, uniforms)
    return acc, (out if record else np.empty((0,) + X.shape))


def _ess(trace):
    """Effective sample size of a (records, chains) trace by batch means."""
    m, c = trace.shape
    nb = max(10, int(np.sqrt(m)))
    size = m // nb
    if size < 2:
        return float(m * c)
    tr = trace[: nb * size].reshape(nb, size, c)
    means = tr.mean(axis=1)
    var = trace.var(ddof=1)
    bvar = means.var(ddof=1)
    if bvar <= 0:
        return float(m * c)
    return float(min(m * c, m * c * var / (size * bvar)))


def mcmc_sample(n, bigN, W, chains=8, steps=20000, seed=0, burn=None, T=None, init_scale=None):
    """Pooled samples of the n-point log-gas with weight exp(-(N/T) W).

    ``steps`` counts post-burn-in sweeps per chain (one sweep updates each
    coordinate once). The proposal scale is adapted during burn-in towards
    an acceptance rate in [0.25, 0.4]; burn-in states are discarded.
    """
    if int(n) != n or not 1 <= n <= 16:
        raise ValidationError("n must be an integer in 1..16")
    if steps < 10_000:
        raise ValidationError("at least 10**4 steps per chain are required")
    if chains < 1:
        raise ValidationError("need at least one chain")
    n, chains, steps = int(n), int(chains), int(steps)
    T = float(getattr(W, "temperature", 1.0)) if T is None else float(T)
    beta = bigN / T
    burn = max(2000, steps // 5) if burn is None else int(burn)
    rngs = [chain_rng(seed, c) for c in range(chains)]
    s0 = 1.0 / np.sqrt(beta) if init_scale is None else init_scale
    X = np.stack([s0 * np.sort(r.standard_normal(n)) for r in rngs])
    step = np.full(chains, 0.5 * s0 * np.sqrt(n) / n + 1e-3 * s0)

    done = 0
    while done < burn:
        m = min(ADAPT_EVERY, burn - done)
        normals, uniforms = _draws(rngs, m, n)
        acc, _ = _run(X, W, beta, step, normals, uniforms, False)
        rate = acc / (m * n)
        step = np.where(rate < TARGET[0], step * 0.8, np.where(rate > TARGET[1], step * 1.25, step))
        done += m
    rates = []
    recs = []
    done = 0
    while done < steps:
        m = min(BLOCK, steps - done)
        normals, uniforms = _draws(rngs, m, n)
        acc, out = _run(X, W, beta, step, normals, uniforms, True)
        rates.append(acc / (m * n))
        recs.append(out)
        done += m
    rate = np.mean(rates, axis=0)
    if np.any(rate < 0.05) or np.any(rate > 0.9):
        raise ConvergenceError(f"acceptance {rate} outside [0.05, 0.9] after adaptation",
                               stage="sampler")
    states = np.concatenate(recs, axis=0)  # (steps, chains, n)
    ess = _ess(np.sum(states ** 2, axis=2))
    samples = states.transpose(1, 0, 2).reshape(-1, n)
    return SampleSet(samples, rate, step, ess, int(seed))


def tv_distance(samples, density, lo, hi, bins=100):
    """Total variation between a histogram of ``samples`` and a density callable on [lo, hi]."""
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(samples, bins=edges)
    p = counts / samples.size
    # exact bin masses of the reference by 8-point Gauss-Legendre per bin
    gx, gw = np.polynomial.legendre.leggauss(8)
    c = 0.5 * (edges[1:] + edges[:-1])
    h = 0.5 * (edges[1:] - edges[:-1])
    xs = c[:, None] + h[:, None] * gx[None, :]
    q = np.sum(density(xs.ravel()).reshape(xs.shape) * gw, axis=1) * h
    p_out = np.sum((samples < lo) | (samples > hi)) / samples.size
    return 0.5 * (np.sum(np.abs(p - q)) + abs(p_out - (1.0 - q.sum())))
