"""Polynomial potentials, bump functions and the effective potential."""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class PolynomialPotential:
    """V(x) = sum_j coeffs[j] x**j with weight exp(-(N/T) V)."""

    coeffs: tuple
    temperature: float = 1.0

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        while len(c) > 1 and c[-1] == 0.0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "temperature", float(self.temperature))
        d = len(c) - 1
        if d < 2 or d % 2:
            raise ValidationError(f"potential degree must be even and >= 2, got {d}")
        if c[-1] <= 0:
            raise ValidationError("leading coefficient must be positive")
        if not self.temperature > 0:
            raise ValidationError("temperature must be positive")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def T(self):
        return self.temperature

    def deriv_coeffs(self, k=1):
        return np.polynomial.polynomial.polyder(np.array(self.coeffs), k) if k else np.array(self.coeffs)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def derivative(self, x, k=1):
        return np.polynomial.polynomial.polyval(x, self.deriv_coeffs(k))

    def scale(self):
        """Typical magnitude of V on [-2, 2], used for scale-aware tolerances."""
        return float(max(1.0, np.max(np.abs(self(np.linspace(-2, 2, 41))))))

    def to_dict(self):
        return {"coeffs": list(self.coeffs), "T": self.temperature}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(tuple(d["coeffs"]), float(d.get("T", 1.0)))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad potential config: {d!r}") from exc


def eval_potential(V, x, order):
    """(V(x), V'(x), ..., V^(order)(x)) by Horner's rule."""
    if order < 0:
        raise ValidationError("order must be non-negative")
    c = np.array(V.coeffs)
    out = []
    for _ in range(order + 1):
        out.append(float(np.polynomial.polynomial.polyval(x, c)) if c.size else 0.0)
        c = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(0)
    return tuple(out)


@dataclass(frozen=True)
class BumpSpec:
    """Plateau interval ``inner`` = J inside support interval ``outer`` = J~."""

    inner: tuple
    outer: tuple

    def __post_init__(self):
        (a, b), (A, B) = self.inner, self.outer
        if not (A < a < b < B):
            raise ValidationError("bump needs outer[0] < inner[0] < inner[1] < outer[1]")
        object.__setattr__(self, "inner", (float(a), float(b)))
        object.__setattr__(self, "outer", (float(A), float(B)))

    def to_dict(self):
        return {"J": list(self.inner), "Jt": list(self.outer)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["J"]), tuple(d["Jt"]))


def _smooth_step(s):
    # exp(-1/s) / (exp(-1/s) + exp(-1/(1-s))), written to avoid overflow
    s = np.clip(s, 0.0, 1.0)
    out = np.where(s >= 1.0, 1.0, 0.0)
    mid = (s > 0.0) & (s < 1.0)
    sm = s[mid]
    with np.errstate(over="ignore"):
        out[mid] = 1.0 / (1.0 + np.exp(1.0 / sm - 1.0 / (1.0 - sm)))
    return out


def bump(x, b):
    """C-infinity cutoff: 1 on ``b.inner``, 0 outside ``b.outer``."""
    x = np.asarray(x, dtype=float)
    (a, c), (A, C) = b.inner, b.outer
    left = _smooth_step(np.atleast_1d((x - A) / (a - A)))
    right = _smooth_step(np.atleast_1d((C - x) / (C - c)))
    out = np.minimum(left, right)
    return out.reshape(x.shape) if x.ndim else float(out[0])


@dataclass(frozen=True)
class IrregularPoint:
    """Point off the support where phi ~ c0 (x - x0)**(2 nu + 2)."""

    x0: float
    nu: int
    c0: float

    def __post_init__(self):
        if self.nu < 0:
            raise ValidationError("nu must be non-negative")
        if not self.c0 > 0:
            raise ValidationError("c0 must be positive")

    def to_dict(self):
        return {"x0": self.x0, "nu": self.nu, "c0": self.c0}


def effective_potential(V, mu, x):
    """phi(x) = V(x) [+ extra field] - 2T int log|x-s| rho(s) ds + l.

    The log integral is computed from the band representation of ``mu``
    (Chebyshev-U coefficients against the square-root edge weight), so it
    is exact up to the truncation of that expansion.
    """
    x = np.asarray(x, dtype=float)
    val = V(x) - 2.0 * V.temperature * mu.log_potential(x) + mu.robin
    if mu.extra is not None:
        val = val + mu.extra(x)
    return val
