"""Configuration and orchestration of colonization runs.

A run builds an irregular fixture, the local model and the plan, computes
the recurrence for exp(-(N/T) V_hat) with n = N, and compares the
rescaled finite-n density with the local equilibrium density.

Rescaling: rho_hat(eta) = K_n(x, x) / (kappa eta'(x)), compared with
rho_mes in the eta plane. Equivalently the L1 distance is
int_J |K_n(x, x)/kappa - rho_mes(eta(x)) eta'(x)| dx, which needs no
inverse of eta.
"""

from dataclasses import dataclass, field
import logging
import time

import numpy as np
from scipy.integrate import trapezoid

from . import colonization as col, orthopoly as op
from .equilibrium import (construct_irregular_potential, detect_irregular_point,
                          solve_equilibrium)
from .errors import NumericalError, ValidationError
from .mesoscopic import meso_equilibrium
from .potential import BumpSpec, PolynomialPotential

log = logging.getLogger(__name__)

JACOBIAN = "rho_hat(eta) = K_n(x,x) / (kappa * deta/dx); integrates to about 1 over J"


def _get(d, key, kind, default=None, required=False):
    if key not in d or d[key] is None:
        if required:
            raise ValidationError(f"config needs '{key}'")
        return default
    v = d[key]
    try:
        if kind is int:
            if isinstance(v, bool) or int(v) != v:
                raise ValidationError(f"'{key}' must be an integer, got {v!r}")
            return int(v)
        return kind(v)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad value for '{key}': {v!r}") from exc


@dataclass
class FixtureSpec:
    """Either the closed-form irregular family or a user potential with an outpost search window."""

    nu: int = 0
    x0: float = 3.0
    family_degree: int = 6
    support: tuple = (-1.0, 1.0)
    T: float = 1.0
    potential: PolynomialPotential = None
    search: tuple = None

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ValidationError("'fixture' must be an object")
        if "potential" in d:
            V = PolynomialPotential.from_dict(d["potential"])
            s = d.get("search")
            if not (isinstance(s, (list, tuple)) and len(s) == 2):
                raise ValidationError("a user potential needs 'search': [lo, hi] for the outpost")
            return cls(nu=-1, T=V.temperature, potential=V, search=(float(s[0]), float(s[1])))
        sup = d.get("support", [-1.0, 1.0])
        return cls(_get(d, "nu", int, 0), _get(d, "x0", float, 3.0), _get(d, "family_degree", int, 6),
                   (float(sup[0]), float(sup[1])), _get(d, "T", float, 1.0))

    def build(self):
        if self.potential is None:
            return construct_irregular_potential(self.nu, self.x0, self.family_degree, self.support, self.T)
        V = self.potential
        mu = solve_equilibrium(V)
        irr = detect_irregular_point(V, mu, self.search)
        return V, mu, irr

    def to_dict(self):
        if self.potential is not None:
            return {"potential": self.potential.to_dict(), "search": list(self.search)}
        return {"nu": self.nu, "x0": self.x0, "family_degree": self.family_degree,
                "support": list(self.support), "T": self.T}


@dataclass
class ExperimentConfig:
    fixture: FixtureSpec
    meso_t: tuple
    runs: list
    t: float = None
    k: int = None
    grid_points: int = 6001
    bump: BumpSpec = None
    seed: int = 0
    ablate: bool = False
    out: str = None

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ValidationError("config must be an object")
        fx = FixtureSpec.from_dict(d.get("fixture", {}))
        meso = d.get("meso", {})
        t_mes = tuple(float(v) for v in meso.get("t", ()))
        kap = d.get("kappa", 8)
        N = d.get("N", 512)
        kap = list(kap) if isinstance(kap, (list, tuple)) else [kap]
        N = list(N) if isinstance(N, (list, tuple)) else [N] * len(kap)
        if len(N) != len(kap):
            raise ValidationError("'kappa' and 'N' schedules differ in length")
        runs = []
        for k_, n_ in zip(kap, N):
            if isinstance(k_, bool) or int(k_) != k_ or k_ < 0:
                raise ValidationError(f"kappa values must be non-negative integers, got {k_!r}")
            if isinstance(n_, bool) or int(n_) != n_ or n_ <= k_:
                raise ValidationError(f"N must be an integer above kappa, got {n_!r}")
            runs.append((int(k_), int(n_)))
        t = _get(d, "t", float)
        k = _get(d, "k", int)
        if t is not None and not 0 < t < 1:
            raise ValidationError(f"growth exponent t must lie in (0, 1), got {t}")
        if t is None and k is None:
            raise ValidationError("config needs the growth exponent 't' or the truncation 'k'")
        if k is not None and k < 0:
            raise ValidationError("k must be non-negative")
        grid = d.get("grid", {})
        b = d.get("bump")
        cfg = cls(fx, t_mes, runs, t, k, _get(grid, "points", int, 6001),
                  BumpSpec.from_dict(b) if b else None, _get(d, "seed", int, 0),
                  bool(d.get("ablate", False)), d.get("out"))
        if cfg.grid_points < 16:
            raise ValidationError("grid.points must be at least 16")
        return cfg

    def to_dict(self):
        return {"fixture": self.fixture.to_dict(), "meso": {"t": list(self.meso_t)},
                "kappa": [r[0] for r in self.runs], "N": [r[1] for r in self.runs],
                "t": self.t, "k": self.k, "grid": {"points": self.grid_points},
                "bump": None if self.bump is None else self.bump.to_dict(),
                "seed": self.seed, "ablate": self.ablate}


@dataclass
class RunResult:
    kappa: int
    bigN: int
    epsilon: float
    k: int
    x: np.ndarray
    eta: np.ndarray
    rho_hat: np.ndarray
    reference: np.ndarray
    l1: float
    mass_in_J: float
    components: int
    local_maxima: int
    ablated: bool
    seconds: float = 0.0

    def to_dict(self):
        return {"kappa": self.kappa, "N": self.bigN, "epsilon": self.epsilon, "k": self.k,
                "l1": self.l1, "mass_in_J": self.mass_in_J, "components": self.components,
                "local_maxima": self.local_maxima, "ablated": self.ablated,
                "samples": {"eta": self.eta.tolist(), "rho_hat": self.rho_hat.tolist(),
                            "reference": self.reference.tolist()}}


@dataclass
class ColonizationReport:
    config: dict
    meso_bands: int
    runs: list
    jacobian: str = JACOBIAN
    timings: dict = field(default_factory=dict)

    @property
    def l1(self):
        return [r.l1 for r in self.runs]

    @property
    def monotone(self):
        d = self.l1
        return all(b <= a for a, b in zip(d, d[1:]))

    def to_dict(self):
        # timings are kept out so that reports are reproducible byte for byte
        return {"config": self.config, "jacobian": self.jacobian, "meso_bands": self.meso_bands,
                "l1": self.l1, "l1_non_increasing": self.monotone,
                "band_count_match": [r.components == self.meso_bands for r in self.runs],
                "runs": [r.to_dict() for r in self.runs]}


def count_components(values, rel=0.1):
    """Number of runs where ``values`` exceeds ``rel`` times its maximum."""
    on = values > rel * np.max(values)
    return int(np.sum(np.diff(on.astype(int)) == 1) + on[0])


def count_local_maxima(values, rel=0.1):
    v = np.asarray(values)
    top = rel * np.max(v)
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:]) & (v[1:-1] > top)
    return int(np.sum(inner))


def run_single(V, mu, irr, meso, kappa, bigN, cfg, ablate=False):
    """One (kappa, N) run; with ``ablate`` the weight uses V instead of V_hat."""
    t0 = time.perf_counter()
    plan = col.build_plan(V, mu, irr, meso, kappa, bigN, k=cfg.k, t=cfg.t if cfg.k is None else None,
                          bump_spec=cfg.bump)
    if not plan.info["growth_bound_ok"]:
        log.warning("kappa = %d, N = %d violate the growth bound for k = %d", kappa, bigN, plan.k)
    W = V if ablate else col.PerturbedPotential(plan)
    wt = op.Weight(W, bigN, features=(plan.bump.outer,))
    try:
        tab = op.recurrence_table(wt, bigN, bigN)
    except NumericalError as exc:
        exc.stage = exc.stage or "orthopoly"
        raise
    kern = op.KernelEvaluator(tab, bigN)
    ja, jb = plan.bump.inner
    x = np.linspace(ja, jb, cfg.grid_points)
    K = kern.diagonal(x)
    sc = plan.scaling
    eta = sc.eta(x)
    de = sc.eta_prime(x)
    ref = meso.density(eta)
    rho_hat = K / (kappa * de)
    l1 = float(trapezoid(np.abs(K / kappa - ref * de), x))
    return RunResult(kappa, bigN, sc.epsilon, plan.k, x, eta, rho_hat, ref, l1,
                     float(trapezoid(K, x)), count_components(rho_hat), count_local_maxima(rho_hat),
                     ablate, time.perf_counter() - t0)


def run_colonization_experiment(cfg):
    """Run every (kappa, N) pair of the schedule and collect a :class:`ColonizationReport`."""
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    t0 = time.perf_counter()
    V, mu, irr = cfg.fixture.build()
    meso = meso_equilibrium(irr.nu, cfg.meso_t)
    t1 = time.perf_counter()
    runs = []
    for kappa, bigN in cfg.runs:
        if kappa == 0:
            raise ValidationError("a colonization run needs kappa >= 1")
        runs.append(run_single(V, mu, irr, meso, kappa, bigN, cfg, cfg.ablate))
    rep = ColonizationReport(cfg.to_dict(), meso.n_bands, runs)
    rep.timings = {"setup": t1 - t0, "runs": [r.seconds for r in runs],
                   "total": time.perf_counter() - t0}
    return rep
