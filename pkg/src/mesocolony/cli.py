"""Command-line interface.

Every subcommand reads a JSON config (``--config``) and writes into
``--out`` (default: the current directory). Exit status is 0 on success,
1 for invalid input and 2 when a numerical stage fails.
"""

import argparse
import logging
import os
import sys

import numpy as np

from . import colonization as col, io, orthopoly as op, sampler
from .equilibrium import solve_equilibrium, verify_variational
from .errors import NumericalError, ValidationError
from .experiment import ExperimentConfig, run_colonization_experiment
from .mesoscopic import meso_equilibrium
from .potential import PolynomialPotential

log = logging.getLogger("mesocolony")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _potential(cfg):
    if "potential" not in cfg:
        raise ValidationError("config needs 'potential': {'coeffs': [...], 'T': ...}")
    return PolynomialPotential.from_dict(cfg["potential"])


def _int(cfg, key, default):
    v = cfg.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ValidationError(f"'{key}' must be an integer, got {v!r}")
    return int(v)


def cmd_equilibrium(cfg, args):
    V = _potential(cfg)
    exc = cfg.get("excluded")
    mu = solve_equilibrium(V, float(cfg.get("mass", 1.0)), excluded=tuple(exc) if exc else None,
                           backend=cfg.get("backend", "newton"))
    rep = verify_variational(V, mu)
    io.write_json(os.path.join(args.out, "endpoints.json"),
                  {"endpoints": mu.endpoints.tolist(), "robin": mu.robin,
                   "variational": rep.to_dict()})
    xs, rho = mu.profile(_int(cfg, "profile_points", 401))
    if args.format == "csv":
        io.write_csv(os.path.join(args.out, "density.csv"), [xs, rho], ["x", "value"])
    else:
        io.write_json(os.path.join(args.out, "measure.json"), mu.to_dict())


def cmd_density(cfg, args):
    V = _potential(cfg)
    bigN = _int(cfg, "N", 32)
    n = _int(cfg, "n", bigN)
    g = cfg.get("grid", {})
    grid = np.linspace(float(g.get("lo", -2.0)), float(g.get("hi", 2.0)), _int(g, "points", 401))
    tab = op.recurrence_table(V, bigN, max(n, 1))
    prof = op.density_profile(op.KernelEvaluator(tab, n), grid)
    if args.format == "csv":
        io.write_csv(os.path.join(args.out, "density.csv"), [prof.x, prof.value], ["x", "value"])
    else:
        io.write_json(os.path.join(args.out, "density.json"), {"x": prof.x.tolist(), "value": prof.value.tolist()})
    io.write_json(os.path.join(args.out, "recurrence.json"), tab.to_dict())


def cmd_meso(cfg, args):
    nu = _int(cfg, "nu", 0)
    m = meso_equilibrium(nu, cfg.get("t", []), order=_int(cfg, "order", 12))
    io.write_json(os.path.join(args.out, "meso.json"), m.to_dict())
    xs, rho = m.measure.profile(_int(cfg, "profile_points", 401))
    io.write_csv(os.path.join(args.out, "meso_density.csv"), [xs, rho], ["eta", "value"])


def _plan_from(cfg):
    ec = ExperimentConfig.from_dict(cfg)
    V, mu, irr = ec.fixture.build()
    meso = meso_equilibrium(irr.nu, ec.meso_t)
    kappa, bigN = ec.runs[0]
    plan = col.build_plan(V, mu, irr, meso, kappa, bigN, k=ec.k, t=ec.t if ec.k is None else None,
                          bump_spec=ec.bump)
    return ec, plan


def cmd_plan(cfg, args):
    _, plan = _plan_from(cfg)
    io.write_json(os.path.join(args.out, "plan.json"), plan.to_dict())
    lo, hi = plan.bump.outer
    xs = np.linspace(lo, hi, _int(cfg.get("grid", {}), "points", 401))
    io.write_csv(os.path.join(args.out, "A.csv"), [xs, plan.A(xs)], ["x", "value"])
    io.write_csv(os.path.join(args.out, "Vhat.csv"), [xs, plan.Vhat(xs)], ["x", "value"])


def cmd_colonize(cfg, args):
    if args.seed is not None:
        cfg = dict(cfg, seed=args.seed)
    rep = run_colonization_experiment(cfg)
    io.write_json(os.path.join(args.out, "report.json"), rep.to_dict())
    io.write_json(os.path.join(args.out, "timings.json"), rep.timings)
    for r in rep.runs:
        io.write_csv(os.path.join(args.out, f"profile_k{r.kappa}_N{r.bigN}.csv"),
                     [r.eta, r.rho_hat, r.reference], ["eta", "value", "reference_value"])


def cmd_sample(cfg, args):
    V = _potential(cfg)
    n = _int(cfg, "n", 2)
    seed = args.seed if args.seed is not None else _int(cfg, "seed", 0)
    s = sampler.mcmc_sample(n, float(cfg.get("N", n)), V, chains=_int(cfg, "chains", 8),
                            steps=_int(cfg, "steps", 20000), seed=seed)
    lo, hi = cfg.get("range", [-3.0, 3.0])
    bins = _int(cfg, "bins", 100)
    counts, edges = np.histogram(s.marginal, bins=bins, range=(lo, hi))
    mid = 0.5 * (edges[1:] + edges[:-1])
    dens = counts / (s.marginal.size * (edges[1] - edges[0]))
    io.write_csv(os.path.join(args.out, "histogram.csv"), [mid, dens], ["x", "value"])
    io.write_json(os.path.join(args.out, "samples.json"), s.to_dict())


def cmd_endpoints_ode(cfg, args):
    ec = ExperimentConfig.from_dict(dict(cfg, kappa=cfg.get("kappa", 1), N=cfg.get("N", 10 ** 6),
                                         k=cfg.get("k", 8)))
    V, mu, irr = ec.fixture.build()
    meso = meso_equilibrium(irr.nu, ec.meso_t, order=max(12, ec.k))
    sc = col.scaling_map(irr, V, mu, 1, 10 ** 6)
    flow = col.EndpointFlow.from_plan_inputs(sc, meso, ec.k, ablate=bool(cfg.get("ablate", False)))
    eps_end = float(cfg.get("eps_end", 0.05))
    if not eps_end > 0:
        raise ValidationError("eps_end must be positive")
    eps, alpha = col.integrate_endpoints(flow, V, eps_end, _int(cfg, "steps", 50))
    cols = [eps] + [alpha[:, j] for j in range(alpha.shape[1])]
    io.write_csv(os.path.join(args.out, "endpoints_ode.csv"), cols,
                 ["eps"] + [f"alpha_{j + 1}" for j in range(alpha.shape[1])])
    checks = []
    full = col.EndpointFlow.from_plan_inputs(sc, meso, ec.k)
    init = mu.endpoints
    n_check = _int(cfg, "check_points", 5)
    for i in np.linspace(0, eps.size - 1, n_check + 1)[1:].astype(int):
        d = col.direct_endpoints(full, V, eps[i], init)
        init = d
        checks.append({"eps": eps[i], "direct": d.tolist(), "ode": alpha[i].tolist(),
                       "max_abs_difference": float(np.max(np.abs(d - alpha[i])))})
    io.write_json(os.path.join(args.out, "endpoints_ode.json"), {"checks": checks, "ablate": flow.ablate})


COMMANDS = {
    "equilibrium": cmd_equilibrium,
    "density": cmd_density,
    "meso": cmd_meso,
    "plan": cmd_plan,
    "colonize": cmd_colonize,
    "sample": cmd_sample,
    "endpoints-ode": cmd_endpoints_ode,
}


def _seed(v):
    try:
        s = int(v)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"seed must be an integer: {v!r}") from exc
    if not 0 <= s < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return s


def build_parser():
    p = _Parser(prog="mesocolony", description="Equilibrium measures and eigenvalue colonies.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True)
        s.add_argument("--out", default=".")
        s.add_argument("--seed", type=_seed, default=None)
        s.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = io.read_config(args.config)
        io.ensure_dir(args.out)
        COMMANDS[args.command](cfg, args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        stage = f" [{exc.stage}]" if getattr(exc, "stage", None) else ""
        print(f"numerical failure{stage}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
