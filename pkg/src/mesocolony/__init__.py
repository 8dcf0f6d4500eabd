"""Equilibrium measures, orthogonal polynomials and eigenvalue colonies at outposts."""

from .colonization import (ColonizationPlan, EndpointFlow, PerturbedPotential, ScalingMap,
                           build_plan, choose_truncation, endpoint_ode, growth_bound_ok,
                           integrate_endpoints, laurent_coefficients, perturbed_potential,
                           scaling_map)
from .equilibrium import (EquilibriumMeasure, SingularField, construct_irregular_potential,
                          detect_irregular_point, g_function, solve_equilibrium, verify_variational)
from .errors import (BandCountError, ConvergenceError, NumericalError, QuadratureError,
                     ValidationError)
from .experiment import ColonizationReport, ExperimentConfig, run_colonization_experiment
from .mesoscopic import MesoscopicModel, far_field_fit, meso_equilibrium, meso_moments, truncated_g
from .orthopoly import (KernelEvaluator, RecurrenceTable, cd_kernel, density_profile, eval_poly,
                        recurrence_table)
from .potential import BumpSpec, IrregularPoint, PolynomialPotential, bump, effective_potential
from .sampler import mcmc_sample

__version__ = "0.1.0"
