"""Restarted PDHG for equality-form LPs, with an exact desk-scale
certification harness for totally unimodular instances."""

from tulp.certify import (OptimalFace, SharpnessReport, distance_to_optimal,
                          hoffman_alpha, hoffman_inequality_check,
                          make_distance_oracle, restart_length_bound,
                          schur_limit_check, sharpness_alpha, sharpness_radius,
                          sherman_morrison_bound_check, solve_exact)
from tulp.cli import (ExperimentSpec, emit_convergence_csv, load_generator,
                      load_instance, run_experiment, save_instance)
from tulp.gap import (GapGradient, gap_gradient, max_over_ball, normalized_gap,
                      normalized_gap_limit)
from tulp.kernels import BACKEND
from tulp.lp_model import (KktResidual, PrimalDualPoint, StandardFormLP,
                           kkt_residual, lagrangian, spectral_norm_estimate,
                           weighted_norm)
from tulp.solver import (ConvergenceLog, EpochRecord, SolverConfig, pdhg_step,
                         run_restarted, running_average)
from tulp.sparse import SparseMatrix
from tulp.tu import (FlowInstanceSpec, TuCertificate, gen_assignment,
                     gen_min_cost_flow, incidence_matrix, is_totally_unimodular,
                     random_flow_spec, tu_closure_build, tu_inverse_check)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ConvergenceLog", "EpochRecord", "ExperimentSpec",
    "FlowInstanceSpec", "GapGradient", "KktResidual", "OptimalFace",
    "PrimalDualPoint", "SharpnessReport", "SolverConfig", "SparseMatrix",
    "StandardFormLP", "TuCertificate", "distance_to_optimal",
    "emit_convergence_csv", "gap_gradient", "gen_assignment",
    "gen_min_cost_flow", "hoffman_alpha", "hoffman_inequality_check",
    "incidence_matrix", "is_totally_unimodular", "kkt_residual", "lagrangian",
    "load_generator", "load_instance", "make_distance_oracle", "max_over_ball",
    "normalized_gap", "normalized_gap_limit", "pdhg_step",
    "random_flow_spec", "restart_length_bound", "run_experiment",
    "run_restarted", "running_average", "save_instance", "schur_limit_check",
    "sharpness_alpha", "sharpness_radius", "sherman_morrison_bound_check",
    "solve_exact", "spectral_norm_estimate", "tu_closure_build",
    "tu_inverse_check", "weighted_norm",
]
