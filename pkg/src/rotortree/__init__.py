"""Exact rotor-router and linear machines on the infinite k-regular tree.

The package computes, with no floating point on the critical path:

  * walk kernels on the tree (path counts, hit probabilities, the ballot
    kernel and its closed form, single-cell influence on the origin);
  * snapshot rotor-router dynamics and the linear (expected-walk) machine,
    both exact, with light-cone pruning for origin-directed questions;
  * synthesis of initial configurations realizing prescribed chip-count
    residues mod k over a finite space-time window;
  * the discrepancy f(origin, T) - E(origin, T), its exact decomposition
    into per-vertex contributions, and the divergence family driving the
    discrepancy to infinity with sqrt(T)-order growth.
"""

from .analysis import (ContributionTerm, ConvergencePoint, Decomposition,
                       DivergenceSpec, GrowthRow, SphereReport,
                       chip_count_experiment, comparator_term, contribution,
                       contribution_terms, convergence_series, decompose,
                       discrepancy, divergence_analytic, divergence_growth,
                       divergence_target, divergence_term, lower_bound_comparator,
                       odd_burst_time)
from .errors import (AtOrigin, BudgetExceeded, DegenerateK, LetterOutOfRange,
                     MixedBase, NotEvenlyDivisible, OddHorizon, ParityViolation,
                     RepeatedLetter, RotorTreeError, SchedulePastHorizon)
from .exact import ExactAmount
from .forcing import (ForcingResult, Placement, ResidueTarget, VerifyReport,
                      pile_spread, synthesize, target_from_json, target_to_json,
                      verify_residues)
from .kernels import (KernelTable, ballot_kernel, ballot_kernel_closed,
                      ballot_oracle, factorial_bounds, gamma_factorial,
                      hit_probability, influence, influence_peak_time,
                      path_count, path_count_oracle)
from .machines import (Burst, LinearState, ResidueSchedule, RotorConfig,
                       RotorPolicy, RotorTrajectory, config_from_json,
                       config_to_json, default_rotor_direction, linear_analytic,
                       linear_step, occupancy_budget, outflow_split, rotor_run,
                       rotor_step)
from .tree import (ORIGIN, TreeParams, Vertex, ball_vertices, descend_canonical,
                   distance, make_vertex, neighbor, same_parity, sphere_size,
                   sphere_vertices, toward_origin, vertex_from_str, vertex_to_str)

__version__ = "0.1.0"

__all__ = [
    "AtOrigin", "BudgetExceeded", "Burst", "ContributionTerm",
    "ConvergencePoint", "Decomposition", "DegenerateK", "DivergenceSpec",
    "ExactAmount", "ForcingResult", "GrowthRow", "KernelTable",
    "LetterOutOfRange", "LinearState", "MixedBase", "NotEvenlyDivisible",
    "ORIGIN", "OddHorizon", "ParityViolation", "Placement", "RepeatedLetter",
    "ResidueSchedule", "ResidueTarget", "RotorConfig", "RotorPolicy",
    "RotorTrajectory", "RotorTreeError", "SchedulePastHorizon", "SphereReport",
    "TreeParams", "VerifyReport", "Vertex", "ball_vertices",
    "ballot_kernel", "ballot_kernel_closed", "ballot_oracle",
    "chip_count_experiment", "comparator_term", "config_from_json",
    "config_to_json", "contribution", "contribution_terms",
    "convergence_series", "decompose", "default_rotor_direction",
    "descend_canonical", "discrepancy", "distance", "divergence_analytic",
    "divergence_growth", "divergence_target", "divergence_term",
    "factorial_bounds", "gamma_factorial", "hit_probability", "influence",
    "influence_peak_time", "linear_analytic", "linear_step", "make_vertex",
    "neighbor", "occupancy_budget", "odd_burst_time", "outflow_split",
    "path_count", "path_count_oracle", "pile_spread", "rotor_run",
    "rotor_step", "same_parity", "sphere_size", "sphere_vertices",
    "synthesize", "target_from_json", "target_to_json", "toward_origin",
    "verify_residues", "vertex_from_str", "vertex_to_str",
]
