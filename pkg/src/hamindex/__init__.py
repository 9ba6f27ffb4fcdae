"""Maslov-type indices of periodic linear Hamiltonian systems and Galerkin search for periodic orbits."""

__version__ = "0.1.0"

from .errors import (CriticalPointNotFound, DegenerateLoopError, EvaluationError, HamIndexError,
                     IncompatibleLoopsError, InvalidArgumentError, InvalidDimensionError, NonConvergenceError,
                     NumericError, QuadratureError)
from .flow import SymplecticPath, fundamental_solution, iterate_path, monodromy
from .galerkin import GalerkinForm
from .index import (IndexPair, IndexReport, assemble_galerkin_form, constant_block_oracle, index_counts,
                    maslov_index, maslov_index_galerkin, maslov_index_report, monodromy_nullity)
from .iteration import (IterationReport, check_iteration_inequalities, distinctness, distinctness_bound,
                        extend_period, phase_shift)
from .kernels import BACKEND
from .loops import (FourierLoop, SplitLoop, a_form, action, b_form, b_rho_scale, e_inner, e_norm, evaluate,
                    gradient, hessian, l2_norm, split)
from .models import (HamiltonianModel, HypothesisReport, anisotropic_model, check_h7, expression_model,
                     k_range_bound, nonautonomous_model, quadratic_model, quadratic_plus_model, soft_power_model,
                     verify_hypotheses)
from .solver import (LinkingReport, SolutionRecord, SolverOptions, estimate_alpha0, find_critical_point,
                     linking_gap, minimal_period, morse_counts, subharmonic_family, verify_solution)
from .symplectic import CoefficientPath, constant_path, is_symplectic, kernel_dimension, standard_j, trig_path
