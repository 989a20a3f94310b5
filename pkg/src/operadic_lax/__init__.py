"""Endomorphism-operad toolkit and operadic Lax representations of the harmonic oscillator."""

from .errors import BranchCutError, DomainError, IntegrationError, ShapeError
from .tensor_core import (
    Operation,
    evaluate,
    identity_map,
    linear_combine,
    load_operation,
    max_abs_diff,
    save_operation,
)
from .operad import gerstenhaber_bracket, partial_composition, total_composition
from .oscillator import (
    AuxPair,
    OscState,
    aux_functions,
    exact_trajectory,
    hamiltonian,
    lax_L,
    lax_M,
)
from .lax_dynamics import (
    ParamVector,
    anticommutative_rhs,
    classify_rigidity,
    closed_form_mu,
    gamma_matrix,
    general_lax_rhs,
    lemma52_rhs,
    solve_params,
    theorem_residual,
)
from .algebras import builtin, check_isomorphism, check_jacobi, sl2_iso_matrix
from .integrator import CoupledState, IntegrationConfig, rk4_run

__version__ = "0.1.0"
