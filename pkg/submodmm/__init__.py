from .core import (
    ArgumentError,
    BudgetExceededError,
    DomainError,
    InfeasibleError,
    ModularVector,
    SetFunctionOracle,
    SubsetMask,
    UnsupportedError,
)
from .functions import build_from_problem, random_instance
from .harness import ExperimentSpec, run_experiment
from .linopt import ConstraintFamily, maximize_modular, minimize_modular
from .mmax import MaximizeReport, ScheduleConfig, maximize
from .mmin import MinimizeReport, constrained_mmin, lattice_summary, mmin_alternate, mmin_iterate
from .oracle import brute_maximize, brute_minimize, check_semigradient_membership, verify_lattice_claims
from .semigradient import Permutation, subgradient_from_permutation, supergradient

__version__ = "0.1.0"
__all__ = [
    "ArgumentError",
    "BudgetExceededError",
    "ConstraintFamily",
    "DomainError",
    "ExperimentSpec",
    "InfeasibleError",
    "MaximizeReport",
    "MinimizeReport",
    "ModularVector",
    "Permutation",
    "ScheduleConfig",
    "SetFunctionOracle",
    "SubsetMask",
    "UnsupportedError",
    "brute_maximize",
    "brute_minimize",
    "build_from_problem",
    "check_semigradient_membership",
    "constrained_mmin",
    "lattice_summary",
    "maximize",
    "maximize_modular",
    "minimize_modular",
    "mmin_alternate",
    "mmin_iterate",
    "random_instance",
    "run_experiment",
    "subgradient_from_permutation",
    "supergradient",
    "verify_lattice_claims",
]
