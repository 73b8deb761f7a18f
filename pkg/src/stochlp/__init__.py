"""Stochastic central-path LP solver with amortized projection maintenance."""

from .errors import (CenteringFailedError, DomainError, EnumerationGuardError,
                     FactorizationError, InstanceFormatError,
                     PositivityLostError, PotentialOverflowError, ShapeError,
                     StepUnboundedError, StochLPError)
from .linalg import (form_gram, mat_mul, projection_full,
                     set_sequential_kernels, solve_spd)
from .model import (LinearProgram, ReformulatedLP, duality_gap,
                    recover_solution, reformulate)
from .oracle import (OracleResult, naive_projection_apply, reference_ipm,
                     vertex_enumerate_solve)
from .potentials import CoshPotential, SoftErrorPotential, WeightSchedule
from .projection import ProjectionMaintainer
from .solver import (IterateState, SolveReport, SolverConfig, classical_step,
                     compute_delta_mu, mode_parameters, solve)
from .step import (RngState, SparseDirection, StepResult,
                   sample_sparse_direction, stochastic_step)

__version__ = "0.1.0"

__all__ = [
    "CenteringFailedError", "CoshPotential", "DomainError",
    "EnumerationGuardError", "FactorizationError", "InstanceFormatError",
    "IterateState", "LinearProgram", "OracleResult", "PositivityLostError",
    "PotentialOverflowError", "ProjectionMaintainer", "ReformulatedLP",
    "RngState", "ShapeError", "SolveReport", "SolverConfig",
    "SoftErrorPotential", "SparseDirection", "StepResult",
    "StepUnboundedError", "StochLPError", "WeightSchedule", "classical_step",
    "compute_delta_mu", "duality_gap", "form_gram", "mat_mul",
    "mode_parameters", "naive_projection_apply", "projection_full",
    "recover_solution", "reference_ipm", "reformulate",
    "sample_sparse_direction", "set_sequential_kernels", "solve", "solve_spd",
    "stochastic_step", "vertex_enumerate_solve",
]
