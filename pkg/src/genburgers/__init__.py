"""Mild-solution solver and verification suite for ``u_t - u_xx + h(x) u u_x = 0``.

``h(x) = (1 + x^2)^(-alpha)``. The solution is computed as the Picard fixed
point of the Duhamel map, checked against an independent finite-difference
solver and a set of executable invariants.
"""

from .backend import NAME as BACKEND
from .coeff import Coefficient, h, sup_dh
from .errors import (CertificationError, ConfigurationError, ConvergenceError, DomainError,
                     PreconditionError, SolverError)
from .fd_oracle import FdConfig, compare, solve_fd
from .field import Field, Grid
from .initial_data import PiecewiseConstant, Smooth, Step, constant, heat_convolution, tanh_profile
from .mild_solver import SolutionPatch, SolverConfig, apply_M, certified_step, solve_global, solve_local

__all__ = [
    "BACKEND", "Coefficient", "h", "sup_dh",
    "CertificationError", "ConfigurationError", "ConvergenceError", "DomainError",
    "PreconditionError", "SolverError",
    "FdConfig", "compare", "solve_fd", "Field", "Grid",
    "PiecewiseConstant", "Smooth", "Step", "constant", "heat_convolution", "tanh_profile",
    "SolutionPatch", "SolverConfig", "apply_M", "certified_step", "solve_global", "solve_local",
]
__version__ = "0.1.0"
