"""Numerics for non-symmetric stable operators: symbols, boundary exponents,
singular quadrature, and 1D Dirichlet problems."""

from .dirichlet import (BoundaryExponentEstimator, DirichletProblem, Grid1D, GridFunction1D,
                        NonlocalDirichletSolver, Solution1D, assemble_matrix, boundary_trace,
                        fit_boundary_exponent, solve_dirichlet, verify_pohozaev)
from .errors import (BisectionError, ConfigError, DegenerateKernelError, DomainError,
                     GammaPoleError, InsufficientResolutionError, InvalidKernelError,
                     SingularMatrixError, StableToolError, TailDivergenceError,
                     ToleranceWarning, ZeroFrequencyError)
from .evaluator import (QuadratureConfig, SmoothFunction1D, adjoint_pairing_check,
                        apply_adjoint_1d, apply_operator_1d, apply_to_power)
from .exponent import (ExponentReport, exponent_report, gamma_1d_root, gamma_exponent,
                       gamma_star, halfspace_profile_coeffs, ibp_constant, kappa_1d,
                       kappa_1d_half)
from .halfspace import IbpReport, shifted_energy_probe, verify_flat_ibp
from .kernel import (StableKernel, adjoint, ellipticity_constants, even_odd_split,
                     kernel_1d, load_kernel, save_kernel, validate)
from .specfun import gamma_fn, reflection_product
from .symbol import SymbolValue, adjoint_symbol, sqrt_symbol, symbol

__version__ = "0.1.0"
