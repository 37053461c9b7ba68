"""Image deblurring under impulse noise with overlapping-group-sparsity TV."""

from .degradation import KernelSpec, NoiseSpec, degrade, make_kernel
from .metrics import psnr, quality, relative_error
from .ogs import GroupConfig, MMSettings, group_norm_sum, lambda_sq_diagonal, mm_denoise
from .prox import BoxRange, project_box, shrink
from .solver import SolveReport, SolverError, SolverParams, objective, solve, solve_classic
from .spectral import SpectralOperator, apply, apply_adjoint, build_spectral, solve_f_subproblem

__version__ = "0.1.0"
