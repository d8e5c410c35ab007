"""eigenfit: recover the potential of -y'' + q y = lam y on [0, 1] from
point samples of one low-mode eigenfunction.

The package covers the whole workflow: forward spectral solves by shooting
(`eigenvalue`, `sample_eigenfunction`), the derivative-kernel linearization
and its frozen-kernel Jacobian (`build_jacobian`), the quasi-Newton
reconstruction (`invert` or the scikit-learn style
`PotentialReconstructor`), sample-point design by condition number
(`optimize_points`), and basis selection (`rank_reconstructions`,
`merge_top_functions`).
"""

from .basis import Basis, BasisFunction, Potential, project
from .design import (PointConfiguration, condition_number, equally_spaced,
                     optimize_points)
from .errors import (BracketingError, ConfigError, EigenfitError,
                     InversionError, QuadratureError, SingularBasisError,
                     StepSizeUnderflowError, ZeroCountError)
from .estimator import PotentialReconstructor
from .forward import (EigenPair, SampleSet, asymptotic_residual,
                      boundary_shot, eigenvalue, potential_mean,
                      sample_eigenfunction)
from .inversion import InversionOptions, InversionReport, invert, residuals
from .ode import DEFAULT_TOL, Trajectory, fundamental_pair, integrate_ivp
from .potentials import BUILTINS, parse_expression
from .selection import contribution, merge_top_functions, rank_reconstructions
from .sensitivity import (SampleJacobian, build_jacobian, derivative_apply,
                          free_kernel, free_solution, full_kernel,
                          truncated_pinv, truncated_pinv_solve)

__version__ = "0.1.0"

__all__ = [
    "Basis", "BasisFunction", "Potential", "project",
    "PointConfiguration", "condition_number", "equally_spaced",
    "optimize_points",
    "BracketingError", "ConfigError", "EigenfitError", "InversionError",
    "QuadratureError", "SingularBasisError", "StepSizeUnderflowError",
    "ZeroCountError",
    "PotentialReconstructor",
    "EigenPair", "SampleSet", "asymptotic_residual", "boundary_shot",
    "eigenvalue", "potential_mean", "sample_eigenfunction",
    "InversionOptions", "InversionReport", "invert", "residuals",
    "DEFAULT_TOL", "Trajectory", "fundamental_pair", "integrate_ivp",
    "BUILTINS", "parse_expression",
    "contribution", "merge_top_functions", "rank_reconstructions",
    "SampleJacobian", "build_jacobian", "derivative_apply", "free_kernel",
    "free_solution", "full_kernel", "truncated_pinv",
    "truncated_pinv_solve",
    "__version__",
]
