"""Linearization of the sample map: derivative kernels, Jacobian, solver.

The map from the potential to an eigenfunction sample y2(x, lam, q) has an
integral-kernel derivative: perturbing q by v changes the sample by
``integral_0^x K(t, x) v(t) dt``.  Two kernels are provided:

- ``full_kernel``: the exact kernel at the current potential, built from the
  fundamental solutions; used for verification (gradient checks).
- ``free_kernel``: the kernel frozen at q = 0, a product of free solutions
  ``free_solution(lam, t) * free_solution(lam, x - t)``; this is the one the
  reconstruction iterates with, so the Jacobian is assembled once.

``free_solution`` is extended analytically to lam <= 0 (it is an entire
function of lam), which keeps the kernel correct when the mean shift drives
the working eigenvalue negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .basis import Basis
from .errors import QuadratureError
from .ode import DEFAULT_TOL, integrate_ivp


def free_solution(lam: float, x):
    """Unit-slope solution of -y'' = lam y: sin(sqrt(lam) x)/sqrt(lam),
    continued through lam = 0 (-> x) and lam < 0 (-> sinh form)."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if lam > 1e-12:
        w = math.sqrt(lam)
        out = np.sin(w * x) / w
    elif lam < -1e-12:
        w = math.sqrt(-lam)
        out = np.sinh(w * x) / w
    else:
        # series sin(wx)/w = x (1 - lam x^2/6 + ...) near lam = 0
        out = x * (1.0 - lam * x * x / 6.0)
    return float(out[0]) if scalar else out


def free_kernel(t, x: float, lam: float):
    """Derivative kernel frozen at the zero potential, on 0 <= t <= x."""
    return free_solution(lam, t) * free_solution(lam, x - t)


def full_kernel(q, t, x: float, lam: float, ivp_tol=DEFAULT_TOL):
    """Exact derivative kernel at potential q, vanishing for t > x.

    Vectorized in t; each call runs one pair of fundamental solves to x.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(t < 0) or np.any(t > x):
        raise ValueError("kernel abscissae must satisfy 0 <= t <= x")
    tr1 = integrate_ivp(q, lam, x, y0=1.0, dy0=0.0, tol=ivp_tol)
    tr2 = integrate_ivp(q, lam, x, y0=0.0, dy0=1.0, tol=ivp_tol)
    y1t, _ = tr1.eval(t)
    y2t, _ = tr2.eval(t)
    y1x, y2x = tr1.y_end, tr2.y_end
    out = y2t * (y1t * y2x - y1x * y2t)
    return float(out[0]) if scalar else out


def derivative_apply(q, v, x: float, lam: float, use_full: bool = False,
                     tol: float = 1e-10, ivp_tol=DEFAULT_TOL) -> float:
    """Apply the derivative of the sample map at q to a direction v:
    the kernel integral over [0, x]."""
    if not 0 < x <= 1:
        raise ValueError(f"x must lie in (0, 1], got {x}")
    vv = quadrature.vectorized(v)
    panels = quadrature.oscillation_panels(abs(lam), x)
    if use_full:
        tr1 = integrate_ivp(q, lam, x, y0=1.0, dy0=0.0, tol=ivp_tol)
        tr2 = integrate_ivp(q, lam, x, y0=0.0, dy0=1.0, tol=ivp_tol)
        y1x, y2x = tr1.y_end, tr2.y_end

        def integrand(t):
            y1t, _ = tr1.eval(t)
            y2t, _ = tr2.eval(t)
            return y2t * (y1t * y2x - y1x * y2t) * vv(t)
    else:
        def integrand(t):
            return free_kernel(t, x, lam) * vv(t)

    return quadrature.integrate(integrand, 0.0, x, tol=tol,
                                min_panels=panels)


@dataclass
class SampleJacobian:
    """Jacobian of the frozen-kernel sample system.

    Row j, column l holds the response of sample j to basis function l:
    ``integral_0^{x_j} free_solution(lam_j, t) free_solution(lam_j, x_j - t)
    phi_l(t) dt``.
    """

    matrix: np.ndarray
    points: np.ndarray
    lams: np.ndarray
    basis: Basis
    singular_values: np.ndarray = field(init=False)

    def __post_init__(self):
        self.singular_values = np.linalg.svd(self.matrix,
                                             compute_uv=False)

    @property
    def condition_number(self) -> float:
        smin = float(self.singular_values[-1])
        if smin == 0.0:
            return math.inf
        return float(self.singular_values[0]) / smin

    def n_below(self, cutoff: float) -> int:
        return int(np.sum(self.singular_values < cutoff))


def build_jacobian(points, lams, basis: Basis,
                   tol: float = 1e-10) -> SampleJacobian:
    """Assemble the sample Jacobian for given points, per-row eigenvalues
    and basis.  Quadrature failures carry the offending (row, column)."""
    points = np.asarray(points, dtype=float).ravel()
    lams = np.asarray(lams, dtype=float).ravel()
    n = basis.n
    if len(points) != n or len(lams) != n:
        raise ValueError(
            f"need {n} points and eigenvalues for a basis of size {n}, "
            f"got {len(points)} and {len(lams)}")
    mat = np.empty((n, n))
    for j, (x, lam) in enumerate(zip(points, lams)):
        panels = quadrature.oscillation_panels(abs(lam), x)
        for l, phi in enumerate(basis.functions):
            try:
                mat[j, l] = quadrature.integrate(
                    lambda t: free_kernel(t, x, lam) * phi(t),
                    0.0, x, tol=tol, min_panels=panels)
            except Exception as exc:
                raise QuadratureError(
                    f"Jacobian entry ({j}, {l}) failed: {exc}") from exc
    return SampleJacobian(matrix=mat, points=points, lams=lams, basis=basis)


def truncated_pinv_solve(matrix, rhs, cutoff: float = 1e-6):
    """Least-squares solve through the truncated-SVD pseudoinverse.

    Singular values below ``cutoff`` are zeroed before inverting.  Returns
    (solution, number of singular values dropped).
    """
    mat = matrix.matrix if isinstance(matrix, SampleJacobian) else \
        np.asarray(matrix, dtype=float)
    u, s, vt = np.linalg.svd(mat, full_matrices=False)
    keep = s >= cutoff
    dropped = int(np.sum(~keep))
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    solution = vt.T @ (inv * (u.T @ np.asarray(rhs, dtype=float)))
    return solution, dropped


def truncated_pinv(matrix, cutoff: float = 1e-6):
    """The truncated pseudoinverse matrix itself plus the dropped count."""
    mat = matrix.matrix if isinstance(matrix, SampleJacobian) else \
        np.asarray(matrix, dtype=float)
    u, s, vt = np.linalg.svd(mat, full_matrices=False)
    keep = s >= cutoff
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (vt.T * inv) @ u.T, int(np.sum(~keep))
