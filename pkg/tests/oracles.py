"""Independent reference computations used to pin expected test values.

Nothing here imports from eigenfit: the oracles must stay decoupled from the
code paths they check.

- rk4_solve: fixed-step classical RK4 for -y'' + q y = lam y.
- fd_eigen: tridiagonal finite-difference Dirichlet eigensolver with
  Richardson extrapolation in the mesh width.
- simpson: composite Simpson quadrature on a uniform grid.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigh_tridiagonal


def rk4_solve(q, lam, x_end, y0, dy0, n_steps):
    """Classical RK4 with n_steps uniform steps; returns (y, y') at x_end."""
    h = x_end / n_steps
    y, dy = float(y0), float(dy0)
    x = 0.0
    for _ in range(n_steps):
        c1 = q(x) - lam
        k1y, k1d = dy, c1 * y
        xm = x + 0.5 * h
        cm = q(xm) - lam
        k2y = dy + 0.5 * h * k1d
        k2d = cm * (y + 0.5 * h * k1y)
        k3y = dy + 0.5 * h * k2d
        k3d = cm * (y + 0.5 * h * k2y)
        xe = x + h
        ce = q(xe) - lam
        k4y = dy + h * k3d
        k4d = ce * (y + h * k3y)
        y += (h / 6.0) * (k1y + 2 * k2y + 2 * k3y + k4y)
        dy += (h / 6.0) * (k1d + 2 * k2d + 2 * k3d + k4d)
        x = xe
    return y, dy


def _fd_grid_eigen(q, k, n_interior):
    """k-th Dirichlet eigenvalue/eigenvector of the central-difference
    discretization on n_interior uniform interior points."""
    h = 1.0 / (n_interior + 1)
    x = h * np.arange(1, n_interior + 1)
    diag = 2.0 / h**2 + q(x)
    off = np.full(n_interior - 1, -1.0 / h**2)
    vals, vecs = eigh_tridiagonal(diag, off, select="i",
                                  select_range=(k - 1, k - 1))
    return float(vals[0]), x, vecs[:, 0]


def fd_eigenvalue(q, k, n_interior=1999):
    """Richardson-extrapolated (h^2 -> 0) finite-difference eigenvalue.

    Uses meshes h and h/2; the central-difference eigenvalue error is
    C h^2 + O(h^4), so (4*lam_fine - lam_coarse) / 3 cancels the h^2 term.
    """
    lam_c, _, _ = _fd_grid_eigen(q, k, n_interior)
    lam_f, _, _ = _fd_grid_eigen(q, k, 2 * (n_interior + 1) - 1)
    return (4.0 * lam_f - lam_c) / 3.0


def fd_eigenfunction_samples(q, k, points, n_interior=3999):
    """Slope-normalized eigenfunction values at the given points.

    The discrete eigenvector is rescaled so y'(0) = 1, with the boundary
    slope taken from a 4th-order one-sided stencil, then interpolated.
    """
    _, x, v = _fd_grid_eigen(q, k, n_interior)
    h = x[0]
    # One-sided derivative at 0 using y(0)=0 and the first four grid values.
    slope = (48 * v[0] - 36 * v[1] + 16 * v[2] - 3 * v[3]) / (12 * h)
    v = v / slope
    grid = np.concatenate(([0.0], x, [1.0]))
    vals = np.concatenate(([0.0], v, [0.0]))
    return np.interp(np.asarray(points, dtype=float), grid, vals)


def simpson(f, a, b, n_panels):
    """Composite Simpson on n_panels uniform panels (vectorized f)."""
    x = np.linspace(a, b, 2 * n_panels + 1)
    y = np.asarray(f(x), dtype=float)
    h = (b - a) / (2 * n_panels)
    return (h / 3.0) * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum()
                        + 2.0 * y[2:-1:2].sum())
