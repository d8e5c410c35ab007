"""Adaptive initial-value integration of -y'' + q y = lam y on [0, x_end].

The second-order equation is integrated as the first-order system
(y, y') with an embedded Dormand-Prince 5(4) pair and a quartic dense-output
interpolant, so trajectories can be evaluated at arbitrary interior points
after a single solve.  The equation is linear and homogeneous, so initial
data are normalized to unit magnitude internally and the scale is re-applied
on output; this makes trajectories exactly proportional to their initial
data, which downstream slope-normalized sampling relies on.

Tolerances are a triple ``(rtol, atol_y, atol_dy)``: one relative component
shared by both state variables plus separate absolute floors for y and y'.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .errors import EigenfitError, StepSizeUnderflowError

DEFAULT_TOL = (1e-10, 1e-10, 1e-11)

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (9017 / 3168, -355 / 33, 46732 / 5247,
                                49 / 176, -5103 / 18656)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# Difference between the 5th- and embedded 4th-order weights.
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                                -17253 / 339200, 22 / 525, -1 / 40)

# Dense-output polynomial: u(x0 + t*h) = u0 + h * sum_i k_i * B_i(t) with
# B_i(t) = t*(P[i,0] + t*(P[i,1] + t*(P[i,2] + t*P[i,3]))).
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _check_tol(tol) -> tuple[float, float, float]:
    try:
        rtol, atol_y, atol_dy = (float(t) for t in tol)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"tolerance must be a (rtol, atol_y, atol_dy) "
                         f"triple, got {tol!r}") from exc
    if rtol <= 0 or atol_y <= 0 or atol_dy <= 0:
        raise ValueError(f"tolerance components must be positive: {tol!r}")
    return rtol, atol_y, atol_dy


@dataclass
class Trajectory:
    """Solution of one initial-value solve, with dense evaluation.

    ``xs``, ``ys``, ``dys`` hold the accepted step nodes (first 0, last
    x_end); ``eval`` interpolates y and y' anywhere in between with the
    integrator's own dense output.
    """

    xs: np.ndarray
    ys: np.ndarray
    dys: np.ndarray
    n_steps: int
    n_rejected: int
    n_evals: int
    tol: tuple[float, float, float]
    _seg_x0: np.ndarray = field(repr=False)
    _seg_h: np.ndarray = field(repr=False)
    _seg_u0: np.ndarray = field(repr=False)   # (nseg, 2)
    _seg_k: np.ndarray = field(repr=False)    # (nseg, 7, 2)
    _scale: float = field(repr=False)

    @property
    def x_end(self) -> float:
        return float(self.xs[-1])

    @property
    def y_end(self) -> float:
        return float(self.ys[-1])

    @property
    def dy_end(self) -> float:
        return float(self.dys[-1])

    def eval(self, x):
        """Evaluate (y(x), y'(x)); accepts a scalar or an ndarray."""
        if np.isscalar(x) or getattr(x, "ndim", 1) == 0:
            return self._eval_scalar(float(x))
        xq = np.asarray(x, dtype=float)
        lo, hi = float(self.xs[0]), float(self.xs[-1])
        if xq.size and (xq.min() < lo - 1e-12 or xq.max() > hi + 1e-12):
            raise ValueError(f"evaluation points outside [{lo}, {hi}]")
        if self._seg_x0.size == 0:          # zero-length or trivial solve
            y = np.full_like(xq, self.ys[0])
            dy = np.full_like(xq, self.dys[0])
            return y, dy
        idx = np.clip(np.searchsorted(self._seg_x0, xq, side="right") - 1,
                      0, len(self._seg_x0) - 1)
        h = self._seg_h[idx]
        t = (xq - self._seg_x0[idx]) / h
        tb = t[:, None]
        bpoly = tb * (_P[:, 0] + tb * (_P[:, 1] + tb * (_P[:, 2]
                                                        + tb * _P[:, 3])))
        k = self._seg_k[idx]                 # (m, 7, 2)
        incr = h[:, None] * np.einsum("mi,mic->mc", bpoly, k)
        u = self._seg_u0[idx] + incr
        return self._scale * u[:, 0], self._scale * u[:, 1]

    def _eval_scalar(self, x: float) -> tuple[float, float]:
        lo, hi = float(self.xs[0]), float(self.xs[-1])
        if x < lo - 1e-12 or x > hi + 1e-12:
            raise ValueError(f"evaluation point {x} outside [{lo}, {hi}]")
        if self._seg_x0.size == 0:
            return float(self.ys[0]), float(self.dys[0])
        i = min(max(bisect_right(self._seg_x0, x) - 1, 0),
                len(self._seg_x0) - 1)
        h = self._seg_h[i]
        t = (x - self._seg_x0[i]) / h
        b = t * (_P[:, 0] + t * (_P[:, 1] + t * (_P[:, 2] + t * _P[:, 3])))
        u = self._seg_u0[i] + h * (b @ self._seg_k[i])
        return float(self._scale * u[0]), float(self._scale * u[1])


def integrate_ivp(q, lam: float, x_end: float, y0: float = 0.0,
                  dy0: float = 1.0, tol=DEFAULT_TOL) -> Trajectory:
    """Solve -y'' + q(x) y = lam y with y(0)=y0, y'(0)=dy0 up to x_end.

    ``q`` is any callable defined and finite on [0, x_end].  Raises
    StepSizeUnderflowError if the controller collapses, and EigenfitError
    if q evaluates to a non-finite value.

    Warning: potentials with kinks or jumps (the triangle-wave target, say)
    are left to the adaptive controller rather than split at breakpoints;
    expect clusters of small steps and rejections around the
    discontinuity, with accuracy still governed by the tolerance.
    """
    rtol, atol_y, atol_dy = _check_tol(tol)
    x_end = float(x_end)
    if x_end <= 0:
        raise ValueError(f"x_end must be positive, got {x_end}")
    lam = float(lam)

    scale = max(abs(float(y0)), abs(float(dy0)))
    if scale == 0.0:
        # The zero solution; no integration needed.
        xs = np.array([0.0, x_end])
        zeros = np.zeros(2)
        return Trajectory(xs, zeros.copy(), zeros.copy(), 0, 0, 0,
                          (rtol, atol_y, atol_dy),
                          np.empty(0), np.empty(0), np.empty((0, 2)),
                          np.empty((0, 7, 2)), 0.0)
    y = float(y0) / scale
    dy = float(dy0) / scale

    def coeff(x: float) -> float:
        c = float(q(x)) - lam
        if not math.isfinite(c):
            raise EigenfitError(f"potential evaluated non-finite at x = {x}")
        return c

    node_x = [0.0]
    node_y = [y]
    node_dy = [dy]
    seg_x0: list[float] = []
    seg_h: list[float] = []
    seg_u0: list[tuple[float, float]] = []
    seg_k: list[list[tuple[float, float]]] = []

    x = 0.0
    k1y = dy
    k1d = coeff(0.0) * y
    n_evals = 1
    n_steps = 0
    n_rejected = 0

    # Initial step from the local frequency scale; the controller corrects.
    omega = math.sqrt(abs(coeff(0.0))) + 1.0
    n_evals += 1
    h = min(x_end, 0.1 / omega, 0.05)

    eps = np.finfo(float).eps
    while x < x_end:
        h = min(h, x_end - x)
        if h < 32 * eps * max(abs(x), 1e-2):
            raise StepSizeUnderflowError(x)

        ay = y + h * _A21 * k1y
        ad = dy + h * _A21 * k1d
        k2y = ad
        k2d = coeff(x + _C2 * h) * ay

        ay = y + h * (_A31 * k1y + _A32 * k2y)
        ad = dy + h * (_A31 * k1d + _A32 * k2d)
        k3y = ad
        k3d = coeff(x + _C3 * h) * ay

        ay = y + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y)
        ad = dy + h * (_A41 * k1d + _A42 * k2d + _A43 * k3d)
        k4y = ad
        k4d = coeff(x + _C4 * h) * ay

        ay = y + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y)
        ad = dy + h * (_A51 * k1d + _A52 * k2d + _A53 * k3d + _A54 * k4d)
        k5y = ad
        k5d = coeff(x + _C5 * h) * ay

        ay = y + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y
                      + _A65 * k5y)
        ad = dy + h * (_A61 * k1d + _A62 * k2d + _A63 * k3d + _A64 * k4d
                       + _A65 * k5d)
        k6y = ad
        k6d = coeff(x + h) * ay

        y1 = y + h * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y
                      + _B6 * k6y)
        dy1 = dy + h * (_B1 * k1d + _B3 * k3d + _B4 * k4d + _B5 * k5d
                        + _B6 * k6d)
        # FSAL stage, also the error-estimate stage.
        k7y = dy1
        k7d = coeff(x + h) * y1
        n_evals += 6

        err_y = h * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y
                     + _E6 * k6y + _E7 * k7y)
        err_d = h * (_E1 * k1d + _E3 * k3d + _E4 * k4d + _E5 * k5d
                     + _E6 * k6d + _E7 * k7d)
        sy = atol_y + rtol * max(abs(y), abs(y1))
        sd = atol_dy + rtol * max(abs(dy), abs(dy1))
        try:
            err = math.sqrt(0.5 * ((err_y / sy) ** 2 + (err_d / sd) ** 2))
        except OverflowError:
            err = math.inf
        if not math.isfinite(err):
            err = math.inf

        if err <= 1.0:
            seg_x0.append(x)
            seg_h.append(h)
            seg_u0.append((y, dy))
            seg_k.append([(k1y, k1d), (k2y, k2d), (k3y, k3d), (k4y, k4d),
                          (k5y, k5d), (k6y, k6d), (k7y, k7d)])
            x += h
            y, dy = y1, dy1
            k1y, k1d = k7y, k7d
            node_x.append(x)
            node_y.append(y)
            node_dy.append(dy)
            n_steps += 1
            factor = _MAX_FACTOR if err == 0.0 else min(
                _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** -0.2))
        else:
            n_rejected += 1
            factor = _MIN_FACTOR if err == math.inf else max(
                _MIN_FACTOR, min(1.0, _SAFETY * err ** -0.2))
        h *= factor

    node_x[-1] = x_end  # guard against accumulated roundoff in x
    return Trajectory(
        xs=np.array(node_x),
        ys=scale * np.array(node_y),
        dys=scale * np.array(node_dy),
        n_steps=n_steps,
        n_rejected=n_rejected,
        n_evals=n_evals,
        tol=(rtol, atol_y, atol_dy),
        _seg_x0=np.array(seg_x0),
        _seg_h=np.array(seg_h),
        _seg_u0=np.array(seg_u0),
        _seg_k=np.array(seg_k),
        _scale=scale,
    )


def fundamental_pair(q, lam: float, x: float,
                     tol=DEFAULT_TOL) -> tuple[float, float, float, float]:
    """Both fundamental solutions at x: (y1, y1', y2, y2').

    y1 carries initial data (1, 0), y2 carries (0, 1).  Their Wronskian
    y1*y2' - y1'*y2 is identically 1.
    """
    if not 0 < x <= 1:
        raise ValueError(f"x must lie in (0, 1], got {x}")
    t1 = integrate_ivp(q, lam, x, y0=1.0, dy0=0.0, tol=tol)
    t2 = integrate_ivp(q, lam, x, y0=0.0, dy0=1.0, tol=tol)
    return t1.y_end, t1.dy_end, t2.y_end, t2.dy_end
