"""Dirichlet spectrum and eigenfunction sampling by shooting.

The k-th eigenvalue is the k-th root in lam of the boundary shot
``y2(1, lam, q)`` where y2 is the unit-initial-slope solution.  The solver
starts from the asymptotic location ``(k pi)^2 + mean(q)``, brackets a sign
change, bisects, polishes with secant steps, and certifies the mode index by
counting interior zeros of the eigenfunction (a mode-k eigenfunction has
exactly k - 1).  A failed certificate triggers a restart with a finer scan.

Sampled values are reported for the unit-slope normalization y'(0) = 1, so
they are directly comparable with y2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import BracketingError, ZeroCountError
from .ode import DEFAULT_TOL, Trajectory, integrate_ivp

DEFAULT_EIG_TOL = 1e-9
MEAN_QUAD_TOL = 1e-10
_PI_SQ = math.pi**2
_ZERO_COUNT_GRID = 10_000


@dataclass(frozen=True)
class EigenPair:
    """An indexed Dirichlet eigenvalue with its certification data."""

    mode: int
    lam: float
    boundary_residual: float
    zero_count: int
    asymptotic_residual: float

    def __post_init__(self):
        if self.zero_count != self.mode - 1:
            raise ZeroCountError(
                f"eigenfunction for mode {self.mode} has {self.zero_count} "
                f"interior zeros, expected {self.mode - 1}")


@dataclass
class SampleSet:
    """Rows (x_j, lam_j, Y_j) of slope-normalized eigenfunction samples."""

    points: np.ndarray
    lams: np.ndarray
    values: np.ndarray
    mode: int
    noise_sigma: float | None = None
    noise_seed: int | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).ravel()
        self.lams = np.asarray(self.lams, dtype=float).ravel()
        self.values = np.asarray(self.values, dtype=float).ravel()
        if not (len(self.points) == len(self.lams) == len(self.values)):
            raise ValueError("points, lams and values must share a length")
        if len(self.points) == 0:
            raise ValueError("empty sample set")
        if np.any(np.diff(self.points) <= 0):
            raise ValueError("sample points must be strictly increasing")
        if self.points[0] <= 0 or self.points[-1] > 1:
            raise ValueError("sample points must lie in (0, 1]")
        if not np.all(np.isfinite(self.lams)):
            raise ValueError("non-finite eigenvalue in sample set")
        if self.mode < 1:
            raise ValueError(f"mode must be >= 1, got {self.mode}")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def noisy(self) -> bool:
        return self.noise_sigma is not None

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("x,lambda,y,mode\n")
            for x, lam, y in zip(self.points, self.lams, self.values):
                fh.write(f"{x:.17g},{lam:.17g},{y:.17g},{self.mode}\n")

    @staticmethod
    def from_csv(path) -> "SampleSet":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "x,lambda,y,mode":
                raise ValueError(f"unexpected sample CSV header: {header!r}")
            rows = [line.strip().split(",") for line in fh if line.strip()]
        if not rows:
            raise ValueError(f"no sample rows in {path}")
        data = np.array([[float(c) for c in row[:3]] for row in rows])
        modes = {int(row[3]) for row in rows}
        if len(modes) != 1:
            raise ValueError(f"mixed mode indices in {path}: {sorted(modes)}")
        return SampleSet(points=data[:, 0], lams=data[:, 1],
                         values=data[:, 2], mode=modes.pop())


def boundary_shot(q, lam: float, ivp_tol=DEFAULT_TOL) -> float:
    """y2(1, lam, q); eigenvalues are the roots in lam."""
    return integrate_ivp(q, lam, 1.0, y0=0.0, dy0=1.0, tol=ivp_tol).y_end


def potential_mean(q, tol: float = MEAN_QUAD_TOL) -> float:
    """Integral of q over [0, 1] by adaptive quadrature."""
    return quadrature.integrate(quadrature.vectorized(q), 0.0, 1.0, tol=tol)


def _count_interior_zeros(traj: Trajectory) -> int:
    x = np.linspace(0.0, traj.x_end, _ZERO_COUNT_GRID + 2)[1:-1]
    y, _ = traj.eval(x)
    s = np.sign(y)
    s = s[s != 0.0]
    return int(np.sum(s[1:] != s[:-1]))


def eigenvalue(q, k: int, tol: float = DEFAULT_EIG_TOL,
               ivp_tol=DEFAULT_TOL) -> EigenPair:
    """The k-th Dirichlet eigenvalue, certified by interior zero count.

    ``tol`` bounds the boundary residual |y2(1, lam_k)| at the returned
    eigenvalue.  Raises BracketingError if no sign change is found in the
    expanded search window and ZeroCountError if certification keeps
    failing at the finest scan.
    """
    if k < 1:
        raise ValueError(f"mode index must be >= 1, got {k}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    mean_q = potential_mean(q)
    guess = (k * math.pi) ** 2 + mean_q

    shots: dict[float, float] = {}

    def shot(lam: float) -> float:
        if lam not in shots:
            shots[lam] = boundary_shot(q, lam, ivp_tol)
        return shots[lam]

    last_exc: Exception | None = None
    for step in (_PI_SQ, _PI_SQ / 4.0, _PI_SQ / 16.0):
        try:
            lo, hi = _bracket(shot, guess, step)
        except BracketingError as exc:
            last_exc = exc
            continue
        lam = _refine(shot, lo, hi, tol)
        traj = integrate_ivp(q, lam, 1.0, y0=0.0, dy0=1.0, tol=ivp_tol)
        zeros = _count_interior_zeros(traj)
        if zeros == k - 1:
            return EigenPair(mode=k, lam=lam,
                             boundary_residual=abs(traj.y_end),
                             zero_count=zeros,
                             asymptotic_residual=lam - (k * math.pi) ** 2
                             - mean_q)
        last_exc = ZeroCountError(
            f"root at lam={lam:.6g} has {zeros} interior zeros, "
            f"expected {k - 1}; rescanning with step {step / 4:.3g}")
    raise last_exc if last_exc is not None else BracketingError(
        f"eigenvalue search failed near {guess:.6g}")


def _bracket(shot, guess: float, step: float,
             max_expand: int = 8) -> tuple[float, float]:
    """Nearest sign-change interval around the asymptotic guess."""
    offsets = [0.0]
    for j in range(1, max_expand + 1):
        offsets.extend((j * step, -j * step))
    lams = sorted(guess + o for o in offsets)
    vals = [shot(lam) for lam in lams]
    best: tuple[float, float] | None = None
    best_dist = math.inf
    for (a, fa), (b, fb) in zip(zip(lams, vals), zip(lams[1:], vals[1:])):
        if fa == 0.0:
            return a, a
        if fa * fb < 0.0:
            dist = abs(0.5 * (a + b) - guess)
            if dist < best_dist:
                best, best_dist = (a, b), dist
    if vals[-1] == 0.0:
        return lams[-1], lams[-1]
    if best is None:
        raise BracketingError(
            f"no sign change of the boundary shot in "
            f"[{lams[0]:.6g}, {lams[-1]:.6g}] (step {step:.3g})")
    return best


def _refine(shot, lo: float, hi: float, tol: float,
            max_iter: int = 200) -> float:
    """Bisection to a narrow interval, then secant polishing on the
    boundary residual."""
    if lo == hi:
        return lo
    flo, fhi = shot(lo), shot(hi)
    width_goal = 1e-4 * max(1.0, abs(lo), abs(hi))
    while hi - lo > width_goal:
        mid = 0.5 * (lo + hi)
        fmid = shot(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    a, fa = lo, flo
    b, fb = hi, fhi
    for _ in range(max_iter):
        if abs(fb) <= tol:
            return b
        if fb == fa:
            break
        c = b - fb * (b - a) / (fb - fa)
        if not (lo - (hi - lo) <= c <= hi + (hi - lo)):
            c = 0.5 * (lo + hi)
        a, fa = b, fb
        b, fb = c, shot(c)
    if abs(fb) <= tol:
        return b
    if abs(fa) <= tol:
        return a
    raise BracketingError(
        f"residual polish stalled at |shot| = {abs(fb):.3e} > tol {tol:.1e}")


def sample_eigenfunction(q, k: int, points, noise=None,
                         tol: float = DEFAULT_EIG_TOL,
                         ivp_tol=DEFAULT_TOL) -> SampleSet:
    """Sample the slope-normalized mode-k eigenfunction at the points.

    ``noise``: optional (sigma, seed) pair; values become Y*(1 + sigma*eps)
    with standard-normal eps drawn reproducibly from the seed.
    """
    points = np.asarray(points, dtype=float).ravel()
    if points.size == 0:
        raise ValueError("no sample points given")
    if np.any(np.diff(points) <= 0) or points[0] <= 0 or points[-1] > 1:
        raise ValueError("points must be strictly increasing in (0, 1]")
    pair = eigenvalue(q, k, tol=tol, ivp_tol=ivp_tol)
    traj = integrate_ivp(q, pair.lam, float(points[-1]), y0=0.0, dy0=1.0,
                         tol=ivp_tol)
    values, _ = traj.eval(points)
    sigma = seed = None
    if noise is not None:
        sigma, seed = float(noise[0]), int(noise[1])
        rng = np.random.default_rng(seed)
        values = values * (1.0 + sigma * rng.standard_normal(len(values)))
    return SampleSet(points=points, lams=np.full(points.shape, pair.lam),
                     values=values, mode=k, noise_sigma=sigma,
                     noise_seed=seed)


def asymptotic_residual(q, k: int, tol: float = DEFAULT_EIG_TOL,
                        ivp_tol=DEFAULT_TOL) -> float:
    """lam_k(q) - (k pi)^2 - integral(q): the remainder term that shrinks
    with the mode index and caps how much high modes can tell us."""
    return eigenvalue(q, k, tol=tol, ivp_tol=ivp_tol).asymptotic_residual
