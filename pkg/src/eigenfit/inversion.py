"""Quasi-Newton reconstruction of the potential from eigenfunction samples.

The loop mirrors the classical scheme: estimate the potential's mean from the
eigenvalue's departure from the free value, shift it out, assemble the
frozen-kernel Jacobian once, then iterate coefficient updates
``delta = J^+ (data - model)`` with a fresh forward solve per sample row in
every iteration, and finally fold the mean back into the constant
coefficient.  Defaults (at most 10 iterations, update tolerance 1e-4,
singular-value cutoff 1e-6) are exposed in InversionOptions.

Non-convergence is not an exception: the report carries a flag so noisy
benchmark sweeps can aggregate outcomes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import Basis, Potential
from .errors import EigenfitError, InversionError
from .forward import SampleSet
from .ode import DEFAULT_TOL, integrate_ivp
from .sensitivity import build_jacobian, truncated_pinv


@dataclass(frozen=True)
class InversionOptions:
    max_iter: int = 10
    tol: float = 1e-4
    svd_cutoff: float = 1e-6
    ivp_tol: tuple[float, float, float] = DEFAULT_TOL

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol <= 0 or self.svd_cutoff <= 0:
            raise ValueError("tol and svd_cutoff must be positive")
        if any(t <= 0 for t in self.ivp_tol):
            raise ValueError("ivp_tol components must be positive")

    def to_json(self) -> dict:
        return {"max_iter": self.max_iter, "tol": self.tol,
                "svd_cutoff": self.svd_cutoff,
                "ivp_tol": list(self.ivp_tol)}

    @staticmethod
    def from_json(obj: dict) -> "InversionOptions":
        return InversionOptions(
            max_iter=int(obj.get("max_iter", 10)),
            tol=float(obj.get("tol", 1e-4)),
            svd_cutoff=float(obj.get("svd_cutoff", 1e-6)),
            ivp_tol=tuple(obj.get("ivp_tol", DEFAULT_TOL)))


@dataclass
class InversionReport:
    """Everything one reconstruction produced, diagnostics included."""

    potential: Potential
    mode: int
    qbar_shift: float
    n_iter: int
    delta_history: list[float]
    converged: bool
    singular_values: np.ndarray
    n_dropped: int
    condition_number: float
    sample_points: np.ndarray
    sample_lams: np.ndarray
    sample_values: np.ndarray
    sample_residuals: np.ndarray
    options: InversionOptions = field(default_factory=InversionOptions)

    @property
    def coefficients(self) -> np.ndarray:
        return self.potential.coef

    @property
    def basis(self) -> Basis:
        return self.potential.basis

    def samples(self) -> SampleSet:
        return SampleSet(points=self.sample_points, lams=self.sample_lams,
                         values=self.sample_values, mode=self.mode)

    def to_json(self) -> dict:
        return {
            "potential": self.potential.to_json(),
            "mode": self.mode,
            "qbar_shift": self.qbar_shift,
            "n_iter": self.n_iter,
            "delta_history": [float(d) for d in self.delta_history],
            "converged": self.converged,
            "singular_values": [float(s) for s in self.singular_values],
            "n_dropped": self.n_dropped,
            "condition_number": float(self.condition_number),
            "sample_points": [float(x) for x in self.sample_points],
            "sample_lams": [float(x) for x in self.sample_lams],
            "sample_values": [float(x) for x in self.sample_values],
            "sample_residuals": [float(x) for x in self.sample_residuals],
            "options": self.options.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "InversionReport":
        return InversionReport(
            potential=Potential.from_json(obj["potential"]),
            mode=int(obj["mode"]),
            qbar_shift=float(obj["qbar_shift"]),
            n_iter=int(obj["n_iter"]),
            delta_history=[float(d) for d in obj["delta_history"]],
            converged=bool(obj["converged"]),
            singular_values=np.asarray(obj["singular_values"], dtype=float),
            n_dropped=int(obj["n_dropped"]),
            condition_number=float(obj["condition_number"]),
            sample_points=np.asarray(obj["sample_points"], dtype=float),
            sample_lams=np.asarray(obj["sample_lams"], dtype=float),
            sample_values=np.asarray(obj["sample_values"], dtype=float),
            sample_residuals=np.asarray(obj["sample_residuals"],
                                        dtype=float),
            options=InversionOptions.from_json(obj.get("options", {})))

    def save_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def load_json(path) -> "InversionReport":
        with open(path, "r", encoding="utf-8") as fh:
            return InversionReport.from_json(json.load(fh))

    def reconstruction_csv(self, path, q_true=None, n_grid: int = 512):
        """Write the recovered (and optionally true) potential on a uniform
        grid."""
        x = np.linspace(0.0, 1.0, n_grid)
        rec = self.potential(x)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            if q_true is None:
                fh.write("x,q_rec\n")
                for xi, ri in zip(x, rec):
                    fh.write(f"{xi:.17g},{ri:.17g}\n")
            else:
                true = np.array([float(q_true(xi)) for xi in x])
                fh.write("x,q_rec,q_true\n")
                for xi, ri, ti in zip(x, rec, true):
                    fh.write(f"{xi:.17g},{ri:.17g},{ti:.17g}\n")


def _forward_samples(q, points, lams, ivp_tol) -> np.ndarray:
    """Model values y2(x_j, lam_j, q), one dense solve per distinct lam."""
    points = np.asarray(points, dtype=float)
    lams = np.asarray(lams, dtype=float)
    out = np.empty(len(points))
    for lam in np.unique(lams):
        idx = np.nonzero(lams == lam)[0]
        traj = integrate_ivp(q, lam, float(points[idx].max()),
                             y0=0.0, dy0=1.0, tol=ivp_tol)
        out[idx], _ = traj.eval(points[idx])
    return out


def residuals(samples: SampleSet, potential: Potential,
              ivp_tol=DEFAULT_TOL) -> np.ndarray:
    """data - model at the sample rows, using the unshifted eigenvalues and
    the full recovered potential."""
    model = _forward_samples(potential, samples.points, samples.lams,
                             ivp_tol)
    return samples.values - model


def invert(samples: SampleSet, basis: Basis,
           options: InversionOptions | None = None) -> InversionReport:
    """Recover an expansion of the potential from one mode's samples.

    Requires as many sample rows as basis functions and a basis whose first
    function is the constant (the mean estimate is folded into its
    coefficient).  Raises InversionError on rank collapse or a forward-solve
    failure; mere non-convergence only clears the report's flag.
    """
    opts = options or InversionOptions()
    n = basis.n
    if len(samples) != n:
        raise ValueError(f"{len(samples)} sample rows for a basis of size "
                         f"{n}; the system must be square")
    if not basis.has_constant_first:
        raise ValueError("inversion requires the constant function in "
                         "position 1 of the basis")
    basis.check_independent()

    k = samples.mode
    qbar = float(np.min(samples.lams)) - (k * math.pi) ** 2
    shifted = samples.lams - qbar

    jac = build_jacobian(samples.points, shifted, basis)
    pinv_mat, n_dropped = truncated_pinv(jac, opts.svd_cutoff)
    if n_dropped == n:
        raise InversionError(
            f"rank collapse: all {n} singular values below the cutoff "
            f"{opts.svd_cutoff:g}")

    coef = np.zeros(n)
    deltas: list[float] = []
    converged = False
    for it in range(1, opts.max_iter + 1):
        trial = Potential(basis, coef)
        try:
            model = _forward_samples(trial, samples.points, shifted,
                                     opts.ivp_tol)
        except EigenfitError as exc:
            raise InversionError(
                f"forward solve failed in iteration {it}: {exc}") from exc
        delta = pinv_mat @ (samples.values - model)
        coef = coef + delta
        step = float(np.max(np.abs(delta)))
        deltas.append(step)
        if step <= opts.tol:
            converged = True
            break

    coef[0] += qbar
    recovered = Potential(basis, coef)
    try:
        final_res = residuals(samples, recovered, opts.ivp_tol)
    except EigenfitError:
        # A diverged (non-converged) run can defeat the forward solve at
        # the recovered potential; deliver the flagged report regardless.
        final_res = np.full(n, np.nan)
    return InversionReport(
        potential=recovered,
        mode=k,
        qbar_shift=qbar,
        n_iter=len(deltas),
        delta_history=deltas,
        converged=converged,
        singular_values=jac.singular_values.copy(),
        n_dropped=n_dropped,
        condition_number=jac.condition_number,
        sample_points=samples.points.copy(),
        sample_lams=samples.lams.copy(),
        sample_values=samples.values.copy(),
        sample_residuals=final_res,
        options=opts,
    )
