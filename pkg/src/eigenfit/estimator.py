"""Scikit-learn style front end for the reconstruction.

``PotentialReconstructor`` is a BaseEstimator: hyperparameters in
``__init__``, learning in ``fit``, learned state in trailing-underscore
attributes, so it clones, grid-searches and pickles like any other
estimator.  X rows are (sample point, eigenvalue) pairs, y holds the
slope-normalized eigenfunction samples; after fitting, ``predict``
evaluates the recovered potential.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .basis import Basis
from .forward import SampleSet
from .inversion import InversionOptions, invert
from .ode import DEFAULT_TOL

_FAMILIES = {
    "cosine-even": Basis.cosine_even,
    "trig-full": Basis.trig_full,
    "legendre": Basis.legendre,
}


class PotentialReconstructor(BaseEstimator):
    """Recover a potential expansion from one eigenfunction's samples.

    Parameters
    ----------
    basis : Basis, str or dict, default="cosine-even"
        A Basis instance, a family name ("cosine-even", "trig-full",
        "legendre" - sized to the number of samples at fit time), or a
        basis JSON descriptor.
    mode : int, default=1
        Index of the sampled eigenfunction.
    max_iter : int, default=10
        Iteration cap for the update loop.
    tol : float, default=1e-4
        Convergence threshold on the max-abs coefficient update.
    svd_cutoff : float, default=1e-6
        Singular values of the sample Jacobian below this are dropped.
    ivp_tol : tuple, default=(1e-10, 1e-10, 1e-11)
        (rtol, atol_y, atol_dy) for the forward integrations.

    Attributes
    ----------
    coef_ : ndarray of shape (n_samples,)
        Recovered expansion coefficients.
    basis_ : Basis
        The resolved basis actually used.
    report_ : InversionReport
        Full diagnostics of the run.
    converged_ : bool
    n_iter_ : int
    condition_number_ : float
    n_dropped_ : int

    Examples
    --------
    >>> import numpy as np
    >>> from eigenfit import PotentialReconstructor, sample_eigenfunction
    >>> samples = sample_eigenfunction(lambda x: 3.0, 1, [1.0])
    >>> X = np.column_stack([samples.points, samples.lams])
    >>> rec = PotentialReconstructor(basis="cosine-even").fit(X, samples.values)
    >>> bool(abs(rec.predict([[0.5]])[0] - 3.0) < 1e-6)
    True
    """

    def __init__(self, basis="cosine-even", mode: int = 1,
                 max_iter: int = 10, tol: float = 1e-4,
                 svd_cutoff: float = 1e-6, ivp_tol=DEFAULT_TOL):
        self.basis = basis
        self.mode = mode
        self.max_iter = max_iter
        self.tol = tol
        self.svd_cutoff = svd_cutoff
        self.ivp_tol = ivp_tol

    def _resolve_basis(self, n: int) -> Basis:
        if isinstance(self.basis, Basis):
            return self.basis
        if isinstance(self.basis, str):
            maker = _FAMILIES.get(self.basis)
            if maker is None:
                raise ValueError(
                    f"unknown basis family {self.basis!r}; expected one of "
                    f"{sorted(_FAMILIES)} or a Basis/descriptor")
            return maker(n)
        if isinstance(self.basis, dict):
            return Basis.from_json(self.basis)
        raise TypeError(f"cannot interpret basis={self.basis!r}")

    def fit(self, X, y):
        """Run the reconstruction on sample rows (x_j, lam_j) -> Y_j."""
        X = check_array(X, ensure_2d=True, dtype=float)
        y = check_array(y, ensure_2d=False, dtype=float).ravel()
        if X.shape[1] != 2:
            raise ValueError(f"X needs columns (point, eigenvalue); got "
                             f"shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y disagree on the number of samples")
        order = np.argsort(X[:, 0])
        samples = SampleSet(points=X[order, 0], lams=X[order, 1],
                            values=y[order], mode=self.mode)
        basis = self._resolve_basis(len(samples))
        options = InversionOptions(max_iter=self.max_iter, tol=self.tol,
                                   svd_cutoff=self.svd_cutoff,
                                   ivp_tol=tuple(self.ivp_tol))
        report = invert(samples, basis, options)
        self.report_ = report
        self.basis_ = basis
        self.coef_ = report.coefficients.copy()
        self.potential_ = report.potential
        self.converged_ = report.converged
        self.n_iter_ = report.n_iter
        self.condition_number_ = report.condition_number
        self.n_dropped_ = report.n_dropped
        return self

    def predict(self, X):
        """Evaluate the recovered potential at positions in [0, 1]."""
        check_is_fitted(self, "potential_")
        X = check_array(X, ensure_2d=False, dtype=float)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError("predict expects positions as a 1-D array "
                                 "or a single-column matrix")
            X = X[:, 0]
        return self.potential_(X)
