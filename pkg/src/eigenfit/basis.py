"""Finite expansion spaces for the potential.

A Basis is an ordered family of real functions on [0, 1] drawn from three
stock families (even cosines, a full trigonometric system, shifted Legendre
polynomials) or assembled explicitly as a composite.  Projections and norms
go through the Gram matrix: the shipped bases are orthogonal but not
orthonormal, so the honest L2 norm of an expansion is sqrt(d' G d), not the
Euclidean norm of the coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import quadrature
from .errors import SingularBasisError

GRAM_QUAD_TOL = 1e-10
MIN_GRAM_EIGENVALUE = 1e-12

_TWO_PI = 2.0 * math.pi


def _legendre(degree: int, u):
    """P_degree(u) by the three-term recurrence, vectorized in u."""
    u = np.asarray(u, dtype=float)
    if degree == 0:
        return np.ones_like(u)
    p_prev = np.ones_like(u)
    p = u.copy()
    for l in range(1, degree):
        p, p_prev = ((2 * l + 1) * u * p - l * p_prev) / (l + 1), p
    return p


@dataclass(frozen=True)
class BasisFunction:
    """One expansion function, identified symbolically by family + parameter.

    kinds: "const" (identically 1), "cos"/"sin" with frequency multiplier m
    (cos(2 pi m x), sin(2 pi m x)), "legendre" with degree d (P_d(2x - 1)).
    Degenerate parameters (cos m=0, legendre degree 0) normalize to "const",
    so symbolic equality doubles as functional identity.
    """

    kind: str
    param: int = 0

    def __post_init__(self):
        if self.kind not in ("const", "cos", "sin", "legendre"):
            raise ValueError(f"unknown basis function kind {self.kind!r}")
        if self.kind in ("cos", "sin") and self.param < 1:
            raise ValueError(f"{self.kind} needs frequency m >= 1")
        if self.kind == "legendre" and self.param < 1:
            raise ValueError("legendre needs degree >= 1; use const for P0")
        if self.kind == "const" and self.param != 0:
            raise ValueError("const takes no parameter")

    @staticmethod
    def const() -> "BasisFunction":
        return BasisFunction("const", 0)

    @staticmethod
    def cos(m: int) -> "BasisFunction":
        return BasisFunction.const() if m == 0 else BasisFunction("cos", m)

    @staticmethod
    def sin(m: int) -> "BasisFunction":
        return BasisFunction("sin", m)

    @staticmethod
    def legendre(degree: int) -> "BasisFunction":
        if degree == 0:
            return BasisFunction.const()
        return BasisFunction("legendre", degree)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "const":
            return np.ones_like(x)
        if self.kind == "cos":
            return np.cos(_TWO_PI * self.param * x)
        if self.kind == "sin":
            return np.sin(_TWO_PI * self.param * x)
        return _legendre(self.param, 2.0 * x - 1.0)

    @property
    def label(self) -> str:
        if self.kind == "const":
            return "1"
        if self.kind == "cos":
            return f"cos({2 * self.param}*pi*x)"
        if self.kind == "sin":
            return f"sin({2 * self.param}*pi*x)"
        return f"P{self.param}(2x-1)"

    @property
    def roughness(self) -> int:
        """Crude oscillation scale used to seed quadrature panels."""
        return self.param if self.kind != "const" else 0

    def l2_norm(self) -> float:
        """Exact L2([0,1]) norm of the function."""
        if self.kind == "const":
            return 1.0
        if self.kind in ("cos", "sin"):
            return math.sqrt(0.5)
        return math.sqrt(1.0 / (2 * self.param + 1))

    def to_json(self) -> dict:
        if self.kind == "const":
            return {"kind": "const"}
        if self.kind == "legendre":
            return {"kind": "legendre", "degree": self.param}
        return {"kind": self.kind, "m": self.param}

    @staticmethod
    def from_json(obj: dict) -> "BasisFunction":
        kind = obj.get("kind")
        if kind == "const":
            return BasisFunction.const()
        if kind == "legendre":
            return BasisFunction.legendre(int(obj["degree"]))
        if kind in ("cos", "sin"):
            m = int(obj["m"])
            return BasisFunction.cos(m) if kind == "cos" \
                else BasisFunction.sin(m)
        raise ValueError(f"bad basis function descriptor: {obj!r}")


class Basis:
    """Ordered, immutable family of expansion functions with Gram data.

    Instances are safe to share across threads: the only mutation is the
    lazily cached Gram matrix, and recomputing it concurrently is benign.
    """

    def __init__(self, functions: Iterable[BasisFunction],
                 family: str = "composite"):
        self.functions: tuple[BasisFunction, ...] = tuple(functions)
        self.family = family
        if not self.functions:
            raise ValueError("basis needs at least one function")
        if len(set(self.functions)) != len(self.functions):
            raise ValueError("basis contains duplicate functions")
        self._gram: np.ndarray | None = None

    # -- stock families -------------------------------------------------

    @classmethod
    def cosine_even(cls, n: int) -> "Basis":
        """{1, cos(2 pi x), cos(4 pi x), ...} - for even potentials."""
        _check_size(n)
        return cls([BasisFunction.cos(l) for l in range(n)], "cosine-even")

    @classmethod
    def trig_full(cls, n: int) -> "Basis":
        """{1, sin(2 pi x), cos(2 pi x), sin(4 pi x), cos(4 pi x), ...}."""
        _check_size(n)
        funcs = [BasisFunction.const()]
        m = 1
        while len(funcs) < n:
            funcs.append(BasisFunction.sin(m))
            if len(funcs) < n:
                funcs.append(BasisFunction.cos(m))
            m += 1
        return cls(funcs, "trig-full")

    @classmethod
    def legendre(cls, n: int) -> "Basis":
        """Shifted Legendre polynomials P_0(2x-1) .. P_{n-1}(2x-1)."""
        _check_size(n)
        return cls([BasisFunction.legendre(l) for l in range(n)], "legendre")

    @classmethod
    def legendre_even(cls, n: int) -> "Basis":
        """Even-degree shifted Legendre polynomials P_0, P_2, ..."""
        _check_size(n)
        return cls([BasisFunction.legendre(2 * l) for l in range(n)])

    @classmethod
    def composite(cls, functions: Sequence[BasisFunction]) -> "Basis":
        return cls(functions)

    # -- structure ------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.functions)

    @property
    def has_constant_first(self) -> bool:
        return self.functions[0].kind == "const"

    def __eq__(self, other) -> bool:
        return isinstance(other, Basis) and self.functions == other.functions

    def __hash__(self) -> int:
        return hash(self.functions)

    def __repr__(self) -> str:
        inner = ", ".join(f.label for f in self.functions)
        return f"Basis[{self.family}]({inner})"

    # -- numerics -------------------------------------------------------

    def eval_matrix(self, x) -> np.ndarray:
        """Matrix of function values, shape (len(x), n)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.column_stack([f(x) for f in self.functions])

    @property
    def gram(self) -> np.ndarray:
        """Gram matrix G_lm = integral of phi_l phi_m over [0,1]."""
        if self._gram is None:
            n = self.n
            g = np.empty((n, n))
            for l in range(n):
                for m in range(l, n):
                    fl, fm = self.functions[l], self.functions[m]
                    panels = 2 * (fl.roughness + fm.roughness) + 1
                    val = quadrature.integrate(
                        lambda x: fl(x) * fm(x), 0.0, 1.0,
                        tol=GRAM_QUAD_TOL, min_panels=panels)
                    g[l, m] = g[m, l] = val
            self._gram = g
        return self._gram

    @property
    def gram_min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.gram)[0])

    def check_independent(self):
        """Raise SingularBasisError unless the Gram matrix is safely
        positive definite."""
        smallest = self.gram_min_eigenvalue
        if smallest <= MIN_GRAM_EIGENVALUE:
            raise SingularBasisError(
                f"basis is numerically dependent: smallest Gram eigenvalue "
                f"{smallest:.3e} <= {MIN_GRAM_EIGENVALUE:.0e}")

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        if self.family in ("cosine-even", "trig-full", "legendre"):
            return {"family": self.family, "n": self.n}
        return {"family": "composite",
                "functions": [f.to_json() for f in self.functions]}

    @staticmethod
    def from_json(obj: dict) -> "Basis":
        family = obj.get("family")
        if family == "cosine-even":
            return Basis.cosine_even(int(obj["n"]))
        if family == "trig-full":
            return Basis.trig_full(int(obj["n"]))
        if family == "legendre":
            return Basis.legendre(int(obj["n"]))
        if family == "composite":
            funcs = [BasisFunction.from_json(f) for f in obj["functions"]]
            return Basis.composite(funcs)
        raise ValueError(f"unknown basis family {family!r}")


def _check_size(n: int):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"basis size must be a positive integer, got {n!r}")


class Potential:
    """A potential expanded in a basis: q(x) = sum_l coef_l phi_l(x)."""

    def __init__(self, basis: Basis, coef):
        coef = np.asarray(coef, dtype=float).ravel()
        if coef.size != basis.n:
            raise ValueError(f"{coef.size} coefficients for a basis of "
                             f"size {basis.n}")
        self.basis = basis
        self.coef = coef

    def __call__(self, x):
        scalar = np.isscalar(x) or getattr(x, "ndim", 1) == 0
        values = self.basis.eval_matrix(x) @ self.coef
        return float(values[0]) if scalar else values

    def l2_norm(self) -> float:
        g = self.basis.gram
        return math.sqrt(max(float(self.coef @ g @ self.coef), 0.0))

    def mean(self) -> float:
        """Integral over [0,1] (= inner product with the constant 1)."""
        ips = np.array([quadrature.integrate(
            f, 0.0, 1.0, tol=GRAM_QUAD_TOL,
            min_panels=2 * f.roughness + 1) for f in self.basis.functions])
        return float(self.coef @ ips)

    def __repr__(self) -> str:
        terms = ", ".join(f"{c:+.4g}*{f.label}"
                          for c, f in zip(self.coef, self.basis.functions))
        return f"Potential({terms})"

    def to_json(self) -> dict:
        return {"basis": self.basis.to_json(),
                "coefficients": [float(c) for c in self.coef]}

    @staticmethod
    def from_json(obj: dict) -> "Potential":
        return Potential(Basis.from_json(obj["basis"]), obj["coefficients"])


def project(f: Callable, basis: Basis, tol: float = GRAM_QUAD_TOL) -> Potential:
    """L2-orthogonal projection of f onto the span of the basis.

    Solves G d = b with b_l = integral of f phi_l; all integrals by adaptive
    quadrature.  Raises SingularBasisError for a numerically dependent basis.
    """
    basis.check_independent()
    fv = quadrature.vectorized(f)
    b = np.empty(basis.n)
    for l, phi in enumerate(basis.functions):
        b[l] = quadrature.integrate(
            lambda x: fv(x) * phi(x), 0.0, 1.0,
            tol=tol, min_panels=4 * phi.roughness + 4)
    d = np.linalg.solve(basis.gram, b)
    return Potential(basis, d)
