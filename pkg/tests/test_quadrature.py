import math

import numpy as np
import pytest

from eigenfit.errors import QuadratureError
from eigenfit.quadrature import integrate, oscillation_panels, vectorized

from oracles import simpson


class TestIntegrate:
    def test_polynomial_is_exact(self):
        val = integrate(lambda x: 3 * x**2 - x + 1, 0.0, 2.0, tol=1e-12)
        assert val == pytest.approx(8 - 2 + 2, abs=1e-12)

    def test_sine_closed_form(self):
        val = integrate(np.sin, 0.0, math.pi, tol=1e-12)
        assert val == pytest.approx(2.0, abs=1e-12)

    def test_gaussian_against_simpson_oracle(self):
        f = lambda x: np.exp(-20.0 * (x - 0.5) ** 2)
        ref = simpson(f, 0.0, 1.0, 100_000)
        assert integrate(f, 0.0, 1.0, tol=1e-12) == pytest.approx(
            ref, abs=1e-11)

    def test_oscillatory_with_seeded_panels(self):
        lam = 987.0
        w = math.sqrt(lam)
        f = lambda t: np.sin(w * t) * np.sin(w * (1.0 - t))
        ref = simpson(f, 0.0, 1.0, 100_000)
        val = integrate(f, 0.0, 1.0, tol=1e-12,
                        min_panels=oscillation_panels(lam))
        assert val == pytest.approx(ref, abs=1e-11)

    def test_empty_interval(self):
        assert integrate(np.sin, 0.3, 0.3) == 0.0

    def test_invalid_limits_and_tol(self):
        with pytest.raises(ValueError):
            integrate(np.sin, 1.0, 0.0)
        with pytest.raises(ValueError):
            integrate(np.sin, 0.0, 1.0, tol=0.0)

    def test_panel_budget_exhaustion(self):
        # Violent oscillation near 0 cannot meet 1e-14 within 8 panels.
        f = lambda x: np.sin(1.0 / (x + 1e-4))
        with pytest.raises(QuadratureError):
            integrate(f, 0.0, 1.0, tol=1e-14, max_panels=8)

    def test_non_vector_integrand_reported(self):
        with pytest.raises(QuadratureError, match="shape"):
            integrate(lambda x: 1.0, 0.0, 1.0)


class TestVectorized:
    def test_numpy_callable_passes_through(self):
        f = lambda x: np.cos(x)
        assert vectorized(f) is f

    def test_scalar_only_callable_is_wrapped(self):
        f = lambda x: math.exp(x)
        g = vectorized(f)
        out = g(np.array([0.0, 1.0]))
        assert out == pytest.approx([1.0, math.e])

    def test_wrapped_usable_in_integrate(self):
        g = vectorized(lambda x: math.sin(x))
        assert integrate(g, 0.0, math.pi, tol=1e-10) == pytest.approx(
            2.0, abs=1e-10)


class TestOscillationPanels:
    def test_unit_interval_count(self):
        assert oscillation_panels(math.pi**2) == 8 * 4
        assert oscillation_panels((2 * math.pi) ** 2) == 8 * 7

    def test_scales_with_length(self):
        full = oscillation_panels(math.pi**2, 1.0)
        half = oscillation_panels(math.pi**2, 0.5)
        assert half == math.ceil(full / 2)

    def test_floor_for_small_lam(self):
        assert oscillation_panels(0.0) == 8
        assert oscillation_panels(-5.0, 0.01) >= 1
