import json
import math

import numpy as np
import pytest

from eigenfit.basis import Basis, Potential, project
from eigenfit.errors import InversionError
from eigenfit.forward import SampleSet, sample_eigenfunction
from eigenfit.inversion import (InversionOptions, InversionReport, invert,
                                residuals)
from eigenfit.potentials import BUILTINS

PI = math.pi
BUMP = BUILTINS["gaussian-bump"]
EQUAL3 = [0.25, 0.5, 0.75]


def l2_distance(basis, coef_a, coef_b):
    d = np.asarray(coef_a) - np.asarray(coef_b)
    return math.sqrt(max(float(d @ basis.gram @ d), 0.0))


class TestInvertBasics:
    def test_constant_potential_single_sample(self):
        c = 2.7
        ss = sample_eigenfunction(lambda x: c, 1, [1.0])
        rep = invert(ss, Basis.cosine_even(1))
        assert rep.coefficients[0] == pytest.approx(c, abs=1e-6)
        assert rep.converged and rep.n_iter == 1
        assert rep.qbar_shift == pytest.approx(c, abs=1e-7)

    def test_gaussian_bump_tracks_projection(self):
        basis = Basis.cosine_even(3)
        ss = sample_eigenfunction(BUMP, 1, EQUAL3)
        rep = invert(ss, basis)
        proj = project(BUMP, basis)
        assert l2_distance(basis, rep.coefficients, proj.coef) <= 2e-2
        assert rep.converged

    def test_poly65_fixed_point(self):
        poly65 = BUILTINS["poly65"]
        basis = Basis.legendre(7)
        pts = np.arange(1, 8) / 8.0
        ss = sample_eigenfunction(poly65, 1, pts)
        rep = invert(ss, basis)
        proj = project(poly65, basis)
        assert rep.converged and rep.n_iter <= 10
        assert np.max(np.abs(rep.coefficients - proj.coef)) <= 1e-4

    def test_sin4pi_exact_in_trig_basis(self):
        ss = sample_eigenfunction(BUILTINS["sin4pi"], 1,
                                  [0.15, 0.45, 0.7, 0.9])
        rep = invert(ss, Basis.trig_full(4))
        assert rep.converged
        assert np.max(np.abs(rep.coefficients
                             - np.array([1.0, 0.0, 0.0, 0.5]))) <= 1e-4

    def test_monotone_delta_decrease_on_noiseless_runs(self):
        cases = [
            (BUILTINS["poly65"], Basis.legendre(7), np.arange(1, 8) / 8.0),
            (BUMP, Basis.cosine_even(3), EQUAL3),
            (BUILTINS["sin4pi"], Basis.trig_full(4), [0.15, 0.45, 0.7, 0.9]),
        ]
        for q, basis, pts in cases:
            rep = invert(sample_eigenfunction(q, 1, pts), basis)
            hist = rep.delta_history
            assert all(b <= a for a, b in zip(hist, hist[1:]))

    def test_shift_consistency(self):
        c = 3.0
        basis = Basis.cosine_even(3)
        base = invert(sample_eigenfunction(BUMP, 1, EQUAL3), basis)
        shifted = invert(sample_eigenfunction(
            lambda x: BUMP(x) + c, 1, EQUAL3), basis)
        diff = shifted.coefficients - base.coefficients
        assert diff[0] == pytest.approx(c, abs=1e-6)
        assert np.max(np.abs(diff[1:])) <= 1e-6

    def test_converged_iff_last_delta_below_tol(self):
        ss = sample_eigenfunction(BUMP, 1, EQUAL3)
        rep = invert(ss, Basis.cosine_even(3))
        assert rep.converged == (rep.delta_history[-1] <= rep.options.tol)
        assert rep.n_iter == len(rep.delta_history) <= rep.options.max_iter

    def test_residuals_small_when_converged(self):
        ss = sample_eigenfunction(BUMP, 1, EQUAL3)
        rep = invert(ss, Basis.cosine_even(3))
        assert np.max(np.abs(rep.sample_residuals)) <= 10 * rep.options.tol


class TestInvertEdgeCases:
    def test_non_convergence_is_flagged_not_raised(self):
        ss = sample_eigenfunction(BUMP, 1, EQUAL3)
        rep = invert(ss, Basis.cosine_even(3),
                     InversionOptions(max_iter=1))
        assert not rep.converged
        assert rep.n_iter == 1

    def test_rank_collapse_raises(self):
        ss = sample_eigenfunction(BUMP, 1, EQUAL3)
        with pytest.raises(InversionError, match="rank collapse"):
            invert(ss, Basis.cosine_even(3),
                   InversionOptions(svd_cutoff=1.0))

    def test_near_degenerate_points_flagged_with_drop(self):
        pts = [0.5, 0.5 + 1e-7, 0.8]
        ss = sample_eigenfunction(BUMP, 1, pts)
        rep = invert(ss, Basis.cosine_even(3))
        assert rep.n_dropped >= 1
        assert np.all(np.isfinite(rep.coefficients))
        assert rep.singular_values[-1] < 1e-6

    def test_noisy_samples_return_report(self):
        ss = sample_eigenfunction(BUMP, 1, EQUAL3, noise=(1e-3, 11))
        rep = invert(ss, Basis.cosine_even(3))
        assert np.all(np.isfinite(rep.coefficients))

    def test_dimension_mismatch(self):
        ss = sample_eigenfunction(BUMP, 1, EQUAL3)
        with pytest.raises(ValueError, match="square"):
            invert(ss, Basis.cosine_even(4))

    def test_constant_must_lead(self):
        from eigenfit.basis import BasisFunction
        ss = sample_eigenfunction(BUMP, 1, [0.4, 0.8])
        bad = Basis.composite([BasisFunction.legendre(1),
                               BasisFunction.const()])
        with pytest.raises(ValueError, match="constant"):
            invert(ss, bad)

    def test_options_validation(self):
        with pytest.raises(ValueError):
            InversionOptions(max_iter=0)
        with pytest.raises(ValueError):
            InversionOptions(tol=-1e-4)
        with pytest.raises(ValueError):
            InversionOptions(ivp_tol=(1e-10, 0.0, 1e-11))


class TestResiduals:
    def test_zero_against_zero(self):
        ss = sample_eigenfunction(lambda x: 0.0, 1, EQUAL3)
        p = Potential(Basis.cosine_even(3), [0.0, 0.0, 0.0])
        assert residuals(ss, p) == pytest.approx([0.0] * 3, abs=1e-9)

    def test_exact_synthesizing_potential(self):
        basis = Basis.trig_full(4)
        p = Potential(basis, [1.0, 0.0, 0.0, 0.5])
        ss = sample_eigenfunction(p, 1, [0.15, 0.45, 0.7, 0.9])
        assert np.max(np.abs(residuals(ss, p))) <= 1e-7

    def test_reconstruction_residuals_at_samples(self):
        ss = sample_eigenfunction(BUMP, 1, EQUAL3)
        rep = invert(ss, Basis.cosine_even(3))
        assert np.max(np.abs(residuals(ss, rep.potential))) <= 1e-4


class TestReportSerialization:
    @pytest.fixture()
    def report(self):
        ss = sample_eigenfunction(BUMP, 1, EQUAL3)
        return invert(ss, Basis.cosine_even(3))

    def test_json_round_trip(self, report, tmp_path):
        path = tmp_path / "report.json"
        report.save_json(path)
        back = InversionReport.load_json(path)
        assert back.coefficients == pytest.approx(report.coefficients)
        assert back.basis == report.basis
        assert back.converged == report.converged
        assert back.mode == report.mode
        assert back.delta_history == pytest.approx(report.delta_history)
        assert back.singular_values == pytest.approx(
            report.singular_values)
        assert back.sample_points == pytest.approx(report.sample_points)
        assert back.options.tol == report.options.tol

    def test_json_is_stable_and_sorted(self, report, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        report.save_json(p1)
        report.save_json(p2)
        assert p1.read_bytes() == p2.read_bytes()
        keys = list(json.loads(p1.read_text()))
        assert keys == sorted(keys)

    def test_reconstruction_csv(self, report, tmp_path):
        path = tmp_path / "rec.csv"
        report.reconstruction_csv(path, q_true=BUMP)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,q_rec,q_true"
        assert len(lines) == 513
        first = [float(v) for v in lines[1].split(",")]
        assert first[0] == 0.0
        last = [float(v) for v in lines[-1].split(",")]
        assert last[0] == 1.0
        x = np.array([float(l.split(",")[0]) for l in lines[1:]])
        rec = np.array([float(l.split(",")[1]) for l in lines[1:]])
        assert rec == pytest.approx(report.potential(x), abs=1e-12)

    def test_reconstruction_csv_without_truth(self, report, tmp_path):
        path = tmp_path / "rec.csv"
        report.reconstruction_csv(path)
        assert path.read_text().splitlines()[0] == "x,q_rec"

    def test_samples_accessor(self, report):
        ss = report.samples()
        assert isinstance(ss, SampleSet)
        assert np.array_equal(ss.points, report.sample_points)
