import numpy as np

from eigenfit.basis import Basis
from eigenfit.figures import save_reconstruction_figure
from eigenfit.forward import sample_eigenfunction
from eigenfit.inversion import invert
from eigenfit.potentials import BUILTINS

BUMP = BUILTINS["gaussian-bump"]


def make_report():
    ss = sample_eigenfunction(BUMP, 1, [0.25, 0.5, 0.75])
    return invert(ss, Basis.cosine_even(3))


class TestReconstructionFigure:
    def test_two_panel_svg(self, tmp_path):
        report = make_report()
        path = tmp_path / "fig.svg"
        save_reconstruction_figure(path, report, q_true=BUMP)
        text = path.read_text()
        assert text.lstrip().startswith("<?xml")
        assert "<svg" in text
        assert text.count('id="axes_') == 2          # two panels
        assert "sampled eigenfunction (mode 1)" in text

    def test_without_truth_curve(self, tmp_path):
        report = make_report()
        path = tmp_path / "fig.svg"
        save_reconstruction_figure(path, report)
        assert "<svg" in path.read_text()

    def test_byte_deterministic(self, tmp_path):
        report = make_report()
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        save_reconstruction_figure(a, report, q_true=BUMP)
        save_reconstruction_figure(b, report, q_true=BUMP)
        assert a.read_bytes() == b.read_bytes()

    def test_marker_count_matches_samples(self, tmp_path):
        report = make_report()
        path = tmp_path / "fig.svg"
        save_reconstruction_figure(path, report, q_true=BUMP)
        text = path.read_text()
        # the sample markers render as one <use> per point in a marker group
        assert np.sum(report.sample_points.size) == 3
        assert text.count("#m") >= 3
