"""Two-panel SVG result figure.

Left panel: the true potential (when known) against its reconstruction.
Right panel: the sampled eigenfunction with asterisk markers at the sample
points.  The SVG metadata date is suppressed so repeated runs are
byte-stable.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "eigenfit"   # reproducible element ids

import matplotlib.pyplot as plt
import numpy as np

from .inversion import InversionReport
from .ode import integrate_ivp


def save_reconstruction_figure(path, report: InversionReport, q_true=None,
                               n_grid: int = 512):
    """Write the standard two-panel figure for one reconstruction."""
    x = np.linspace(0.0, 1.0, n_grid)
    rec = report.potential(x)

    lam = float(report.sample_lams[0])
    traj = integrate_ivp(report.potential, lam, 1.0, y0=0.0, dy0=1.0,
                         tol=report.options.ivp_tol)
    eig, _ = traj.eval(x)

    fig, (ax_pot, ax_eig) = plt.subplots(1, 2, figsize=(9.6, 3.8))
    if q_true is not None:
        ax_pot.plot(x, [float(q_true(xi)) for xi in x], "k--",
                    label="potential")
        ax_pot.plot(x, rec, "b-", label="reconstruction")
        ax_pot.legend(loc="best", fontsize=8)
    else:
        ax_pot.plot(x, rec, "b-", label="reconstruction")
        ax_pot.legend(loc="best", fontsize=8)
    ax_pot.set_xlabel("x")
    ax_pot.set_title("potential and reconstruction", fontsize=10)

    ax_eig.plot(x, eig, "b-")
    ax_eig.plot(report.sample_points, report.sample_values, "k*",
                markersize=9)
    ax_eig.set_xlabel("x")
    ax_eig.set_title(f"sampled eigenfunction (mode {report.mode})",
                     fontsize=10)

    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
