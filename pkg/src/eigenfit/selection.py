"""Choosing between reconstructions and merging their best functions.

With the samples fixed, running the inversion under different bases gives
competing approximations; since each approximates the projection of the same
potential, the one with the larger L2 norm captures more of it and wins.
The merge step pools every (coefficient, function) pair across reports,
scores each function by the scale-invariant contribution
``|coefficient| * ||function||_L2``, and keeps the strongest distinct
functions as a new composite basis for a follow-up run.
"""

from __future__ import annotations

import numpy as np

from .basis import Basis, BasisFunction
from .inversion import InversionReport

NORM_TIE_TOL = 1e-6


def contribution(coefficient: float, function: BasisFunction) -> float:
    """Scale-invariant weight of one term: |d| * ||phi||_L2."""
    return abs(float(coefficient)) * function.l2_norm()


def _same_provenance(a: InversionReport, b: InversionReport) -> bool:
    return (a.mode == b.mode
            and a.sample_points.shape == b.sample_points.shape
            and np.allclose(a.sample_points, b.sample_points,
                            rtol=1e-12, atol=1e-14)
            and np.allclose(a.sample_lams, b.sample_lams,
                            rtol=1e-12, atol=1e-14)
            and np.allclose(a.sample_values, b.sample_values,
                            rtol=1e-12, atol=1e-14))


def rank_reconstructions(
        reports: list[InversionReport]) -> list[InversionReport]:
    """Reports sorted by decreasing recovered L2 norm.

    Norms equal within 1e-6 are ties, broken by the smaller final sample
    residual norm; the sort is stable throughout.  All reports must stem
    from the same samples, otherwise the norms are not comparable.
    """
    if len(reports) < 2:
        raise ValueError("ranking needs at least two reports")
    first = reports[0]
    for other in reports[1:]:
        if not _same_provenance(first, other):
            raise ValueError("reports were produced from different sample "
                             "sets; their norms are not comparable")
    norms = [r.potential.l2_norm() for r in reports]
    res = [float(np.linalg.norm(r.sample_residuals)) for r in reports]
    order = sorted(range(len(reports)), key=lambda i: -norms[i])
    # Re-sort tie groups (chained within NORM_TIE_TOL) by residual norm.
    ranked: list[int] = []
    i = 0
    while i < len(order):
        j = i + 1
        while (j < len(order)
               and norms[order[j - 1]] - norms[order[j]] <= NORM_TIE_TOL):
            j += 1
        group = sorted(order[i:j], key=lambda idx: res[idx])
        ranked.extend(group)
        i = j
    return [reports[i] for i in ranked]


def merge_top_functions(reports: list[InversionReport], m: int) -> Basis:
    """Composite basis of the m strongest distinct functions across reports.

    Functions are ranked by contribution; duplicates (the constant picked
    from two bases, say) count once, and the walk continues down the pooled
    ranking until m distinct functions are collected.  The constant is
    moved to position 1 when selected, ready for a re-run of the inversion.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    pool = []
    for r_idx, rep in enumerate(reports):
        for f_idx, (d, f) in enumerate(zip(rep.coefficients,
                                           rep.basis.functions)):
            pool.append((-contribution(d, f), r_idx, f_idx, f))
    pool.sort(key=lambda entry: entry[:3])
    selected: list[BasisFunction] = []
    for _, _, _, func in pool:
        if func not in selected:
            selected.append(func)
        if len(selected) == m:
            break
    if len(selected) < m:
        raise ValueError(f"only {len(selected)} distinct functions "
                         f"available, cannot select {m}")
    constants = [f for f in selected if f.kind == "const"]
    others = [f for f in selected if f.kind != "const"]
    return Basis.composite(constants + others)
