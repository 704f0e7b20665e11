"""Lift one-dimensional plans back to the ambient space.

A 1D entry (a, b, m) between two projected measures spreads its mass over
the member atoms of the two classes in proportion to their weights:

    mass(i, j) = m * p_i * q_j / (P_a * Q_b)

for i in class a (source weight p_i, class mass P_a) and j in class b.
Summing over a class pair recovers m, so the lifted plan couples the
original measures whenever the 1D plan couples the projections.
"""

from __future__ import annotations

import numpy as np

from .errors import ClassMismatch, DimensionMismatch
from .measures import DiscreteMeasure, TransportPlan, plan_cost
from .slicing import (
    DEFAULT_GROUPING_TOL,
    OneDPlan,
    ProjectedMeasure,
    project,
    solve_1d,
)

# Lifted entries below this mass are dropped; their total is re-added
# proportionally to the surviving entries of the same 1D entry so the
# per-class-pair totals (and hence the marginals) are preserved.
MASS_FLOOR = 1e-15


def _check_projection(measure: DiscreteMeasure, proj: ProjectedMeasure, side: str) -> None:
    # Provenance sanity check: member count and per-atom weights must match.
    if proj.member_indices.shape[0] != len(measure) or not np.array_equal(
        proj.member_weights, measure.weights[proj.member_indices]
    ):
        raise ClassMismatch(f"{side} projection does not describe the {side} measure")


def lift(
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    proj_source: ProjectedMeasure,
    proj_target: ProjectedMeasure,
    plan1d: OneDPlan,
) -> TransportPlan:
    """Spread a 1D class plan over the member atoms of each class pair."""
    _check_projection(source, proj_source, "source")
    _check_projection(target, proj_target, "target")
    if int(plan1d.a.max()) >= proj_source.n_classes or int(plan1d.a.min()) < 0:
        raise ClassMismatch("1D plan references a missing source class")
    if int(plan1d.b.max()) >= proj_target.n_classes or int(plan1d.b.min()) < 0:
        raise ClassMismatch("1D plan references a missing target class")
    if proj_source.all_singletons and proj_target.all_singletons:
        i = proj_source.member_indices[plan1d.a]
        j = proj_target.member_indices[plan1d.b]
        return TransportPlan(len(source), len(target), i, j, plan1d.mass.copy())
    parts_i: list[np.ndarray] = []
    parts_j: list[np.ndarray] = []
    parts_m: list[np.ndarray] = []
    for a, b, m in zip(plan1d.a, plan1d.b, plan1d.mass):
        si, sw = proj_source.class_members(int(a))
        ti, tw = proj_target.class_members(int(b))
        denom = float(proj_source.class_masses[a]) * float(proj_target.class_masses[b])
        flat = (float(m) / denom) * np.outer(sw, tw).ravel()
        ii = np.repeat(si, ti.shape[0])
        jj = np.tile(ti, si.shape[0])
        keep = flat >= MASS_FLOOR
        if keep.any() and not keep.all():
            total = float(flat.sum())
            flat = flat[keep]
            flat = flat * (total / float(flat.sum()))
            ii = ii[keep]
            jj = jj[keep]
        parts_i.append(ii)
        parts_j.append(jj)
        parts_m.append(flat)
    return TransportPlan(
        len(source),
        len(target),
        np.concatenate(parts_i),
        np.concatenate(parts_j),
        np.concatenate(parts_m),
    )


def lift_for_direction(
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    direction,
    p: float = 2.0,
    grouping_tol: float = DEFAULT_GROUPING_TOL,
) -> tuple[TransportPlan, float]:
    """Project both measures onto a direction, solve in 1D, lift back.

    Returns the lifted plan together with its ambient cost
    ``plan_cost(plan, source, target, p)``, the slice's contribution to the
    sliced distance.
    """
    if source.dim != target.dim:
        raise DimensionMismatch("source and target dimensions differ")
    proj_source = project(source, direction, grouping_tol)
    proj_target = project(target, direction, grouping_tol)
    plan1d = solve_1d(proj_source, proj_target)
    plan = lift(source, target, proj_source, proj_target, plan1d)
    return plan, plan_cost(plan, source, target, p)
