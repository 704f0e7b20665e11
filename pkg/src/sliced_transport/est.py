"""Averaging lifted plans over a set of directions.

The sliced plan is the weighted average of the per-direction lifted plans,
and the sliced distance is the weighted power mean of the per-direction
costs:

    plan  = sum_l  w_l * plan_l
    dist  = (sum_l w_l * cost_l**p) ** (1/p)

With uniform weights this Monte-Carlo averages over directions; a
temperature tau reweights directions by a softmax of -tau * cost_l**p,
which interpolates between the uniform average (tau = 0) and the single
cheapest direction (tau -> infinity).

Aggregation is a single-threaded deterministic fold: contributions are
merged on (i, j) keys in slice order, then summed left to right per key,
so results are reproducible bit for bit regardless of how many worker
threads computed the per-slice plans.  The EST_THREADS environment
variable (or the ``threads`` argument) caps that worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, TransportError
from .lifting import lift_for_direction
from .measures import DiscreteMeasure, TransportPlan, _readonly
from .slicing import DEFAULT_GROUPING_TOL, UNIT_TOL

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SliceSet:
    """A finite set of unit directions with nonnegative weights summing to 1."""

    directions: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        directions = np.array(self.directions, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if directions.ndim != 2 or directions.shape[0] < 1:
            raise DimensionMismatch("directions must form an (L, d) array")
        if weights.shape != (directions.shape[0],):
            raise DimensionMismatch("need one weight per direction")
        norms = np.linalg.norm(directions, axis=1)
        if float(np.max(np.abs(norms - 1.0))) > UNIT_TOL:
            raise TransportError("every direction must be unit length within 1e-12")
        if np.any(weights < 0):
            raise TransportError("slice weights must be nonnegative")
        if abs(float(weights.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise TransportError("slice weights must sum to 1 within 1e-12")
        object.__setattr__(self, "directions", _readonly(directions))
        object.__setattr__(self, "weights", _readonly(weights))

    def __len__(self) -> int:
        return self.directions.shape[0]

    @classmethod
    def uniform(cls, directions) -> "SliceSet":
        directions = np.asarray(directions, dtype=float)
        count = directions.shape[0]
        return cls(directions, np.full(count, 1.0 / count))


@dataclass(frozen=True, eq=False)
class EstResult:
    """Output of a sliced-transport computation.

    ``distance ** p`` equals the weighted sum of ``per_slice_costs ** p``;
    the costs themselves are reported rooted (not as p-th powers).
    """

    plan: TransportPlan
    distance: float
    per_slice_costs: np.ndarray
    slice_weights: np.ndarray


def _resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    raw = os.environ.get("EST_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _per_slice(
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    directions: np.ndarray,
    p: float,
    grouping_tol: float,
    threads: int | None,
) -> list[tuple[TransportPlan, float]]:
    """Lift along every direction, results in direction order."""
    workers = _resolve_threads(threads)

    def one(k: int) -> tuple[TransportPlan, float]:
        return lift_for_direction(source, target, directions[k], p, grouping_tol)

    count = directions.shape[0]
    if workers == 1 or count == 1:
        return [one(k) for k in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(count)))


def _merge(
    plans: list[TransportPlan],
    weights: np.ndarray,
    source_size: int,
    target_size: int,
) -> TransportPlan:
    """Weighted merge of sparse plans on (i, j) keys, slice order first."""
    keys_parts: list[np.ndarray] = []
    mass_parts: list[np.ndarray] = []
    for weight, plan in zip(weights, plans):
        w = float(weight)
        if w == 0.0:
            continue
        keys_parts.append(plan.i * target_size + plan.j)
        mass_parts.append(w * plan.mass)
    keys = np.concatenate(keys_parts)
    mass = np.concatenate(mass_parts)
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    mass = mass[order]
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    merged = np.add.reduceat(mass, starts)
    uniq = keys[starts]
    return TransportPlan(
        source_size, target_size, uniq // target_size, uniq % target_size, merged
    )


def _fold_distance(weights: np.ndarray, costs: np.ndarray, p: float) -> float:
    total = 0.0
    for w, c in zip(weights, costs):
        total += float(w) * float(c) ** p
    return max(total, 0.0) ** (1.0 / p)


def est_plan(
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    slices: SliceSet,
    p: float = 2.0,
    grouping_tol: float = DEFAULT_GROUPING_TOL,
    threads: int | None = None,
) -> EstResult:
    """Average the lifted plans over a weighted slice set.

    Parameters
    ----------
    source, target : DiscreteMeasure
        Measures of equal dimension.
    slices : SliceSet
        Directions and weights to average over.
    p : float
        Cost exponent, > 1.
    grouping_tol : float
        Relative projection-grouping tolerance (see :mod:`slicing`).
    threads : int or None
        Worker threads for the per-slice work; defaults to EST_THREADS or 1.
        Results do not depend on the worker count.
    """
    if source.dim != target.dim:
        raise DimensionMismatch("source and target dimensions differ")
    if slices.directions.shape[1] != source.dim:
        raise DimensionMismatch("slice directions do not match the measure dimension")
    per = _per_slice(source, target, slices.directions, p, grouping_tol, threads)
    costs = np.asarray([c for _, c in per], dtype=float)
    plan = _merge([pl for pl, _ in per], slices.weights, len(source), len(target))
    distance = _fold_distance(slices.weights, costs, p)
    return EstResult(plan, distance, costs, np.array(slices.weights))


def sigma_tau_weights(costs_pth_power, tau: float) -> np.ndarray:
    """Softmax slice weights exp(-tau * c) / sum, computed stably.

    ``costs_pth_power`` holds the per-slice costs already raised to the
    p-th power.  The minimum cost is subtracted before exponentiation, so
    tau = 0 yields exactly the uniform vector 1/L and a large tau exactly
    the one-hot vector at the argmin.
    """
    costs = np.asarray(costs_pth_power, dtype=float)
    if costs.ndim != 1 or costs.shape[0] < 1:
        raise TransportError("need a nonempty cost vector")
    if not np.all(np.isfinite(costs)):
        raise TransportError("per-slice costs must be finite")
    if tau < 0:
        raise TransportError("temperature must be nonnegative")
    z = np.exp(-tau * (costs - costs.min()))
    return z / float(z.sum())


def est_plan_tempered(
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    directions,
    p: float = 2.0,
    tau: float = 0.0,
    grouping_tol: float = DEFAULT_GROUPING_TOL,
    threads: int | None = None,
) -> EstResult:
    """Sliced plan under the temperature-softened direction weights.

    Two passes over one set of cached per-slice plans: the first computes
    the per-slice costs that define the softmax weights, the second merges
    the cached plans under those weights.  tau = 0 reproduces
    :func:`est_plan` with uniform weights bit for bit.
    """
    directions = np.asarray(directions, dtype=float)
    if source.dim != target.dim:
        raise DimensionMismatch("source and target dimensions differ")
    if directions.ndim != 2 or directions.shape[1] != source.dim:
        raise DimensionMismatch("slice directions do not match the measure dimension")
    per = _per_slice(source, target, directions, p, grouping_tol, threads)
    costs = np.asarray([c for _, c in per], dtype=float)
    weights = sigma_tau_weights(costs**p, tau)
    plan = _merge([pl for pl, _ in per], weights, len(source), len(target))
    distance = _fold_distance(weights, costs, p)
    return EstResult(plan, distance, costs, weights)


def min_swgg(
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    directions,
    p: float = 2.0,
    grouping_tol: float = DEFAULT_GROUPING_TOL,
    threads: int | None = None,
) -> tuple[int, TransportPlan, float]:
    """Cheapest single slice: index, lifted plan, and cost.

    Ties break toward the lowest slice index.  Equals the tau -> infinity
    limit of the tempered plan when the minimum cost is unique.
    """
    directions = np.asarray(directions, dtype=float)
    if source.dim != target.dim:
        raise DimensionMismatch("source and target dimensions differ")
    if directions.ndim != 2 or directions.shape[1] != source.dim:
        raise DimensionMismatch("slice directions do not match the measure dimension")
    per = _per_slice(source, target, directions, p, grouping_tol, threads)
    costs = np.asarray([c for _, c in per], dtype=float)
    best = int(np.argmin(costs))
    return best, per[best][0], float(costs[best])
