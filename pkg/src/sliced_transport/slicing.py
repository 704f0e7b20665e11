"""Projection of measures onto lines and monotone one-dimensional transport.

Projecting a discrete measure onto a direction theta groups atoms whose
projections coincide (up to a tolerance) into equivalence classes: the
projected measure lives on the class values, each class carrying the summed
mass of its members.  Between two projected measures the optimal plan for
any strictly convex cost is the unique monotone coupling, computed by a
north-west-corner sweep over the sorted classes: two cursors walk the class
lists from left to right, at each step shipping the smaller of the two
remaining masses and advancing whichever side was exhausted.

Grouping tolerance is relative: a tolerance ``g`` merges sorted projections
that stay within ``g * max(1, max|theta . x|)`` of the running class
representative (the first value that opened the class).  Passing 0 merges
exactly equal projections only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    MassImbalance,
    NonUnitDirection,
    TransportError,
)
from .measures import DiscreteMeasure, _readonly

# Direction vectors must be unit length within this tolerance.
UNIT_TOL = 1e-12
# Residual masses below this are clamped to zero during the sweep, which
# keeps tiny negative leftovers from float cancellation out of the plan.
RESIDUAL_CLAMP = 1e-15
# Totals of the two projected measures may differ by at most this much.
MASS_BALANCE_TOL = 1e-9

DEFAULT_GROUPING_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ProjectedMeasure:
    """A measure pushed onto a line, grouped into equivalence classes.

    Attributes
    ----------
    class_values : ndarray, shape (K,)
        Strictly increasing projected coordinates, one per class.
    class_masses : ndarray, shape (K,)
        Positive class masses, summing to 1 within 1e-9.
    member_indices : ndarray, shape (n,)
        Original atom indices, concatenated class by class.
    class_starts : ndarray, shape (K + 1,)
        Offsets into ``member_indices``: class a owns the slice
        ``member_indices[class_starts[a]:class_starts[a + 1]]``.
    member_weights : ndarray, shape (n,)
        Original atom weights aligned with ``member_indices``.
    """

    class_values: np.ndarray
    class_masses: np.ndarray
    member_indices: np.ndarray
    class_starts: np.ndarray
    member_weights: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.class_values, dtype=float)
        masses = np.asarray(self.class_masses, dtype=float)
        members = np.asarray(self.member_indices, dtype=np.int64)
        starts = np.asarray(self.class_starts, dtype=np.int64)
        mweights = np.asarray(self.member_weights, dtype=float)
        k = values.shape[0]
        n = members.shape[0]
        if masses.shape != (k,) or starts.shape != (k + 1,) or mweights.shape != (n,):
            raise DimensionMismatch("projected measure arrays disagree on shape")
        if k == 0:
            raise TransportError("projected measure needs at least one class")
        if np.any(np.diff(values) <= 0):
            raise TransportError("class values must be strictly increasing")
        if not np.all(masses > 0):
            raise TransportError("class masses must be strictly positive")
        if abs(float(masses.sum()) - 1.0) > MASS_BALANCE_TOL:
            raise MassImbalance("class masses must sum to 1 within 1e-9")
        if starts[0] != 0 or starts[-1] != n or np.any(np.diff(starts) < 1):
            raise TransportError("class offsets must partition the member list")
        if np.any(np.bincount(members, minlength=n) != 1):
            raise TransportError("each atom index must appear in exactly one class")
        sums = np.add.reduceat(mweights, starts[:-1])
        if float(np.max(np.abs(sums - masses))) > 1e-12:
            raise MassImbalance("member weights must sum to the class mass within 1e-12")
        for name, arr in (
            ("class_values", values),
            ("class_masses", masses),
            ("member_indices", members),
            ("class_starts", starts),
            ("member_weights", mweights),
        ):
            object.__setattr__(self, name, _readonly(np.array(arr)))

    @property
    def n_classes(self) -> int:
        return self.class_values.shape[0]

    @property
    def all_singletons(self) -> bool:
        """True when every class holds exactly one atom."""
        return self.n_classes == self.member_indices.shape[0]

    def class_members(self, a: int) -> tuple[np.ndarray, np.ndarray]:
        """Atom indices and weights of class ``a``."""
        lo, hi = self.class_starts[a], self.class_starts[a + 1]
        return self.member_indices[lo:hi], self.member_weights[lo:hi]


@dataclass(frozen=True, eq=False)
class OneDPlan:
    """Monotone coupling between two projected measures.

    Entries (a, b, mass) reference class indices on each side.  Sorted
    lexicographically; both index sequences are non-decreasing, so no two
    entries cross.
    """

    a: np.ndarray
    b: np.ndarray
    mass: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=np.int64)
        b = np.asarray(self.b, dtype=np.int64)
        mass = np.asarray(self.mass, dtype=float)
        if not (a.shape == b.shape == mass.shape) or a.ndim != 1:
            raise DimensionMismatch("plan entry arrays must share one length")
        if a.size == 0:
            raise TransportError("a one-dimensional plan needs at least one entry")
        if np.any(np.diff(a) < 0) or np.any(np.diff(b) < 0):
            raise TransportError("entries must be monotone in both class indices")
        if not np.all(mass > 0):
            raise TransportError("plan masses must be strictly positive")
        object.__setattr__(self, "a", _readonly(np.array(a)))
        object.__setattr__(self, "b", _readonly(np.array(b)))
        object.__setattr__(self, "mass", _readonly(np.array(mass)))

    def __len__(self) -> int:
        return self.a.shape[0]

    @property
    def entries(self) -> list[tuple[int, int, float]]:
        return [
            (int(a), int(b), float(m))
            for a, b, m in zip(self.a, self.b, self.mass)
        ]


def _check_direction(direction, dim: int) -> np.ndarray:
    theta = np.asarray(direction, dtype=float).ravel()
    if theta.shape[0] != dim:
        raise DimensionMismatch(
            f"direction has dimension {theta.shape[0]}, measure has {dim}"
        )
    norm = float(np.linalg.norm(theta))
    if abs(norm - 1.0) > UNIT_TOL:
        raise NonUnitDirection(f"direction norm {norm!r} is not 1 within {UNIT_TOL}")
    return theta


def project(
    measure: DiscreteMeasure,
    direction,
    grouping_tol: float = DEFAULT_GROUPING_TOL,
) -> ProjectedMeasure:
    """Push a measure onto a unit direction, merging coincident projections.

    Atoms are sorted by projected value (original index as tie-break) and a
    new class opens whenever a value exceeds the running class representative
    by more than the effective tolerance ``grouping_tol * max(1, max|proj|)``.
    """
    theta = _check_direction(direction, measure.dim)
    if grouping_tol < 0:
        raise TransportError("grouping tolerance must be nonnegative")
    proj = measure.atoms @ theta
    order = np.argsort(proj, kind="stable")
    values = proj[order]
    weights = measure.weights[order]
    n = values.shape[0]
    scale = max(1.0, float(np.max(np.abs(values))))
    tol = grouping_tol * scale
    diffs = np.diff(values)
    if np.all(diffs > tol):
        # Generic case: every projection is its own class.
        starts = np.arange(n + 1, dtype=np.int64)
        class_values = values
        class_masses = weights
    else:
        start_list = [0]
        rep = values[0]
        for k in range(1, n):
            if values[k] - rep > tol:
                start_list.append(k)
                rep = values[k]
        starts = np.asarray(start_list + [n], dtype=np.int64)
        class_values = values[starts[:-1]]
        class_masses = np.add.reduceat(weights, starts[:-1])
    return ProjectedMeasure(class_values, class_masses, order, starts, weights)


def solve_1d(source: ProjectedMeasure, target: ProjectedMeasure) -> OneDPlan:
    """Unique monotone coupling between two projected measures.

    North-west-corner sweep: ship ``min(residual_source, residual_target)``
    and advance the exhausted side.  Residuals below 1e-15 are clamped to
    zero.  Raises MassImbalance when the totals differ by more than 1e-9.
    """
    ms = source.class_masses
    mt = target.class_masses
    if abs(float(ms.sum()) - float(mt.sum())) > MASS_BALANCE_TOL:
        raise MassImbalance("projected measures carry different total mass")
    if ms.shape == mt.shape and np.array_equal(ms, mt):
        # Equal bins ship one-to-one; identical to what the sweep returns.
        idx = np.arange(ms.shape[0])
        return OneDPlan(idx, idx, ms.copy())
    k1, k2 = ms.shape[0], mt.shape[0]
    ia: list[int] = []
    ib: list[int] = []
    shipped: list[float] = []
    a = b = 0
    ra = float(ms[0])
    rb = float(mt[0])
    while a < k1 and b < k2:
        ship = ra if ra < rb else rb
        if ship > 0.0:
            ia.append(a)
            ib.append(b)
            shipped.append(ship)
        ra -= ship
        rb -= ship
        if ra < RESIDUAL_CLAMP:
            ra = 0.0
        if rb < RESIDUAL_CLAMP:
            rb = 0.0
        if ra == 0.0:
            a += 1
            if a < k1:
                ra = float(ms[a])
        if rb == 0.0:
            b += 1
            if b < k2:
                rb = float(mt[b])
    return OneDPlan(
        np.asarray(ia, dtype=np.int64),
        np.asarray(ib, dtype=np.int64),
        np.asarray(shipped, dtype=float),
    )


def one_d_cost(source: ProjectedMeasure, target: ProjectedMeasure,
               plan: OneDPlan, p: float = 2.0) -> float:
    """Cost of a one-dimensional plan on the projected class values."""
    if p <= 1:
        raise TransportError("p must exceed 1")
    gaps = np.abs(source.class_values[plan.a] - target.class_values[plan.b])
    return float(np.sum(plan.mass * gaps**p)) ** (1.0 / p)


def sample_sphere(count: int, dim: int, seed: int) -> np.ndarray:
    """Draw ``count`` unit directions in R^dim, deterministically by seed.

    Gaussian vectors are normalized; a draw with norm below 1e-12 is
    rejected and redrawn.  On the line (dim == 1) the two possible
    directions alternate +1, -1 instead of being sampled.
    """
    if count < 1 or dim < 1:
        raise TransportError("need count >= 1 and dim >= 1")
    if dim == 1:
        signs = np.where(np.arange(count) % 2 == 0, 1.0, -1.0)
        return signs.reshape(count, 1)
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((count, dim))
    norms = np.linalg.norm(draws, axis=1)
    for k in np.flatnonzero(norms < 1e-12):
        while norms[k] < 1e-12:
            draws[k] = rng.standard_normal(dim)
            norms[k] = np.linalg.norm(draws[k])
    return draws / norms[:, None]
