"""Things to do with a transport plan once you have one.

Displacement interpolation, geodesics under the exact quadratic plan,
barycentric projections, and fixed-reference embeddings that turn a
collection of measures into vectors (one row per reference atom, each row
the displacement of that atom's barycentric image).  Also the synthetic
data generators and the weak-convergence experiment driver used by the
command-line tool and the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidCoupling, InvalidT, TransportError
from .est import est_plan_tempered
from .measures import (
    DiscreteMeasure,
    TransportPlan,
    _readonly,
    make_measure,
    plan_cost,
    product_coupling,
    validate_coupling,
)
from .oracles import sinkhorn, wasserstein_exact
from .slicing import DEFAULT_GROUPING_TOL, sample_sphere

# Plans fed into interpolation or barycentric projection may be approximate
# couplings (entropic plans stop at a finite marginal error), so the gate
# here is looser than the 1e-9 diagnostic in validate_coupling.
APPLICATION_COUPLING_TOL = 1e-6


def _require_coupling(plan: TransportPlan, source: DiscreteMeasure, target: DiscreteMeasure) -> None:
    ok, dev = validate_coupling(plan, source, target, tol=APPLICATION_COUPLING_TOL)
    if not ok:
        raise InvalidCoupling(f"plan marginals deviate by {dev:.3e} (> {APPLICATION_COUPLING_TOL})")


def interpolate(
    plan: TransportPlan,
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    t: float,
) -> DiscreteMeasure:
    """Displacement interpolation ((1 - t) x + t y) along a plan.

    Every plan entry becomes one atom at ``(1 - t) x_i + t y_j`` with the
    entry's mass as weight; coincident atoms stay distinct.  t = 0 and
    t = 1 reproduce the endpoints up to this atom splitting.
    """
    if not 0.0 <= t <= 1.0:
        raise InvalidT(f"t = {t!r} outside [0, 1]")
    if source.dim != target.dim:
        raise DimensionMismatch("source and target dimensions differ")
    _require_coupling(plan, source, target)
    atoms = (1.0 - t) * source.atoms[plan.i] + t * target.atoms[plan.j]
    # An admissible plan may carry up to 1e-6 marginal drift; rescale so
    # the masses pass the much tighter measure-weight gate.
    return make_measure(atoms, plan.mass / float(np.sum(plan.mass)))


def geodesic(
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    t: float,
    p: float = 2.0,
) -> DiscreteMeasure:
    """Point at parameter t on the exact-plan displacement path."""
    plan, _ = wasserstein_exact(source, target, p)
    return interpolate(plan, source, target, t)


def barycentric_projection(
    plan: TransportPlan,
    reference: DiscreteMeasure,
    target: DiscreteMeasure,
) -> np.ndarray:
    """Per-reference-atom barycenters of the plan's target mass.

    Row i is ``(1 / alpha_i) * sum_j mass_ij * y_j`` where ``alpha_i`` is
    the reference weight; reference weights are strictly positive by
    construction, so the division is always defined.
    """
    _require_coupling(plan, reference, target)
    out = np.zeros((len(reference), reference.dim))
    np.add.at(out, plan.i, plan.mass[:, None] * target.atoms[plan.j])
    return out / reference.weights[:, None]


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """Fixed-reference embedding of one measure: (N, d) displacement rows."""

    rows: np.ndarray
    reference_size: int
    dim: int

    def __post_init__(self) -> None:
        rows = np.array(self.rows, dtype=float)
        if rows.shape != (self.reference_size, self.dim):
            raise DimensionMismatch("embedding rows must be (reference_size, dim)")
        if not np.all(np.isfinite(rows)):
            raise TransportError("embedding rows must be finite")
        object.__setattr__(self, "rows", _readonly(rows))


def lot_embed(
    reference: DiscreteMeasure,
    measure: DiscreteMeasure,
    method: str = "est",
    p: float = 2.0,
    slices: int = 128,
    tau: float = 0.0,
    seed: int = 0,
    lam: float = 1.0,
    max_iters: int = 5000,
    stop_tol: float = 1e-9,
    grouping_tol: float = DEFAULT_GROUPING_TOL,
) -> EmbeddingMatrix:
    """Embed a measure against a fixed reference via a transport plan.

    ``method`` picks the plan: "est" (sliced plan over ``slices``
    directions drawn with ``seed``, tempered by ``tau``), "exact" (the
    optimal plan), or "sinkhorn" (entropic plan with regularizer ``lam``).
    Row i of the result is the barycentric image of reference atom i minus
    the atom itself.
    """
    if reference.dim != measure.dim:
        raise DimensionMismatch("reference and measure dimensions differ")
    if method == "est":
        directions = sample_sphere(slices, reference.dim, seed)
        plan = est_plan_tempered(
            reference, measure, directions, p=p, tau=tau, grouping_tol=grouping_tol
        ).plan
    elif method == "exact":
        plan = wasserstein_exact(reference, measure, p)[0]
    elif method == "sinkhorn":
        plan = sinkhorn(reference, measure, p=p, lam=lam, max_iters=max_iters, stop_tol=stop_tol)[0]
    else:
        raise TransportError(f"unknown embedding method {method!r}")
    rows = barycentric_projection(plan, reference, measure) - reference.atoms
    return EmbeddingMatrix(rows, len(reference), reference.dim)


# ---------------------------------------------------------------------------
# synthetic inputs shared by the CLI experiments and the test suite


def reference_measure(size: int = 50, dim: int = 2, seed: int = 0) -> DiscreteMeasure:
    """Uniform-mass standard-Gaussian reference cloud (fixed seed)."""
    rng = np.random.default_rng(seed)
    return make_measure(rng.standard_normal((size, dim)), np.full(size, 1.0 / size))


def gaussian_pair(
    size: int = 50,
    dim: int = 2,
    shift: float = 3.0,
    seed: int = 0,
) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Two uniform-mass Gaussian samples, the second shifted along axis 0."""
    rng = np.random.default_rng(seed)
    mu = rng.standard_normal((size, dim))
    nu = rng.standard_normal((size, dim))
    nu[:, 0] += shift
    w = np.full(size, 1.0 / size)
    return make_measure(mu, w), make_measure(nu, w.copy())


def two_class_task(
    clouds_per_class: int = 20,
    atoms_per_cloud: int = 30,
    dim: int = 2,
    separation: float = 4.0,
    seed: int = 0,
) -> tuple[list[DiscreteMeasure], np.ndarray]:
    """Two classes of unit-variance point clouds with shifted class means.

    Returns the clouds (class 0 first) and +/-1 labels.  ``separation`` is
    the distance between the class means in units of the cloud standard
    deviation (1), so the default keeps the classes 4 sigma apart.
    """
    rng = np.random.default_rng(seed)
    means = [np.zeros(dim), np.concatenate(([separation], np.zeros(dim - 1)))]
    clouds: list[DiscreteMeasure] = []
    labels: list[float] = []
    w = np.full(atoms_per_cloud, 1.0 / atoms_per_cloud)
    for label, mean in zip((-1.0, 1.0), means):
        for _ in range(clouds_per_class):
            atoms = mean + rng.standard_normal((atoms_per_cloud, dim))
            clouds.append(make_measure(atoms, w.copy()))
            labels.append(label)
    return clouds, np.asarray(labels)


def embedding_features(
    reference: DiscreteMeasure,
    measures: list[DiscreteMeasure],
    **embed_kwargs,
) -> np.ndarray:
    """Stack flattened embeddings of many measures into a feature matrix."""
    return np.stack(
        [lot_embed(reference, m, **embed_kwargs).rows.ravel() for m in measures]
    )


def least_squares_accuracy(features: np.ndarray, labels: np.ndarray) -> float:
    """Training accuracy of an ordinary-least-squares classifier.

    Fits an affine predictor to +/-1 labels and scores sign agreement on
    the same data.
    """
    design = np.hstack([features, np.ones((features.shape[0], 1))])
    coef, *_ = np.linalg.lstsq(design, labels, rcond=None)
    pred = np.sign(design @ coef)
    pred[pred == 0] = 1.0
    return float(np.mean(pred == labels))


def weak_convergence_table(
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    ts,
    slices: int = 512,
    taus=(0.0,),
    lambdas=(1.0, 10.0),
    seed: int = 0,
    p: float = 2.0,
    grouping_tol: float = DEFAULT_GROUPING_TOL,
    sinkhorn_iters: int = 5000,
    sinkhorn_tol: float = 1e-9,
) -> list[dict]:
    """Discrepancies between the displacement path and its endpoint.

    Walks mu_t along the exact plan from ``source`` to ``target`` and, at
    every t, records the sliced distance (per tau), the exact W_p, entropic
    plan costs (per lambda), and the independent-coupling cost against the
    endpoint.  One dict per t, keys named after the columns.
    """
    plan_star, _ = wasserstein_exact(source, target, p)
    directions = sample_sphere(slices, source.dim, seed)
    rows: list[dict] = []
    for t in ts:
        mu_t = interpolate(plan_star, source, target, float(t))
        row: dict = {"t": float(t)}
        for tau in taus:
            res = est_plan_tempered(
                mu_t, target, directions, p=p, tau=tau, grouping_tol=grouping_tol
            )
            row[f"est_tau_{tau:g}"] = res.distance
        row["w_exact"] = wasserstein_exact(mu_t, target, p)[1]
        for lam in lambdas:
            plan_s, _ = sinkhorn(
                mu_t, target, p=p, lam=lam, max_iters=sinkhorn_iters, stop_tol=sinkhorn_tol
            )
            row[f"sinkhorn_lam_{lam:g}"] = plan_cost(plan_s, mu_t, target, p)
        row["product"] = plan_cost(product_coupling(mu_t, target), mu_t, target, p)
        rows.append(row)
    return rows
