"""Interpolation, geodesics, barycentric projection, embeddings."""

import numpy as np
import pytest

from sliced_transport import (
    EmbeddingMatrix,
    InvalidCoupling,
    InvalidT,
    TransportPlan,
    barycentric_projection,
    est_plan,
    SliceSet,
    gaussian_pair,
    geodesic,
    identity_coupling,
    interpolate,
    least_squares_accuracy,
    lot_embed,
    make_measure,
    product_coupling,
    reference_measure,
    sample_sphere,
    two_class_task,
    wasserstein_exact,
    weak_convergence_table,
)
from util import random_pair


def small_pair():
    mu = make_measure([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], [0.2, 0.3, 0.5])
    nu = make_measure([(2.0, 2.0), (3.0, 1.0)], [0.6, 0.4])
    return mu, nu


def test_interpolate_endpoints():
    mu, nu = small_pair()
    plan, _ = wasserstein_exact(mu, nu)
    start = interpolate(plan, mu, nu, 0.0)
    end = interpolate(plan, mu, nu, 1.0)
    # endpoints re-split atoms along plan entries but are the same measures
    assert wasserstein_exact(start, mu)[1] == pytest.approx(0.0, abs=1e-9)
    assert wasserstein_exact(end, nu)[1] == pytest.approx(0.0, abs=1e-9)


def test_interpolate_atoms_move_linearly():
    mu, nu = small_pair()
    plan, _ = wasserstein_exact(mu, nu)
    half = interpolate(plan, mu, nu, 0.5)
    expect = 0.5 * mu.atoms[plan.i] + 0.5 * nu.atoms[plan.j]
    np.testing.assert_allclose(half.atoms, expect, atol=1e-15)
    np.testing.assert_allclose(half.weights, plan.mass, atol=1e-15)


def test_interpolate_rejects_t_outside_unit_interval():
    mu, nu = small_pair()
    plan, _ = wasserstein_exact(mu, nu)
    with pytest.raises(InvalidT):
        interpolate(plan, mu, nu, -0.01)
    with pytest.raises(InvalidT):
        interpolate(plan, mu, nu, 1.01)


def test_interpolate_rejects_broken_coupling():
    mu, nu = small_pair()
    broken = TransportPlan(3, 2, [0, 1], [0, 1], [0.5, 0.5])
    with pytest.raises(InvalidCoupling):
        interpolate(broken, mu, nu, 0.5)


def test_interpolate_admits_mildly_off_couplings():
    """Marginal drift below 1e-6 passes the application gate."""
    mu, nu = small_pair()
    plan, _ = wasserstein_exact(mu, nu)
    nudged = TransportPlan(
        plan.source_size,
        plan.target_size,
        plan.i,
        plan.j,
        plan.mass * (1.0 + 1e-8),
    )
    frame = interpolate(nudged, mu, nu, 0.25)
    assert len(frame) == len(plan)


def test_geodesic_distance_is_linear_in_t():
    """W2 from the path point to the target scales as (1 - t)."""
    mu, nu = gaussian_pair(size=15, dim=2, shift=2.0, seed=3)
    _, full = wasserstein_exact(mu, nu)
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        mu_t = geodesic(mu, nu, t)
        rest = wasserstein_exact(mu_t, nu)[1]
        assert rest == pytest.approx((1.0 - t) * full, abs=1e-9)


def test_barycentric_projection_identity_plan():
    mu, _ = small_pair()
    bary = barycentric_projection(identity_coupling(mu), mu, mu)
    np.testing.assert_allclose(bary, mu.atoms, atol=1e-15)


def test_barycentric_projection_product_plan_gives_mean():
    mu, _ = small_pair()
    nu = make_measure([(0.0, 0.0), (2.0, 0.0)], [0.5, 0.5])
    bary = barycentric_projection(product_coupling(mu, nu), mu, nu)
    np.testing.assert_allclose(bary, np.tile([1.0, 0.0], (3, 1)), atol=1e-15)


def test_barycentric_projection_splits_by_mass():
    mu = make_measure([(0.0,)], [1.0])
    nu = make_measure([(0.0,), (4.0,)], [0.75, 0.25])
    plan = product_coupling(mu, nu)
    bary = barycentric_projection(plan, mu, nu)
    assert bary[0, 0] == pytest.approx(1.0, abs=1e-15)


def test_lot_embed_self_is_zero():
    ref = reference_measure(size=12, dim=2, seed=1)
    emb = lot_embed(ref, ref, method="exact")
    assert np.max(np.abs(emb.rows)) < 1e-9


def test_lot_embed_shapes_and_methods_agree_loosely():
    ref = reference_measure(size=10, dim=2, seed=0)
    mu, _ = gaussian_pair(size=14, dim=2, shift=1.0, seed=5)
    for method, kwargs in (
        ("est", {"slices": 64, "seed": 2}),
        ("exact", {}),
        ("sinkhorn", {"lam": 0.5}),
    ):
        emb = lot_embed(ref, mu, method=method, **kwargs)
        assert emb.rows.shape == (10, 2)
        assert np.all(np.isfinite(emb.rows))


def test_lot_embed_translation_shows_up_in_rows():
    """Embedding a shifted copy of the reference is close to the shift."""
    ref = reference_measure(size=20, dim=2, seed=4)
    shifted = make_measure(ref.atoms + [2.0, 0.0], ref.weights)
    emb = lot_embed(ref, shifted, method="exact")
    np.testing.assert_allclose(emb.rows, np.tile([2.0, 0.0], (20, 1)), atol=1e-8)


def test_lot_embed_unknown_method():
    ref = reference_measure(size=5, dim=2, seed=0)
    with pytest.raises(Exception):
        lot_embed(ref, ref, method="nope")


def test_embedding_matrix_rejects_nans():
    with pytest.raises(Exception):
        EmbeddingMatrix(np.array([[np.nan, 0.0]]), 1, 2)


def test_least_squares_accuracy_perfect_split():
    feats = np.array([[0.0], [0.1], [5.0], [5.1]])
    labels = np.array([-1.0, -1.0, 1.0, 1.0])
    assert least_squares_accuracy(feats, labels) == 1.0


def test_two_class_task_reproducible():
    clouds_a, labels_a = two_class_task(clouds_per_class=3, atoms_per_cloud=5, seed=9)
    clouds_b, labels_b = two_class_task(clouds_per_class=3, atoms_per_cloud=5, seed=9)
    np.testing.assert_array_equal(labels_a, labels_b)
    assert labels_a.tolist() == [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]
    for a, b in zip(clouds_a, clouds_b):
        np.testing.assert_array_equal(a.atoms, b.atoms)


def test_synthetic_generators_match_requested_shapes():
    ref = reference_measure(size=7, dim=3, seed=0)
    assert len(ref) == 7 and ref.dim == 3
    np.testing.assert_allclose(ref.weights, np.full(7, 1 / 7), atol=1e-15)
    mu, nu = gaussian_pair(size=9, dim=4, shift=2.0, seed=0)
    assert mu.dim == nu.dim == 4
    assert float(np.mean(nu.atoms[:, 0]) - np.mean(mu.atoms[:, 0])) == pytest.approx(
        2.0, abs=1.5
    )


def test_weak_convergence_table_columns_and_monotone_exact():
    mu, nu = gaussian_pair(size=12, dim=2, shift=2.0, seed=1)
    rows = weak_convergence_table(
        mu, nu, ts=[0.0, 0.5, 1.0], slices=32, taus=(0.0,), lambdas=(1.0,), seed=0
    )
    assert [r["t"] for r in rows] == [0.0, 0.5, 1.0]
    for r in rows:
        assert set(r) == {"t", "est_tau_0", "w_exact", "sinkhorn_lam_1", "product"}
    w = [r["w_exact"] for r in rows]
    assert w[0] > w[1] > w[2]
    assert w[2] == pytest.approx(0.0, abs=1e-9)
    # the independent coupling never tightens along the path the way W does
    assert rows[2]["product"] > rows[2]["w_exact"]


def test_est_plan_feeds_applications():
    """Sliced plans are couplings, so every application accepts them."""
    mu, nu = random_pair(8, max_n=12)
    slices = SliceSet.uniform(sample_sphere(32, mu.dim, 0))
    res = est_plan(mu, nu, slices)
    frame = interpolate(res.plan, mu, nu, 0.5)
    assert len(frame) == len(res.plan)
    bary = barycentric_projection(res.plan, mu, nu)
    assert bary.shape == (len(mu), mu.dim)
