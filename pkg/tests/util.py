"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np

from sliced_transport import DiscreteMeasure, make_measure


def random_measure(rng: np.random.Generator, n: int, d: int, uniform: bool = False) -> DiscreteMeasure:
    atoms = rng.standard_normal((n, d))
    if uniform:
        weights = np.full(n, 1.0 / n)
    else:
        weights = rng.random(n) + 0.05
        weights = weights / weights.sum()
    return make_measure(atoms, weights)


def random_pair(seed: int, max_n: int = 50, max_d: int = 5, uniform: bool = False,
                min_d: int = 1):
    """A random measure pair sharing one ambient dimension."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_n + 1))
    m = int(rng.integers(2, max_n + 1))
    d = int(rng.integers(min_d, max_d + 1))
    return random_measure(rng, n, d, uniform), random_measure(rng, m, d, uniform)


def sorted_matching_mean_power(mu, nu, directions, p: float = 2.0) -> float:
    """Direct slice average for uniform equal-size measures.

    For each direction, pair the atoms by sorted projection rank and average
    (1/N) sum |x - y|^p over directions.  Independent of the lifting
    pipeline; used as its oracle in the uniform case.
    """
    n = len(mu)
    assert len(nu) == n
    total = 0.0
    for theta in directions:
        sx = np.argsort(mu.atoms @ theta, kind="stable")
        sy = np.argsort(nu.atoms @ theta, kind="stable")
        diffs = mu.atoms[sx] - nu.atoms[sy]
        total += float(np.sum(np.linalg.norm(diffs, axis=1) ** p)) / n
    return total / directions.shape[0]


def worked_example():
    """Three-atom pair with an exact two-atom overlap under theta = e1.

    Projections: source [0, 1, 1] -> class masses [0.1, 0.9];
    target [2, 3, 3] -> class masses [0.5, 0.5].
    """
    src = make_measure([(0.0, 0.0), (1.0, 1.0), (1.0, -1.0)], [0.1, 0.3, 0.6])
    tgt = make_measure([(2.0, 0.0), (3.0, 1.0), (3.0, -1.0)], [0.5, 0.3, 0.2])
    theta = np.array([1.0, 0.0])
    return src, tgt, theta
