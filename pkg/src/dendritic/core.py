"""Vector and centroid arithmetic for spike-volley patterns.

Patterns are binary row vectors ("spike vectors"): a 1 marks a spike at
that input line. Centroids are real-valued component-wise means of a
cluster's member patterns. All distances are rectilinear (sum of
absolute differences); for constant-weight spike vectors the nearest
centroid can equivalently be found by maximizing the plain dot product,
which is the identity the whole dendrite model rests on.

Everything here is pure and re-entrant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "ClusterSet",
    "as_spike_vector",
    "avg_dist",
    "centroid_of",
    "dot_potential",
    "nearest_centroid",
    "sad",
    "sad_to_centroids",
    "spike_count",
    "wt_convergence",
]


def as_spike_vector(x) -> np.ndarray:
    """Validate and return ``x`` as a 1-D 0/1 uint8 array."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise DimensionError(f"spike vector must be 1-D, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise DomainError("spike vector elements must be 0 or 1")
    return arr.astype(np.uint8)


def spike_count(x) -> int:
    """Number of ones in a spike vector (its constant-weight value m)."""
    return int(np.asarray(x).sum())


def _check_same_length(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError(
            f"length mismatch: {a.shape[-1]} vs {b.shape[-1]}"
        )


def dot_potential(x, w) -> int:
    """Body potential of one segment: sum of ``w`` where ``x`` spikes.

    Because ``x`` is binary the "multiplication" degenerates to a masked
    integer summation.
    """
    xv = np.asarray(x)
    wv = np.asarray(w)
    _check_same_length(xv, wv)
    return int(wv[xv != 0].sum())


def sad(a, b) -> float:
    """Sum of absolute differences (rectilinear distance). Symmetric."""
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    _check_same_length(av, bv)
    return float(np.abs(av - bv).sum())


def centroid_of(patterns) -> np.ndarray:
    """Component-wise arithmetic mean of a non-empty set of patterns.

    Returns a float64 row vector. When members are constant-weight spike
    vectors with m ones, the components sum to exactly m.
    """
    mat = np.asarray(patterns, dtype=np.float64)
    if mat.ndim == 1:
        mat = mat[None, :]
    if mat.shape[0] == 0:
        raise DomainError("centroid of an empty pattern set is undefined")
    return mat.mean(axis=0)


def sad_to_centroids(patterns, centroids) -> np.ndarray:
    """Pairwise sad between patterns (n, p) and centroids (k, p).

    Computed as ``m + sum(c) - 2 * (x @ c)`` per pair, which is exact for
    binary patterns and any real centroids and turns the distance scan
    into one matrix product.
    """
    pat = np.asarray(patterns, dtype=np.float64)
    cen = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    if pat.ndim == 1:
        pat = pat[None, :]
    _check_same_length(pat, cen)
    m = pat.sum(axis=1)
    csum = cen.sum(axis=1)
    return m[:, None] + csum[None, :] - 2.0 * (pat @ cen.T)


def nearest_centroid(x, centroids) -> int:
    """Index of the minimum-sad centroid; ties go to the lowest index."""
    cen = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    if cen.shape[0] == 0:
        raise DomainError("no centroids to compare against")
    xv = np.asarray(x, dtype=np.float64)
    _check_same_length(xv, cen)
    dists = np.abs(xv[None, :] - cen).sum(axis=1)
    return int(np.argmin(dists))


@dataclass
class ClusterSet:
    """One clustering of a pattern set: assignments plus centroids.

    ``assignments[i]`` is the cluster index of pattern i, or -1 for a
    pattern no cluster claimed. Disjointness is structural (one slot per
    pattern).
    """

    assignments: np.ndarray
    centroids: np.ndarray

    def __post_init__(self):
        self.assignments = np.asarray(self.assignments, dtype=np.int64)
        self.centroids = np.atleast_2d(np.asarray(self.centroids, dtype=np.float64))
        k = self.centroids.shape[0]
        if self.assignments.size and self.assignments.max(initial=-1) >= k:
            raise DomainError("assignment index out of centroid range")

    @property
    def n_clusters(self) -> int:
        return self.centroids.shape[0]

    def sizes(self) -> np.ndarray:
        return np.bincount(
            self.assignments[self.assignments >= 0], minlength=self.n_clusters
        )


def avg_dist(patterns, assignments, centroids) -> float:
    """Mean sad between each pattern and the centroid of its cluster.

    Every pattern must be assigned (no -1 entries); the quality of a
    clustering is this average, lower is better.
    """
    pat = np.asarray(patterns, dtype=np.float64)
    assign = np.asarray(assignments, dtype=np.int64)
    cen = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    if pat.shape[0] != assign.shape[0]:
        raise DimensionError("one assignment per pattern required")
    if assign.size == 0:
        raise DomainError("avg_dist of an empty pattern set is undefined")
    if (assign < 0).any() or (assign >= cen.shape[0]).any():
        raise DomainError("every pattern must be assigned to a valid cluster")
    dists = np.abs(pat - cen[assign]).sum(axis=1)
    return float(dists.mean())


def wt_convergence(weights, w_max) -> float:
    """Bimodality metric sum(w * (w_max - w)) / (w_max * num_weights).

    Zero exactly when every weight sits at 0 or w_max; at most w_max / 4
    (all weights mid-range). The value scales with the unit the weights
    are expressed in, so pass weights and w_max in the same units.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w_max <= 0:
        raise DomainError("w_max must be positive")
    if w.size == 0:
        raise DomainError("empty weight matrix")
    if (w < 0).any() or (w > w_max).any():
        raise DomainError("weights must lie in [0, w_max]")
    return float((w * (w_max - w)).sum() / (float(w_max) * w.size))
