"""Scalar similarity/distance metrics between sparse hash vectors.

These are the reference implementations operating on one pair at a time via
sorted-index merges; the embedding assembly uses vectorized equivalents and
is tested against these.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .walks import HashVector

METRICS = ("cosine", "euclidean", "seuclidean", "canberra", "jaccard")

VARIANCE_FLOOR = 1e-12


def _merged_dense(a: HashVector, b: HashVector):
    """Values of a and b over the union of their supports."""
    union = np.union1d(a.indices, b.indices)
    av = np.zeros(len(union))
    bv = np.zeros(len(union))
    av[np.searchsorted(union, a.indices)] = a.values
    bv[np.searchsorted(union, b.indices)] = b.values
    return union, av, bv


def _dot(a: HashVector, b: HashVector) -> float:
    if a.nnz == 0 or b.nnz == 0:
        return 0.0
    pos = np.searchsorted(a.indices, b.indices)
    pos_ok = pos < a.nnz
    hit = np.zeros(b.nnz, dtype=bool)
    hit[pos_ok] = a.indices[pos[pos_ok]] == b.indices[pos_ok]
    return float(np.dot(a.values[pos[hit]], b.values[hit]))


def similarity(a: HashVector, b: HashVector, metric: str = "cosine",
               variances: np.ndarray | None = None) -> float:
    """Metric value between two hash vectors over the same node universe.

    Cosine and jaccard are similarities in [0, 1]; euclidean, seuclidean and
    canberra are distances >= 0 computed over the union of supports, with
    absent coordinates treated as 0.  `variances` (per-dimension, floored
    positive) is required for seuclidean only.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if metric == "cosine":
        if a.nnz == 0 or b.nnz == 0:
            return 0.0
        if np.array_equal(a.indices, b.indices) and np.array_equal(a.values, b.values):
            return 1.0
        na = float(np.sqrt(np.dot(a.values, a.values)))
        nb = float(np.sqrt(np.dot(b.values, b.values)))
        return _dot(a, b) / (na * nb)
    if metric == "jaccard":
        if a.nnz == 0 and b.nnz == 0:
            return 0.0
        inter = len(np.intersect1d(a.indices, b.indices, assume_unique=True))
        union = a.nnz + b.nnz - inter
        return inter / union
    if a.nnz == 0 and b.nnz == 0:
        return 0.0
    union, av, bv = _merged_dense(a, b)
    if metric == "euclidean":
        return float(np.sqrt(np.sum((av - bv) ** 2)))
    if metric == "seuclidean":
        if variances is None:
            raise ValueError("seuclidean requires per-dimension variances")
        v = np.asarray(variances)[union]
        return float(np.sqrt(np.sum((av - bv) ** 2 / v ** 2)))
    # canberra; terms where both coordinates are 0 contribute 0
    num = np.abs(av - bv)
    den = np.abs(av) + np.abs(bv)
    nz = den > 0
    return float(np.sum(num[nz] / den[nz]))


def compute_variances(hashes: sp.csr_matrix) -> np.ndarray:
    """Population variance of every hash dimension across all nodes.

    Absent coordinates count as zeros.  Zero variances are floored to keep
    the standardized Euclidean denominator positive.
    """
    if hashes.shape[0] < 2:
        raise ValueError("need at least 2 hash vectors")
    mean = np.asarray(hashes.mean(axis=0)).ravel()
    mean_sq = np.asarray(hashes.multiply(hashes).mean(axis=0)).ravel()
    var = np.maximum(mean_sq - mean ** 2, 0.0)
    return np.maximum(var, VARIANCE_FLOOR)
