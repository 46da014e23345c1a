"""Accuracy and uncertainty summaries for posterior beliefs.

Two per-step scalars track planner progress over a set of N evaluation
points: the estimating error ``||mu - truth||_2 / N`` and the estimating
variance ``tr(Sigma) / N``.  Both are reported over the full target set
(suffix ``-V``) and over the targets shared with the candidate set
(suffix ``-I``).  Root-mean-square error is kept as an auxiliary
diagnostic because its normalization (sqrt(N) rather than N) differs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .gp import as_points

#: Metric names that appear in aggregated series output, in column order.
METRIC_NAMES = ("error-V", "variance-V", "error-I", "variance-I")


def _paired_vectors(estimate, truth) -> tuple[np.ndarray, np.ndarray]:
    est = np.asarray(estimate, dtype=float).reshape(-1)
    tru = np.asarray(truth, dtype=float).reshape(-1)
    if est.size == 0 or est.shape != tru.shape:
        raise InvalidInputError("estimate and truth must be equal-length nonempty vectors")
    return est, tru


def estimating_error(estimate, truth) -> float:
    """Euclidean norm of the residual divided by the number of points.

    Note the normalization is ``1/N``, not ``1/sqrt(N)``: a residual of
    (3, 4) over two points scores 2.5, not 5/sqrt(2).
    """
    est, tru = _paired_vectors(estimate, truth)
    return float(np.linalg.norm(est - tru) / est.size)


def rmse(estimate, truth) -> float:
    """Conventional root-mean-square error, ``||residual||_2 / sqrt(N)``."""
    est, tru = _paired_vectors(estimate, truth)
    return float(np.linalg.norm(est - tru) / np.sqrt(est.size))


def estimating_variance(covariance) -> float:
    """Mean posterior marginal variance, ``tr(Sigma) / N``.

    Accepts either a full covariance matrix or a vector of marginal
    variances.
    """
    cov = np.asarray(covariance, dtype=float)
    if cov.ndim == 2:
        if cov.shape[0] != cov.shape[1] or cov.shape[0] == 0:
            raise InvalidInputError("covariance must be square and nonempty")
        diag = np.diag(cov)
    elif cov.ndim == 1 and cov.size > 0:
        diag = cov
    else:
        raise InvalidInputError("covariance must be a matrix or a variance vector")
    return float(np.sum(diag) / diag.size)


def intersection_indices(points_a, points_b) -> tuple[np.ndarray, np.ndarray]:
    """Indices of coordinate-identical points, ordered by appearance in A.

    Membership is exact floating-point equality; points that should be
    shared must be constructed once and reused bitwise.  An empty
    intersection raises InvalidInputError.
    """
    a = as_points(points_a)
    b = as_points(points_b)
    lookup = {}
    for j, pt in enumerate(b):
        lookup.setdefault((pt[0], pt[1]), j)
    idx_a = []
    idx_b = []
    for i, pt in enumerate(a):
        j = lookup.get((pt[0], pt[1]))
        if j is not None:
            idx_a.append(i)
            idx_b.append(j)
    if not idx_a:
        raise InvalidInputError("the point sets share no exact coordinates")
    return np.array(idx_a, dtype=int), np.array(idx_b, dtype=int)


@dataclass(frozen=True, eq=False)
class MetricSeries:
    """Per-step mean and sample standard deviation of one metric."""

    name: str
    mean: np.ndarray
    sd: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        sd = np.asarray(self.sd, dtype=float).reshape(-1)
        if mean.shape != sd.shape or mean.size == 0:
            raise InvalidInputError("mean and sd must be equal-length nonempty vectors")
        mean.flags.writeable = False
        sd.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "sd", sd)


def aggregate_series(name: str, per_trial) -> MetricSeries:
    """Collapse a (trials, steps) array to per-step mean and sd.

    The standard deviation uses ddof=1 across trials; a single trial
    yields sd 0.0 rather than NaN.
    """
    arr = np.asarray(per_trial, dtype=float)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError("per-trial metrics must form a (trials, steps) array")
    mean = arr.mean(axis=0)
    if arr.shape[0] > 1:
        sd = arr.std(axis=0, ddof=1)
    else:
        sd = np.zeros(arr.shape[1])
    return MetricSeries(name=name, mean=mean, sd=sd)
