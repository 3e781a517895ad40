"""Per-sample and per-set uncertainty metrics.

To-hull uncertainty (hull distance normalized by the margin), closure
ratio summaries, the Gini-impurity softmax score, distance-based surprise
(nearest same-class / nearest cross-class activation distances), the
elementwise product combination, and the two correlation coefficients used
by the evaluation harnesses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (EmptyInput, InvalidDistribution, LengthMismatch,
                     MissingClass, SingleGroup, ZeroVariance)
from .geometry import HullApprox, as_matrix, hull_distances

SOFTMAX_SUM_TOL = 1e-6


@dataclass(frozen=True)
class SetSummary:
    """Closure ratio plus the mean uncertainty of the exterior samples."""

    closure_ratio: float
    mean_exterior_tu: float | None
    n_closure: int
    n_exterior: int


def _scores(values, name="scores") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyInput(f"{name} is empty")
    return arr


def _labels(values, name="labels") -> np.ndarray:
    arr = np.asarray(values).ravel().astype(np.int64)
    if arr.size == 0:
        raise EmptyInput(f"{name} is empty")
    return arr


def to_hull_uncertainty(test, hull: HullApprox) -> np.ndarray:
    """Distance of each test row to the hull, divided by the margin."""
    return hull_distances(test, hull) / hull.epsilon


def closure_ratio(tu) -> SetSummary:
    """Summary of a TU score vector: closure = TU <= 1, exterior = TU > 1."""
    t = _scores(tu, "tu")
    if (t < 0).any():
        raise ValueError("TU values must be nonnegative")
    exterior = t > 1.0
    n_ext = int(exterior.sum())
    n_clo = t.size - n_ext
    mean_ext = float(t[exterior].mean()) if n_ext else None
    return SetSummary(closure_ratio=n_clo / t.size, mean_exterior_tu=mean_ext,
                      n_closure=n_clo, n_exterior=n_ext)


def deep_gini(softmax) -> np.ndarray:
    """Gini impurity 1 - sum(p^2) of each softmax row."""
    P = as_matrix(softmax, "softmax")
    if (P < 0).any():
        r, c = np.argwhere(P < 0)[0]
        raise InvalidDistribution(f"negative probability at row {r}, column {c}")
    sums = P.sum(axis=1)
    bad = np.abs(sums - 1.0) > SOFTMAX_SUM_TOL
    if bad.any():
        r = int(np.argmax(bad))
        raise InvalidDistribution(f"softmax row {r} sums to {sums[r]:.9g}, not 1")
    P = P / sums[:, None]
    return 1.0 - np.einsum("ij,ij->i", P, P)


def dsa(train_act, train_labels, test_act, test_pred) -> np.ndarray:
    """Distance-based surprise of test activations against training ones.

    For a test activation with predicted class c: the distance to its
    nearest class-c training activation, over the distance from that
    neighbor to the nearest training activation of any other class.
    A zero denominator yields +inf as a per-sample sentinel; report
    serialization rejects it, the caller must handle those rows.
    """
    A = as_matrix(train_act, "train_act")
    T = as_matrix(test_act, "test_act")
    y = _labels(train_labels, "train_labels")
    p = _labels(test_pred, "test_pred")
    if y.shape[0] != A.shape[0]:
        raise LengthMismatch("train_labels length != train_act rows")
    if p.shape[0] != T.shape[0]:
        raise LengthMismatch("test_pred length != test_act rows")

    classes = np.unique(y)
    out = np.empty(T.shape[0])
    for c in np.unique(p):
        same = y == c
        if not same.any():
            raise MissingClass(f"predicted class {c} has no training activations")
        if same.all():
            raise MissingClass(f"no training activations outside class {c}")
        sel = p == c
        d_same = cdist(T[sel], A[same])
        nn = np.argmin(d_same, axis=1)
        dist_a = d_same[np.arange(nn.size), nn]
        dist_b = cdist(A[same][nn], A[~same]).min(axis=1)
        vals = np.where(dist_b > 0, dist_a / np.where(dist_b > 0, dist_b, 1.0), np.inf)
        out[sel] = vals
    return out


def combined_metric(a, b) -> np.ndarray:
    """Elementwise product of two score vectors."""
    x = _scores(a, "a")
    y = _scores(b, "b")
    if x.size != y.size:
        raise LengthMismatch(f"score lengths differ: {x.size} != {y.size}")
    return x * y


def pearson(x, y) -> float:
    """Product-moment correlation."""
    a = _scores(x, "x")
    b = _scores(y, "y")
    if a.size != b.size:
        raise LengthMismatch(f"lengths differ: {a.size} != {b.size}")
    if a.size < 2:
        raise EmptyInput("pearson needs at least 2 samples")
    da = a - a.mean()
    db = b - b.mean()
    va = float(da @ da)
    vb = float(db @ db)
    if va == 0.0 or vb == 0.0:
        raise ZeroVariance("pearson input has zero variance")
    return float((da @ db) / np.sqrt(va * vb))


def point_biserial(x, groups) -> float:
    """Correlation of a score with a 0/1 group coding.

    ((M1 - M0) / s_N) * sqrt(p * q) with the population standard
    deviation, which makes it identical to pearson() on the 0/1 coding.
    """
    a = _scores(x, "x")
    g = _labels(groups, "groups")
    if a.size != g.size:
        raise LengthMismatch(f"lengths differ: {a.size} != {g.size}")
    if not set(np.unique(g)) <= {0, 1}:
        raise ValueError("groups must be coded 0/1")
    n1 = int(g.sum())
    n0 = g.size - n1
    if n0 == 0 or n1 == 0:
        raise SingleGroup("both group values must be present")
    s_n = float(a.std())  # population (divide by n)
    if s_n == 0.0:
        raise ZeroVariance("scores have zero variance")
    m1 = float(a[g == 1].mean())
    m0 = float(a[g == 0].mean())
    p = n1 / g.size
    return (m1 - m0) / s_n * float(np.sqrt(p * (1.0 - p)))


def has_degenerate(scores) -> bool:
    """True when a score vector carries the +inf DSA sentinel."""
    return bool(~np.isfinite(np.asarray(scores, dtype=np.float64)).all())
