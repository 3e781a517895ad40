"""Hull margin, point-to-hull projection, and the greedy hull point-set
approximation.

The hull of a training matrix is approximated by a sparse subset of its
rows: starting from an extremal seed, the training point farthest from the
convex hull of the current subset is added until that farthest distance
drops to the margin epsilon (the mean self-excluded nearest-neighbor
distance). Distances reported by the projection solver are always feasible
upper bounds, so the cover guarantee survives early stopping.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from . import backend
from .errors import DegenerateTrainingSet, DimensionMismatch, NonFiniteValue

# Projection tolerance policy: tight relative tolerance while building /
# classifying against epsilon, absolute tolerance for standalone scoring.
BUILD_TOL_FACTOR = 1e-4
SCORE_TOL = 1e-6

_EPS_CHUNK = 256


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """Validate and normalize a 2-D row-major sample matrix."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name}: expected 2-D array, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"{name}: empty matrix {arr.shape}")
    if not np.isfinite(arr).all():
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteValue(f"{name}: non-finite value at row {bad[0]}, column {bad[1]}")
    return arr


def as_vector(data, name: str = "vector") -> np.ndarray:
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name}: expected 1-D vector, got ndim={arr.ndim}")
    if not np.isfinite(arr).all():
        raise NonFiniteValue(f"{name}: non-finite value")
    return arr


@dataclass(frozen=True)
class BuildStats:
    iterations: int
    max_residual: float


@dataclass(frozen=True)
class HullApprox:
    """Approximated hull point set with its margin and provenance."""

    points: np.ndarray            # (K, d), rows copied bit-identical from training rows
    epsilon: float
    source_rows: list[int]
    build_stats: BuildStats | None = None

    def __post_init__(self):
        if self.epsilon <= 0:
            raise DegenerateTrainingSet(f"epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True)
class Projection:
    """Result of projecting one query point onto a hull point set."""

    point: np.ndarray             # (d,)
    distance: float
    coefficients: np.ndarray      # (K,) simplex weights over hull points
    gap: float = 0.0
    iterations: int = 0
    converged: bool = True


def nearest_neighbor_distances(train: np.ndarray) -> np.ndarray:
    """Self-excluded nearest-neighbor distance per row, O(N^2 d) chunked."""
    n = train.shape[0]
    out = np.empty(n)
    for start in range(0, n, _EPS_CHUNK):
        stop = min(start + _EPS_CHUNK, n)
        d = cdist(train[start:stop], train)
        d[np.arange(stop - start), np.arange(start, stop)] = np.inf
        out[start:stop] = d.min(axis=1)
    return out


def compute_epsilon(train) -> float:
    """Mean self-excluded nearest-neighbor distance of the training rows.

    The sum is accumulated in ascending row index order so the value is
    bit-stable across runs and thread counts.
    """
    X = as_matrix(train, "train")
    n = X.shape[0]
    if n < 2:
        raise DegenerateTrainingSet("epsilon needs at least 2 training rows")
    nn = nearest_neighbor_distances(X)
    total = 0.0
    for v in nn:
        total += float(v)
    eps = total / n
    if eps == 0.0:
        raise DegenerateTrainingSet("every training row is duplicated; epsilon = 0")
    return eps


def project_to_hull(query, hull_points, tol: float, lam0=None,
                    coarse: bool = False) -> Projection:
    """Minimizer of ||query - sum(lam_k c_k)|| over the unit simplex.

    The returned distance is within `tol` (absolute) of the true minimum
    when `converged` is set; otherwise it is still a feasible upper bound
    and the flag reports the miss. With `coarse` the solver additionally
    accepts a duality gap of tol * distance, which still bounds the
    distance error by tol but converges far faster for faraway queries;
    the hull builder uses this, standalone scoring does not.
    """
    q = as_vector(query, "query")
    C = as_matrix(hull_points, "hull_points")
    if q.shape[0] != C.shape[1]:
        raise DimensionMismatch(
            f"query dimension {q.shape[0]} != hull dimension {C.shape[1]}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    K = C.shape[0]
    if K == 1:
        diff = q - C[0]
        return Projection(point=C[0].copy(), distance=float(np.linalg.norm(diff)),
                          coefficients=np.ones(1), gap=0.0, iterations=0, converged=True)

    max_iter = 1000 + 20 * K
    lam, dist, gap, n_iter, converged = backend.fw_project(
        C, q, tol * tol, max_iter, lam0, tol if coarse else 0.0)
    return Projection(point=lam @ C, distance=dist, coefficients=lam,
                      gap=gap, iterations=n_iter, converged=bool(converged))


def _score_tol(q: np.ndarray) -> float:
    return SCORE_TOL * max(1.0, float(np.linalg.norm(q)))


def distance_to_hull(query, hull: HullApprox, tol: float | None = None) -> float:
    """Distance from `query` to the approximated hull (standalone scoring)."""
    q = as_vector(query, "query")
    if tol is None:
        tol = _score_tol(q)
    return project_to_hull(q, hull.points, tol).distance


def is_closure(query, hull: HullApprox) -> bool:
    """True iff the query is inside or on the epsilon boundary of the hull."""
    tol = hull.epsilon * BUILD_TOL_FACTOR
    return distance_to_hull(query, hull, tol=tol) <= hull.epsilon


def hull_distances(test, hull: HullApprox, tol: float | None = None) -> np.ndarray:
    """Batch distance_to_hull over the rows of a test matrix.

    Parallelized across rows (HULLCERT_THREADS caps workers); results land
    in disjoint slots so the output is identical to the sequential order.
    """
    T = as_matrix(test, "test")
    if T.shape[1] != hull.points.shape[1]:
        raise DimensionMismatch(
            f"test dimension {T.shape[1]} != hull dimension {hull.points.shape[1]}")
    out = np.empty(T.shape[0])

    def score(i):
        out[i] = distance_to_hull(T[i], hull, tol=tol)

    workers = min(backend.thread_count(), T.shape[0])
    if workers <= 1:
        for i in range(T.shape[0]):
            score(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(score, range(T.shape[0])))
    return out


def build_hull_approximation(train) -> HullApprox:
    """Greedy farthest-point hull approximation.

    Seeds with the row farthest from the coordinate-wise mean, then adds
    the remaining row farthest from the hull of the current set until that
    farthest distance is <= epsilon. Ties break toward the lowest row
    index. Per-row hull distances only shrink as the set grows, so stale
    values and nearest-member distances are kept as lazy upper bounds and
    only the current maximum is re-projected.
    """
    X = as_matrix(train, "train")
    eps = compute_epsilon(X)
    n, d = X.shape
    tol = eps * BUILD_TOL_FACTOR

    mean = X.mean(axis=0)
    seed = int(np.argmax(np.linalg.norm(X - mean, axis=1)))

    hull_rows = [seed]
    remaining = np.ones(n, dtype=bool)
    remaining[seed] = False

    # upper bounds on hull distance: nearest-member distance to start with
    ub = np.linalg.norm(X - X[seed], axis=1)
    ub[seed] = -np.inf
    fresh = np.zeros(n, dtype=bool)
    lam_cache: dict[int, np.ndarray] = {}

    rounds = 0
    max_residual = 0.0
    while remaining.any():
        masked = np.where(remaining, ub, -np.inf)
        i = int(np.argmax(masked))  # first occurrence = lowest index on ties
        if not fresh[i]:
            k = len(hull_rows)
            lam0 = None
            cached = lam_cache.get(i)
            if cached is not None:
                lam0 = np.zeros(k)
                lam0[: cached.shape[0]] = cached
            proj = project_to_hull(X[i], X[hull_rows], tol, lam0=lam0, coarse=True)
            lam_cache[i] = proj.coefficients
            ub[i] = min(ub[i], proj.distance)
            fresh[i] = True
            continue
        dist = ub[i]
        if dist <= eps:
            max_residual = dist
            break
        hull_rows.append(i)
        remaining[i] = False
        rounds += 1
        max_residual = dist
        np.minimum(ub, np.linalg.norm(X - X[i], axis=1), out=ub)
        ub[i] = -np.inf
        fresh[:] = False

    points = X[hull_rows].copy()
    return HullApprox(points=points, epsilon=eps, source_rows=list(hull_rows),
                      build_stats=BuildStats(iterations=rounds, max_residual=float(max(max_residual, 0.0))))
