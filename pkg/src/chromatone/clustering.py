"""k-means++ seeding, Lloyd k-means and BIC-driven X-means."""

from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass(frozen=True)
class ClusterConfig:
    initial_k: int = 2
    max_k: int = 8
    seed: int = 42
    max_iterations: int = 100
    tolerance: float = 1e-4

    def __post_init__(self):
        if self.initial_k < 1:
            raise ValueError("initial_k must be at least 1")
        if self.initial_k > self.max_k:
            raise ValueError(f"initial_k={self.initial_k} exceeds max_k={self.max_k}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass
class ClusterModel:
    centers: np.ndarray
    assignments: np.ndarray
    counts: np.ndarray
    inertia: float
    # inertia after each assignment step; non-increasing for a single Lloyd run
    history: list = field(default_factory=list)

    @property
    def k(self):
        return len(self.centers)


def _as_points(points):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("points must be a non-empty (n, d) array")
    return np.ascontiguousarray(pts)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _distinct_count(pts):
    return len(np.unique(pts, axis=0))


def _seed_centers(pts, k, rng):
    n = len(pts)
    centers = np.empty((k, pts.shape[1]))
    centers[0] = pts[rng.integers(n)]
    d2 = np.sum((pts - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        cum = np.cumsum(d2)
        total = cum[-1]
        if total <= 0.0:
            raise ValueError(f"k={k} exceeds the number of distinct points")
        idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
        idx = min(idx, n - 1)
        while d2[idx] == 0.0:
            idx -= 1
        centers[i] = pts[idx]
        d2 = np.minimum(d2, np.sum((pts - centers[i]) ** 2, axis=1))
    return centers


def kmeans_pp_init(points, k, seed):
    """Pick ``k`` distinct initial centers by D-squared sampling.

    ``seed`` may be an integer or a ``numpy.random.Generator``.
    """
    pts = _as_points(points)
    if k < 1:
        raise ValueError("k must be positive")
    distinct = _distinct_count(pts)
    if k > distinct:
        raise ValueError(f"k={k} exceeds the {distinct} distinct points available")
    return _seed_centers(pts, k, _rng(seed))


def _assign(pts, centers):
    labels, d2 = kernels.nearest_center(pts, centers)
    k = len(centers)
    counts = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(counts == 0)
    while len(empty):
        # reseed each empty cluster on the point currently worst served
        for j in empty:
            far = int(np.argmax(d2))
            centers[j] = pts[far]
            d2[far] = 0.0
        labels, d2 = kernels.nearest_center(pts, centers)
        counts = np.bincount(labels, minlength=k)
        new_empty = np.flatnonzero(counts == 0)
        if len(new_empty) >= len(empty):
            break
        empty = new_empty
    return labels, d2, counts


def lloyd(points, centers, max_iterations=100, tolerance=1e-4):
    """Run Lloyd iterations from the given centers."""
    pts = _as_points(points)
    centers = np.array(centers, dtype=np.float64, copy=True)
    k, d = centers.shape
    history = []
    for _ in range(max_iterations):
        labels, d2, counts = _assign(pts, centers)
        history.append(float(d2.sum()))
        sums, _ = kernels.cluster_sums(pts, labels, k)
        new = sums / np.maximum(counts, 1)[:, None]
        new[counts == 0] = centers[counts == 0]
        shift = np.sqrt(np.max(np.sum((new - centers) ** 2, axis=1)))
        centers = new
        if shift < tolerance:
            break
    # final assignment, then snap centers to the exact means of that partition
    labels, d2, counts = _assign(pts, centers)
    history.append(float(d2.sum()))
    sums, _ = kernels.cluster_sums(pts, labels, k)
    nonempty = counts > 0
    centers[nonempty] = sums[nonempty] / counts[nonempty, None]
    inertia = float(np.sum((pts - centers[labels]) ** 2))
    history.append(min(inertia, history[-1]))
    return ClusterModel(centers, labels, counts, inertia, history)


def kmeans(points, k, cfg=ClusterConfig(), n_init=1):
    """k-means with k-means++ seeding; keeps the best of ``n_init`` restarts."""
    pts = _as_points(points)
    distinct = _distinct_count(pts)
    if k > distinct:
        raise ValueError(f"k={k} exceeds the {distinct} distinct points available")
    rng = _rng(cfg.seed)
    best = None
    for _ in range(max(1, n_init)):
        init = _seed_centers(pts, k, rng)
        model = lloyd(pts, init, cfg.max_iterations, cfg.tolerance)
        if best is None or model.inertia < best.inertia:
            best = model
    return best


def bic_score(points, centers, labels):
    """BIC of a hard clustering under identical spherical Gaussians.

    The shared per-dimension variance is estimated as SSE / (d * (n - k)).
    Larger is better. A zero-variance fit with n > k scores ``+inf``.
    """
    pts = _as_points(points)
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    labels = np.asarray(labels)
    n, d = pts.shape
    k = len(centers)
    if n <= k:
        return -np.inf
    counts = np.bincount(labels, minlength=k)
    sse = float(np.sum((pts - centers[labels]) ** 2))
    variance = sse / (d * (n - k))
    if variance <= 0.0:
        return np.inf
    nz = counts[counts > 0]
    loglik = (
        float(np.sum(nz * np.log(nz / n)))
        - 0.5 * n * d * np.log(2.0 * np.pi * variance)
        - 0.5 * d * (n - k)
    )
    n_params = (k - 1) + d * k + 1
    return loglik - 0.5 * n_params * np.log(n)


def _single_cluster(pts):
    center = pts.mean(axis=0)[None, :]
    labels = np.zeros(len(pts), dtype=np.int64)
    inertia = float(np.sum((pts - center) ** 2))
    return ClusterModel(center, labels, np.array([len(pts)]), inertia, [inertia])


def _splittable(sub):
    return len(sub) >= 3 and bool(np.any(np.ptp(sub, axis=0) > 0.0))


SPLIT_RESTARTS = 3


def _best_split(sub, rng, cfg):
    best = None
    for _ in range(SPLIT_RESTARTS):
        child = lloyd(sub, _seed_centers(sub, 2, rng), cfg.max_iterations, cfg.tolerance)
        if best is None or child.inertia < best.inertia:
            best = child
    return best


def xmeans(points, cfg=ClusterConfig()):
    """Grow k from ``cfg.initial_k`` by accepting cluster splits that raise BIC.

    Each cluster is offered a local 2-means split (best of a few seedings).
    Because the variance is shared by every cluster, a split is scored in
    the context of the whole model: the full BIC with the cluster replaced
    by its two children must beat the current full BIC. The grown model is
    finally compared against the one-cluster model, so a single blob comes
    back as one cluster.
    """
    pts = _as_points(points)
    rng = _rng(cfg.seed)
    distinct = _distinct_count(pts)
    if distinct == 1:
        return _single_cluster(pts)

    k0 = min(cfg.initial_k, distinct)
    model = lloyd(pts, _seed_centers(pts, k0, rng), cfg.max_iterations, cfg.tolerance)

    while model.k < cfg.max_k:
        proposals = []
        current = bic_score(pts, model.centers, model.assignments)
        for j in range(model.k):
            members = np.flatnonzero(model.assignments == j)
            sub = pts[members]
            if not _splittable(sub):
                continue
            child = _best_split(sub, rng, cfg)
            centers = np.vstack([model.centers, child.centers[1:]])
            centers[j] = child.centers[0]
            labels = model.assignments.copy()
            labels[members[child.assignments == 1]] = model.k
            gain = bic_score(pts, centers, labels) - current
            if gain > 0:
                proposals.append((gain, j, child.centers))
        if not proposals:
            break
        proposals.sort(key=lambda p: -p[0])
        accepted = {j: c for _, j, c in proposals[: cfg.max_k - model.k]}
        centers = []
        for j in range(model.k):
            if j in accepted:
                centers.extend(accepted[j])
            else:
                centers.append(model.centers[j])
        model = lloyd(pts, np.array(centers), cfg.max_iterations, cfg.tolerance)

    if model.k > 1:
        one = _single_cluster(pts)
        if bic_score(pts, one.centers, one.assignments) >= bic_score(pts, model.centers, model.assignments):
            model = one
    return model


def dominant_cluster(model: ClusterModel):
    """Center of the most populous cluster and its share of the points.

    Ties go to the lowest cluster index.
    """
    idx = int(np.argmax(model.counts))
    return model.centers[idx], float(model.counts[idx] / model.counts.sum())
