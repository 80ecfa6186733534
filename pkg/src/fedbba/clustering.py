"""Density clustering of projection scores and the benign/suspicious rule.

DBSCAN is implemented directly (Euclidean metric, neighbor counts inclusive
of self, distances compared with <= eps). Border points are attached to the
first core cluster that reaches them when points are expanded in index order,
which keeps the labeling deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, InvalidInput

NOISE = -1


@dataclass(frozen=True)
class DbscanParams:
    eps: float = 0.6
    min_pts: int = 5

    def __post_init__(self):
        if not self.eps > 0:
            raise InvalidConfig("DbscanParams: eps must be > 0")
        if self.min_pts < 1:
            raise InvalidConfig("DbscanParams: min_pts must be >= 1")


@dataclass
class ClusterLabels:
    """Per-point labels: -1 for noise, 0..k-1 for clusters."""

    labels: np.ndarray

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max() + 1) if self.labels.size else 0


@dataclass
class SuspicionResult:
    """Outcome of the majority-cluster rule.

    suspicious: indices outside the benign (largest) cluster.
    no_confidence: every point was noise; callers should fall back to
    reputation-only weighting for the round.
    """

    suspicious: set[int]
    no_confidence: bool = False


def dbscan(points, params: DbscanParams) -> ClusterLabels:
    """Standard DBSCAN over the rows of `points`."""
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise InvalidInput("dbscan: need a non-empty 2-D point array")
    n = P.shape[0]
    d2 = np.sum((P[:, None, :] - P[None, :, :]) ** 2, axis=2)
    reach = d2 <= params.eps**2
    neighbor_lists = [np.flatnonzero(reach[i]) for i in range(n)]
    core = np.array([len(nb) >= params.min_pts for nb in neighbor_lists])

    labels = np.full(n, NOISE, dtype=int)
    cluster = 0
    for start in range(n):
        if labels[start] != NOISE or not core[start]:
            continue
        labels[start] = cluster
        queue = list(neighbor_lists[start])
        qi = 0
        while qi < len(queue):
            j = int(queue[qi])
            qi += 1
            if labels[j] == NOISE:
                labels[j] = cluster
                if core[j]:
                    queue.extend(neighbor_lists[j])
        cluster += 1
    return ClusterLabels(labels=labels)


def identify_suspicious(labels: ClusterLabels, scores) -> SuspicionResult:
    """Largest cluster is benign; everything else is suspicious.

    Ties between equally-largest clusters are broken by picking the cluster
    with the smaller mean L2 score norm as benign (pursuit projections push
    outliers toward extreme scores). All-noise labelings return an empty
    suspicious set flagged no-confidence.
    """
    lab = np.asarray(labels.labels)
    S = np.asarray(scores, dtype=float)
    if S.shape[0] != lab.shape[0]:
        raise InvalidInput("identify_suspicious: labels and scores misaligned")
    cluster_ids = [c for c in np.unique(lab) if c != NOISE]
    if not cluster_ids:
        return SuspicionResult(suspicious=set(), no_confidence=True)
    norms = np.linalg.norm(S, axis=1)
    sizes = {c: int(np.sum(lab == c)) for c in cluster_ids}
    biggest = max(sizes.values())
    candidates = [c for c in cluster_ids if sizes[c] == biggest]
    benign = min(candidates, key=lambda c: (float(norms[lab == c].mean()), c))
    return SuspicionResult(suspicious=set(np.flatnonzero(lab != benign).tolist()))


def standardize_columns(X) -> np.ndarray:
    """Per-column z-score; columns with (near-)zero spread map to zero."""
    A = np.asarray(X, dtype=float)
    if A.ndim != 2:
        raise InvalidInput("standardize_columns: need a 2-D array")
    mu = A.mean(axis=0)
    sd = A.std(axis=0)
    out = np.zeros_like(A)
    ok = sd > 1e-12
    out[:, ok] = (A[:, ok] - mu[ok]) / sd[ok]
    return out


def silhouette(points, membership) -> float:
    """Mean silhouette coefficient of a labeled partition (Euclidean).

    Points in singleton groups contribute 0, the usual convention.
    """
    P = np.asarray(points, dtype=float)
    m = np.asarray(membership)
    if P.shape[0] != m.shape[0] or P.shape[0] < 2:
        raise InvalidInput("silhouette: need >= 2 aligned points and labels")
    groups = np.unique(m)
    if groups.size < 2:
        raise InvalidInput("silhouette: need at least 2 groups")
    dist = np.sqrt(np.sum((P[:, None, :] - P[None, :, :]) ** 2, axis=2))
    vals = np.zeros(P.shape[0])
    for i in range(P.shape[0]):
        same = (m == m[i]) & (np.arange(P.shape[0]) != i)
        if not np.any(same):
            continue
        a = dist[i, same].mean()
        b = min(dist[i, m == g].mean() for g in groups if g != m[i])
        vals[i] = (b - a) / max(a, b) if max(a, b) > 0 else 0.0
    return float(vals.mean())
