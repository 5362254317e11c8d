"""Affinity Propagation on difference vectors, plus cluster filters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .drift import DifferenceVector


class ClusteringError(ValueError):
    pass


@dataclass(frozen=True)
class APParams:
    damping: float = 0.9
    max_iterations: int = 1000
    convergence_window: int = 50
    preference: Optional[float] = None  # None -> median of off-diagonal similarities

    def __post_init__(self):
        if not 0.5 <= self.damping < 1.0:
            raise ClusteringError("damping must be in [0.5, 1)")
        if self.max_iterations < 1:
            raise ClusteringError("max_iterations must be positive")
        if not 1 <= self.convergence_window <= self.max_iterations:
            raise ClusteringError("convergence_window must be in [1, max_iterations]")


@dataclass(frozen=True)
class Cluster:
    id: int
    exemplar: str
    members: tuple[str, ...]  # sorted, includes exemplar


def ap_fit(points: Sequence[np.ndarray] | np.ndarray, params: APParams) -> tuple[list[int], np.ndarray]:
    """Affinity propagation message passing on s(i,j) = -||x_i - x_j||^2.

    Deterministic: no similarity jitter; argmax ties resolve to the lowest
    index.  Returns (exemplar indices, per-point exemplar assignment).
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ClusteringError("points must be a non-empty 2-D array")
    if not np.all(np.isfinite(X)):
        raise ClusteringError("points contain non-finite values")
    n = X.shape[0]
    if n == 1:
        return [0], np.array([0])

    sq = np.sum(X * X, axis=1)
    S = -(sq[:, None] + sq[None, :] - 2.0 * X @ X.T)
    np.fill_diagonal(S, 0.0)
    if params.preference is None:
        off = S[~np.eye(n, dtype=bool)]
        pref = float(np.median(off))
    else:
        pref = params.preference
    np.fill_diagonal(S, pref)

    lam = params.damping
    R = np.zeros((n, n))
    A = np.zeros((n, n))
    idx = np.arange(n)
    prev_exemplars: Optional[np.ndarray] = None
    stable = 0

    for _ in range(params.max_iterations):
        # Responsibilities
        AS = A + S
        first = np.argmax(AS, axis=1)
        max1 = AS[idx, first]
        AS[idx, first] = -np.inf
        max2 = np.max(AS, axis=1)
        Rnew = S - max1[:, None]
        Rnew[idx, first] = S[idx, first] - max2
        R = lam * R + (1 - lam) * Rnew

        # Availabilities
        Rp = np.maximum(R, 0.0)
        np.fill_diagonal(Rp, R.diagonal())
        col = Rp.sum(axis=0)
        Anew = col[None, :] - Rp
        diag = Anew.diagonal().copy()
        Anew = np.minimum(Anew, 0.0)
        np.fill_diagonal(Anew, diag)
        A = lam * A + (1 - lam) * Anew

        exemplars = (A.diagonal() + R.diagonal()) > 0
        if prev_exemplars is not None and np.array_equal(exemplars, prev_exemplars):
            stable += 1
            if stable >= params.convergence_window and exemplars.any():
                break
        else:
            stable = 0
        prev_exemplars = exemplars

    exemplar_idx = np.flatnonzero((A.diagonal() + R.diagonal()) > 0)
    if exemplar_idx.size == 0:
        # Degenerate (e.g. all-identical points): fall back to a single cluster.
        exemplar_idx = np.array([int(np.argmax(A.diagonal() + R.diagonal()))])
    assignment = exemplar_idx[np.argmax(S[:, exemplar_idx], axis=1)]
    assignment[exemplar_idx] = exemplar_idx
    return exemplar_idx.tolist(), assignment


def cluster_drift(diffs: Sequence[DifferenceVector], params: APParams) -> list[Cluster]:
    """Cluster words by their difference vectors; one cluster per exemplar."""
    if not diffs:
        raise ClusteringError("no difference vectors to cluster")
    ordered = sorted(diffs, key=lambda dv: dv.word)
    words = [dv.word for dv in ordered]
    X = np.stack([dv.d for dv in ordered])
    exemplars, assignment = ap_fit(X, params)
    clusters = []
    for cid, ex in enumerate(exemplars):
        members = tuple(sorted(words[i] for i in np.flatnonzero(assignment == ex)))
        clusters.append(Cluster(id=cid, exemplar=words[ex], members=members))
    return clusters


def first_quartile(values: Sequence[float]) -> float:
    """Linear-interpolation first quartile."""
    return float(np.quantile(np.asarray(values, dtype=np.float64), 0.25))


def filter_clusters(
    clusters: Sequence[Cluster],
    diffs: Sequence[DifferenceVector],
    min_size: int = 5,
) -> list[Cluster]:
    """Drop weak drifters then small clusters.

    Members whose drift magnitude falls strictly below the first quartile of
    all clustered words' magnitudes are removed (strict comparison so an
    all-equal magnitude distribution keeps everything); clusters left with
    fewer than `min_size` members are dropped.  If a removal took the
    exemplar, the surviving member nearest to it in difference-vector space
    is promoted.
    """
    by_word = {dv.word: dv for dv in diffs}
    clustered = [w for c in clusters for w in c.members]
    missing = [w for w in clustered if w not in by_word]
    if missing:
        raise ClusteringError(f"no difference vector for clustered words: {missing[:5]}")
    if not clustered:
        return []
    q1 = first_quartile([by_word[w].magnitude for w in clustered])

    out = []
    for c in clusters:
        kept = tuple(sorted(w for w in c.members if by_word[w].magnitude >= q1))
        if len(kept) < min_size:
            continue
        if c.exemplar in kept:
            exemplar = c.exemplar
        else:
            ex_d = by_word[c.exemplar].d
            exemplar = min(kept, key=lambda w: (float(np.linalg.norm(by_word[w].d - ex_d)), w))
        out.append(Cluster(id=len(out), exemplar=exemplar, members=kept))
    return out
