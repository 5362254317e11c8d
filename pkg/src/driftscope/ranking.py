"""Cluster ranking by Earth Mover's Distance over sentence co-occurrence histograms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .clustering import Cluster
from .corpus import SlicedCorpus

N_BINS = 10  # bin n counts sentences with exactly n distinct cluster words; n >= 10 clips


class RankingError(ValueError):
    pass


@dataclass(frozen=True)
class CooccurrenceHistogram:
    bins: tuple[int, ...]  # index 0 holds n=1
    total_sentences: int

    def __post_init__(self):
        if len(self.bins) != N_BINS:
            raise RankingError(f"histogram must have {N_BINS} bins")

    def normalized(self) -> np.ndarray:
        """Per-sentence probabilities: bin_n / total sentences in the frame."""
        if self.total_sentences == 0:
            return np.zeros(N_BINS)
        return np.asarray(self.bins, dtype=np.float64) / self.total_sentences


@dataclass(frozen=True)
class ClusterScore:
    cluster: Cluster
    emd: float
    rank: int  # 1 = highest emd
    hist_first: CooccurrenceHistogram
    hist_last: CooccurrenceHistogram


def cooccurrence_histogram(
    cluster: Cluster, frame_sentences: Iterable[frozenset[str]]
) -> CooccurrenceHistogram:
    """Distribution of sentences over the number of distinct cluster words they contain."""
    if not cluster.members:
        raise RankingError("cluster has no members")
    members = set(cluster.members)
    bins = [0] * N_BINS
    total = 0
    for sent in frame_sentences:
        total += 1
        y = len(members & sent)
        if y >= 1:
            bins[min(y, N_BINS) - 1] += 1
    return CooccurrenceHistogram(bins=tuple(bins), total_sentences=total)


def emd(h_first: CooccurrenceHistogram, h_last: CooccurrenceHistogram, mode: str = "counts") -> float:
    """1-D optimal transport cost between the two histograms, ground distance |i-j|.

    `normalized` divides each histogram by its own mass first (the
    1-Wasserstein distance); `counts` runs the same cumulative-difference
    formula on raw counts, so surplus mass pays one unit per bin it is pushed
    past and the value scales with count differences.
    """
    a = np.asarray(h_first.bins, dtype=np.float64)
    b = np.asarray(h_last.bins, dtype=np.float64)
    if mode == "normalized":
        if a.sum() == 0 or b.sum() == 0:
            raise RankingError("normalized EMD is undefined for an all-zero histogram")
        a = a / a.sum()
        b = b / b.sum()
    elif mode != "counts":
        raise RankingError(f"unknown EMD mode {mode!r}")
    return float(np.abs(np.cumsum(a - b)).sum())


def rank_clusters(
    clusters: Sequence[Cluster],
    corpus: SlicedCorpus,
    first: int,
    last: int,
    mode: str = "counts",
) -> list[ClusterScore]:
    """Score every cluster by boundary-frame EMD and rank descending.

    Ties break toward the larger cluster, then by exemplar in sorted order.
    """
    scored = []
    for c in clusters:
        hf = cooccurrence_histogram(c, corpus.frame_sentences[first])
        hl = cooccurrence_histogram(c, corpus.frame_sentences[last])
        scored.append((emd(hf, hl, mode), c, hf, hl))
    scored.sort(key=lambda t: (-t[0], -len(t[1].members), t[1].exemplar))
    return [
        ClusterScore(cluster=c, emd=v, rank=i + 1, hist_first=hf, hist_last=hl)
        for i, (v, c, hf, hl) in enumerate(scored)
    ]
