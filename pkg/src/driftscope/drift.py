"""Per-word semantic change between the first and last frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Vocabulary
from .embeddings import EmbeddingStore


class DriftError(ValueError):
    pass


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; defined as 0.0 when either vector is all-zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DriftError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


@dataclass(frozen=True)
class ChangeReport:
    word: str
    similarity: float
    rank: int  # 1 = most changed (smallest similarity)


@dataclass(frozen=True)
class DifferenceVector:
    word: str
    d: np.ndarray  # first-frame embedding minus last-frame embedding
    magnitude: float


def _words_in_both(store: EmbeddingStore, vocab: Vocabulary, first: int, last: int) -> list[str]:
    return [
        w for w in vocab.words()
        if (w, first) in store.records and (w, last) in store.records
    ]


def semantic_change_scores(
    store: EmbeddingStore, vocab: Vocabulary, first: int, last: int
) -> list[ChangeReport]:
    """Cosine between a word's first- and last-frame vectors, ascending.

    Words missing in either boundary frame are omitted; rank 1 is the most
    changed word.
    """
    if first == last:
        raise DriftError("first and last frame must differ")
    words = _words_in_both(store, vocab, first, last)
    if not words:
        raise DriftError("no vocabulary word is present in both boundary frames")
    scored = [(cosine(store.get(w, first), store.get(w, last)), w) for w in words]
    scored.sort(key=lambda t: (t[0], t[1]))
    return [ChangeReport(word=w, similarity=s, rank=i + 1) for i, (s, w) in enumerate(scored)]


def difference_vectors(
    store: EmbeddingStore, vocab: Vocabulary, first: int, last: int
) -> list[DifferenceVector]:
    """d_w = u_w(first) - u_w(last) for every word present in both frames."""
    if first == last:
        raise DriftError("first and last frame must differ")
    words = _words_in_both(store, vocab, first, last)
    if not words:
        raise DriftError("no vocabulary word is present in both boundary frames")
    out = []
    for w in words:
        d = store.get(w, first) - store.get(w, last)
        out.append(DifferenceVector(word=w, d=d, magnitude=float(np.linalg.norm(d))))
    return out


def movement_neighbors(
    word: str,
    store: EmbeddingStore,
    vocab: Vocabulary,
    k: int,
    first: int,
    last: int,
    score_against_raw_difference: bool = False,
) -> tuple[list[str], list[str]]:
    """Words the target moved away from and toward.

    Candidates are scored by cosine between the drift direction (old->new by
    default; the raw first-minus-last difference when
    `score_against_raw_difference`) and their own first-frame vectors.
    Returns (diverted_from, moved_to); both empty when the target did not move.
    """
    u_first = store.get(word, first)
    u_last = store.get(word, last)
    if u_first is None or u_last is None:
        raise DriftError(f"word {word!r} is absent from frame {first} or {last}")
    if k < 1:
        raise DriftError("k must be positive")
    delta = (u_first - u_last) if score_against_raw_difference else (u_last - u_first)
    if not delta.any():
        return [], []
    scored = []
    for other in vocab.words():
        if other == word:
            continue
        u = store.get(other, first)
        if u is None:
            continue
        scored.append((cosine(delta, u), other))
    scored.sort(key=lambda t: (-t[0], t[1]))
    moved_to = [w for _, w in scored[:k]]
    diverted_from = [w for _, w in sorted(scored, key=lambda t: (t[0], t[1]))[:k]]
    return diverted_from, moved_to
