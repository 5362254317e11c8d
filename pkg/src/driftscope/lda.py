"""LDA baseline: collapsed Gibbs sampling and topic-importance shift ranking."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .corpus import Document


class LdaError(ValueError):
    pass


@dataclass
class LdaModel:
    k: int
    doc_ids: tuple[str, ...]
    vocabulary: tuple[str, ...]
    doc_topic: np.ndarray  # (n_docs, k), rows sum to 1
    topic_word: np.ndarray  # (k, n_words), rows sum to 1


@dataclass(frozen=True)
class TopicShift:
    topic: int
    importance_first: float
    importance_last: float
    gain: float


def _doc_frequency_filter(
    docs_tokens: Sequence[list[str]], min_doc_freq: int, max_doc_fraction: float
) -> list[str]:
    n_docs = len(docs_tokens)
    df: dict[str, int] = {}
    for toks in docs_tokens:
        for w in set(toks):
            df[w] = df.get(w, 0) + 1
    limit = max_doc_fraction * n_docs
    return sorted(w for w, c in df.items() if c >= min_doc_freq and c <= limit)


def lda_fit(
    docs: Sequence[Document],
    k: int = 100,
    passes: int = 20,
    min_doc_freq: int = 30,
    max_doc_fraction: float = 0.75,
    seed: int = 0,
    alpha: float | None = None,
) -> LdaModel:
    """Collapsed Gibbs sampling with symmetric priors alpha=50/k, beta=0.01.

    `alpha` overrides the 50/k default; at very small k that default swamps
    the per-document topic signal, so callers working at desk scale may want
    something below 1.  Initial assignments are drawn sequentially from the
    conditional given the counts so far, which breaks the symmetric start
    state.  One pass is a full sweep over every token; estimates come from the
    final-state counts with prior smoothing.  Deterministic given the seed.
    """
    if k < 1:
        raise LdaError("topic count must be positive")
    if len(docs) < k:
        warnings.warn(f"only {len(docs)} documents for {k} topics", stacklevel=2)
    docs_tokens = [[t for s in d.sentences for t in s] for d in docs]
    vocab = _doc_frequency_filter(docs_tokens, min_doc_freq, max_doc_fraction)
    if not vocab:
        raise LdaError("vocabulary empty after document-frequency filtering")
    word_id = {w: i for i, w in enumerate(vocab)}
    v = len(vocab)
    if alpha is None:
        alpha = 50.0 / k
    beta = 0.01

    rng = np.random.default_rng(seed)
    token_ids = [np.array([word_id[t] for t in toks if t in word_id], dtype=np.int64)
                 for toks in docs_tokens]
    n_docs = len(docs)
    n_mk = np.zeros((n_docs, k), dtype=np.int64)
    n_kt = np.zeros((k, v), dtype=np.int64)
    n_k = np.zeros(k, dtype=np.int64)
    assignments = []
    for m, ids in enumerate(token_ids):
        z = np.zeros(ids.shape[0], dtype=np.int64)
        assignments.append(z)
        for pos in range(ids.shape[0]):
            t = ids[pos]
            if k == 1:
                topic = 0
            else:
                p = (n_mk[m] + alpha) * (n_kt[:, t] + beta) / (n_k + v * beta)
                topic = int(rng.choice(k, p=p / p.sum()))
            z[pos] = topic
            n_mk[m, topic] += 1
            n_kt[topic, t] += 1
            n_k[topic] += 1

    if k > 1:
        for _ in range(passes):
            for m, ids in enumerate(token_ids):
                z = assignments[m]
                for pos in range(ids.shape[0]):
                    t = ids[pos]
                    old = z[pos]
                    n_mk[m, old] -= 1
                    n_kt[old, t] -= 1
                    n_k[old] -= 1
                    p = (n_mk[m] + alpha) * (n_kt[:, t] + beta) / (n_k + v * beta)
                    p = p / p.sum()
                    new = int(rng.choice(k, p=p))
                    z[pos] = new
                    n_mk[m, new] += 1
                    n_kt[new, t] += 1
                    n_k[new] += 1

    doc_topic = (n_mk + alpha) / (n_mk.sum(axis=1, keepdims=True) + k * alpha)
    topic_word = (n_kt + beta) / (n_kt.sum(axis=1, keepdims=True) + v * beta)
    return LdaModel(
        k=k,
        doc_ids=tuple(d.id for d in docs),
        vocabulary=tuple(vocab),
        doc_topic=doc_topic,
        topic_word=topic_word,
    )


def top_topic_words(model: LdaModel, topic: int, n: int = 10) -> list[str]:
    order = np.argsort(-model.topic_word[topic], kind="stable")[:n]
    return [model.vocabulary[i] for i in order]


def topic_shift_ranking(
    model: LdaModel,
    frame_of: Callable[[str], str],
    first_label: str,
    last_label: str,
    top_n: int = 10,
) -> list[TopicShift]:
    """Topics ordered by gain in mean document proportion, first -> last frame."""
    first_rows = [i for i, d in enumerate(model.doc_ids) if frame_of(d) == first_label]
    last_rows = [i for i, d in enumerate(model.doc_ids) if frame_of(d) == last_label]
    if not first_rows or not last_rows:
        raise LdaError("both boundary frames need at least one document in the model")
    imp_first = model.doc_topic[first_rows].mean(axis=0)
    imp_last = model.doc_topic[last_rows].mean(axis=0)
    shifts = [
        TopicShift(
            topic=t,
            importance_first=float(imp_first[t]),
            importance_last=float(imp_last[t]),
            gain=float(imp_last[t] - imp_first[t]),
        )
        for t in range(model.k)
    ]
    shifts.sort(key=lambda s: (-s.gain, s.topic))
    return shifts[: min(top_n, model.k)]
