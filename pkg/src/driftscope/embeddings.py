"""Per-(word, frame) average embedding store: native PPMI embedder and TSV interchange."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .corpus import SlicedCorpus, Vocabulary

HEADER_MAGIC = "#driftscope-embeddings"
FORMAT_VERSION = "v1"


class EmbeddingError(ValueError):
    pass


@dataclass
class EmbeddingStore:
    """Immutable-after-construction map (word, frame_index) -> (vector, count)."""

    dim: int
    frame_labels: tuple[str, ...]
    records: dict[tuple[str, int], tuple[np.ndarray, int]] = field(default_factory=dict)
    provenance: str = "native"
    source: str = ""
    zero_rows: frozenset[tuple[str, int]] = frozenset()

    def get(self, word: str, frame_index: int) -> Optional[np.ndarray]:
        rec = self.records.get((word, frame_index))
        return rec[0] if rec is not None else None

    def count(self, word: str, frame_index: int) -> Optional[int]:
        rec = self.records.get((word, frame_index))
        return rec[1] if rec is not None else None

    def words_in_frame(self, frame_index: int) -> set[str]:
        return {w for (w, f) in self.records if f == frame_index}

    def __len__(self) -> int:
        return len(self.records)


def _format_float(x: float) -> str:
    return "%.9g" % x


def export_embeddings(store: EmbeddingStore, path: str | Path) -> None:
    """Write the interchange TSV; floats as decimal text, 9 significant digits."""
    p = Path(path)
    lines = [
        "\t".join(
            [HEADER_MAGIC, FORMAT_VERSION, f"dim={store.dim}",
             "frames=" + ",".join(store.frame_labels)]
        )
    ]
    for (word, fi) in sorted(store.records):
        vec, count = store.records[(word, fi)]
        lines.append(
            f"{word}\t{fi}\t{count}\t" + " ".join(_format_float(v) for v in vec)
        )
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")


def import_embeddings(path: str | Path) -> EmbeddingStore:
    """Parse an interchange TSV into a store, validating every row."""
    p = Path(path)
    if not p.exists():
        raise EmbeddingError(f"embedding file does not exist: {p}")
    with p.open(encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        parts = header.split("\t")
        if len(parts) != 4 or parts[0] != HEADER_MAGIC or parts[1] != FORMAT_VERSION:
            raise EmbeddingError(f"{p}:1: bad header {header!r}")
        if not parts[2].startswith("dim=") or not parts[3].startswith("frames="):
            raise EmbeddingError(f"{p}:1: bad header {header!r}")
        dim = int(parts[2][4:])
        frame_labels = tuple(parts[3][7:].split(","))
        records: dict[tuple[str, int], tuple[np.ndarray, int]] = {}
        zero_rows = set()
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise EmbeddingError(f"{p}:{lineno}: expected 4 tab-separated fields")
            word, fi_s, count_s, vec_s = cols
            fi = int(fi_s)
            count = int(count_s)
            if count < 1:
                raise EmbeddingError(f"{p}:{lineno}: occurrence count must be >= 1")
            vec = np.array([float(v) for v in vec_s.split()], dtype=np.float64)
            if vec.shape[0] != dim:
                raise EmbeddingError(
                    f"{p}:{lineno}: vector has {vec.shape[0]} components, header says {dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise EmbeddingError(f"{p}:{lineno}: non-finite value")
            if (word, fi) in records:
                raise EmbeddingError(f"{p}:{lineno}: duplicate row for ({word!r}, {fi})")
            records[(word, fi)] = (vec, count)
            if not vec.any():
                zero_rows.add((word, fi))
    return EmbeddingStore(
        dim=dim, frame_labels=frame_labels, records=records,
        provenance="imported", source=str(p), zero_rows=frozenset(zero_rows),
    )


def _context_vocabulary(vocab: Vocabulary, size: int) -> list[str]:
    # Most frequent vocabulary words over the whole corpus; ties by word so the
    # axis order is stable across platforms.
    ranked = sorted(vocab.entries, key=lambda w: (-vocab.entries[w].total_frequency, w))
    return ranked[:size]


def compute_native_embeddings(
    corpus: SlicedCorpus,
    vocab: Vocabulary,
    context_vocab_size: int = 2000,
    window: int = 5,
    shift: float = 0.0,
) -> EmbeddingStore:
    """PPMI rows against a corpus-wide context vocabulary, one row per (word, frame).

    The context axes are shared across frames, so vectors from different frames
    are directly comparable with no alignment step.
    """
    if shift < 0:
        raise EmbeddingError("PPMI shift must be >= 0")
    context = _context_vocabulary(vocab, context_vocab_size)
    if len(context) < 2:
        raise EmbeddingError("context vocabulary has fewer than 2 words")
    ctx_index = {w: i for i, w in enumerate(context)}
    dim = len(context)
    n_frames = len(corpus.plan)

    vocab_words = set(vocab.entries)
    # Per-frame co-occurrence tables (vocab word -> context counts) and
    # per-frame occurrence counts.
    cooc: list[dict[str, np.ndarray]] = [dict() for _ in range(n_frames)]
    occ: list[dict[str, int]] = [dict() for _ in range(n_frames)]

    for doc in corpus.documents:
        fi = doc.frame_index
        table = cooc[fi]
        counts = occ[fi]
        for sent in doc.sentences:
            n = len(sent)
            for i, w in enumerate(sent):
                if w not in vocab_words:
                    continue
                counts[w] = counts.get(w, 0) + 1
                row = table.get(w)
                lo = max(0, i - window)
                hi = min(n, i + window + 1)
                for j in range(lo, hi):
                    if j == i:
                        continue
                    ci = ctx_index.get(sent[j])
                    if ci is None:
                        continue
                    if row is None:
                        row = table[w] = np.zeros(dim, dtype=np.float64)
                    row[ci] += 1.0

    records: dict[tuple[str, int], tuple[np.ndarray, int]] = {}
    zero_rows = set()
    for fi in range(n_frames):
        table = cooc[fi]
        counts = occ[fi]
        if not counts:
            continue
        words = sorted(counts)
        mat = np.zeros((len(words), dim), dtype=np.float64)
        for r, w in enumerate(words):
            row = table.get(w)
            if row is not None:
                mat[r] = row
        total = mat.sum()
        if total > 0:
            row_marg = mat.sum(axis=1, keepdims=True)
            col_marg = mat.sum(axis=0, keepdims=True)
            with np.errstate(divide="ignore", invalid="ignore"):
                pmi = np.log(mat * total / (row_marg * col_marg))
            pmi[~np.isfinite(pmi)] = 0.0
            ppmi = np.maximum(pmi - shift, 0.0)
        else:
            ppmi = mat
        for r, w in enumerate(words):
            vec = ppmi[r].copy()
            records[(w, fi)] = (vec, counts[w])
            if not vec.any():
                zero_rows.add((w, fi))

    return EmbeddingStore(
        dim=dim,
        frame_labels=corpus.plan.labels,
        records=records,
        provenance="native",
        source=f"ppmi(context_vocab_size={len(context)}, window={window}, shift={shift})",
        zero_rows=frozenset(zero_rows),
    )
