"""Average contextual embeddings per (word, time frame) from a transformer encoder.

For every target word and frame, each sentence containing the word is run
through the encoder; the word's vector for one occurrence is the mean of its
final-layer sub-token vectors, and the exported vector is the mean over all
occurrences in the frame.  Output is the driftscope embedding interchange
TSV, written atomically.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .corpus_io import FramePlan, read_sentences

HEADER_MAGIC = "#driftscope-embeddings"
FORMAT_VERSION = "v1"


class ExportError(RuntimeError):
    pass


@dataclass
class ExportJob:
    corpus_path: str
    plan: FramePlan
    vocab_path: str
    model: str  # model name or local path
    out_path: str
    corpus_format: str = "jsonl"
    batch_size: int = 16
    device: str = "cpu"


@dataclass(frozen=True)
class _Task:
    """One encoder input: a word window and the occurrences to pool from it."""

    words: tuple[str, ...]
    occurrences: tuple[tuple[str, int], ...]  # (target word, position in words)


def load_vocabulary(path: str | Path) -> list[str]:
    p = Path(path)
    if not p.exists():
        raise ExportError(f"vocabulary file does not exist: {p}")
    words = [line.strip() for line in p.read_text(encoding="utf-8").splitlines()]
    words = [w for w in words if w]
    if not words:
        raise ExportError(f"vocabulary file is empty: {p}")
    return words


def _load_encoder(identifier: str, device: str):
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(identifier, use_fast=True)
        model = AutoModel.from_pretrained(identifier)
    except Exception as e:
        raise ExportError(f"cannot load encoder {identifier!r}: {e}") from e
    model.to(device)
    model.eval()
    return tokenizer, model


def _max_input_tokens(tokenizer, model) -> int:
    limit = getattr(tokenizer, "model_max_length", None)
    if limit is None or limit > 1_000_000:
        limit = getattr(model.config, "max_position_embeddings", 512)
    return int(limit)


def _build_tasks(sentences, targets: set[str], tokenizer, max_tokens: int) -> list[_Task]:
    """Whole sentences when they fit; otherwise one centered window per occurrence."""
    specials = tokenizer.num_special_tokens_to_add()
    budget = max_tokens - specials
    tasks = []
    for words in sentences:
        positions = [(w, i) for i, w in enumerate(words) if w in targets]
        if not positions:
            continue
        pieces = [max(1, len(tokenizer.tokenize(w))) for w in words]
        if sum(pieces) <= budget:
            tasks.append(_Task(tuple(words), tuple(positions)))
            continue
        for target, pos in positions:
            lo = hi = pos
            used = pieces[pos]
            # Grow the window around the occurrence, preferring symmetry.
            while True:
                grew = False
                if lo > 0 and used + pieces[lo - 1] <= budget:
                    lo -= 1
                    used += pieces[lo]
                    grew = True
                if hi + 1 < len(words) and used + pieces[hi + 1] <= budget:
                    hi += 1
                    used += pieces[hi]
                    grew = True
                if not grew:
                    break
            tasks.append(_Task(tuple(words[lo: hi + 1]), ((target, pos - lo),)))
    return tasks


def _encode_batch(tasks: list[_Task], tokenizer, model, device: str, max_tokens: int):
    enc = tokenizer(
        [list(t.words) for t in tasks],
        is_split_into_words=True,
        padding=True,
        truncation=True,
        max_length=max_tokens,
        return_tensors="pt",
    )
    with torch.no_grad():
        hidden = model(**{k: v.to(device) for k, v in enc.items()}).last_hidden_state
    hidden = hidden.cpu().numpy().astype(np.float64)
    for i, task in enumerate(tasks):
        word_ids = enc.word_ids(i)
        for target, pos in task.occurrences:
            rows = [j for j, wid in enumerate(word_ids) if wid == pos]
            if rows:
                yield target, hidden[i, rows].mean(axis=0)


def export_embeddings(job: ExportJob) -> Path:
    """Run the job and return the written interchange file path."""
    if job.batch_size < 1:
        raise ExportError("batch_size must be positive")
    vocab = load_vocabulary(job.vocab_path)
    targets = set(vocab)
    tokenizer, model = _load_encoder(job.model, job.device)
    max_tokens = _max_input_tokens(tokenizer, model)
    per_frame = read_sentences(job.corpus_path, job.plan, job.corpus_format)

    sums: dict[tuple[str, int], np.ndarray] = {}
    counts: dict[tuple[str, int], int] = {}
    for fi, sentences in enumerate(per_frame):
        tasks = _build_tasks(sentences, targets, tokenizer, max_tokens)
        for start in range(0, len(tasks), job.batch_size):
            batch = tasks[start: start + job.batch_size]
            for word, vec in _encode_batch(batch, tokenizer, model, job.device, max_tokens):
                key = (word, fi)
                if key in sums:
                    sums[key] += vec
                    counts[key] += 1
                else:
                    sums[key] = vec.copy()
                    counts[key] = 1

    if not sums:
        raise ExportError("no vocabulary word occurs in any frame; nothing to export")
    dim = next(iter(sums.values())).shape[0]
    lines = ["\t".join([HEADER_MAGIC, FORMAT_VERSION, f"dim={dim}",
                        "frames=" + ",".join(job.plan.labels)])]
    for word, fi in sorted(sums):
        mean = sums[(word, fi)] / counts[(word, fi)]
        lines.append(f"{word}\t{fi}\t{counts[(word, fi)]}\t"
                     + " ".join("%.9g" % v for v in mean))

    out = Path(job.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=out.parent, prefix=out.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp_name, out)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return out
