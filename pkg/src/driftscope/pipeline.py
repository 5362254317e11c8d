"""End-to-end orchestration: config, validation, staged artifacts, run report."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

import numpy as np

from . import clustering, drift, embeddings, lda, ranking
from .corpus import (
    Document,
    SlicedCorpus,
    TimeFramePlan,
    Vocabulary,
    VocabEntry,
    build_vocabulary,
    ingest,
    load_stopwords,
)


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class RunConfig:
    corpus_path: str = ""
    corpus_format: str = "jsonl"
    frames: list[list] = field(default_factory=list)  # [label, year_start, year_end]
    min_frequency: int = 100
    min_length: int = 3
    min_frames: int = 2
    stopwords_path: Optional[str] = None
    pos_allowlist_path: Optional[str] = None
    embedding_source: str = "native"  # native | import
    embedding_path: Optional[str] = None
    context_vocab_size: int = 2000
    window: int = 5
    ppmi_shift: float = 0.0
    damping: float = 0.9
    max_iterations: int = 1000
    convergence_window: int = 50
    preference: Optional[float] = None
    min_cluster_size: int = 5
    emd_mode: str = "counts"
    first_frame: Optional[int] = None  # default 0
    last_frame: Optional[int] = None  # default len(frames) - 1
    top_k: int = 10
    neighbors_k: int = 5
    run_lda: bool = False
    lda_topics: int = 100
    lda_passes: int = 20
    lda_min_doc_freq: int = 30
    lda_max_doc_fraction: float = 0.75
    lda_alpha: Optional[float] = None  # None -> 50 / lda_topics
    out_dir: str = "driftscope-out"
    seed: int = 0

    @classmethod
    def from_file(cls, path: str | Path, overrides: Optional[dict] = None) -> "RunConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if overrides:
            data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def plan(self) -> TimeFramePlan:
        return TimeFramePlan.from_pairs((str(l), int(a), int(b)) for l, a, b in self.frames)

    def boundary_frames(self) -> tuple[int, int]:
        first = 0 if self.first_frame is None else self.first_frame
        last = len(self.frames) - 1 if self.last_frame is None else self.last_frame
        return first, last


def validate(config: RunConfig) -> list[str]:
    """Collect violations without mutating anything; empty list means ok."""
    v: list[str] = []
    if not config.corpus_path:
        v.append("corpus_path is required")
    elif not Path(config.corpus_path).exists():
        v.append(f"corpus_path does not exist: {config.corpus_path}")
    if config.corpus_format not in ("jsonl", "directory"):
        v.append(f"corpus_format must be 'jsonl' or 'directory', got {config.corpus_format!r}")
    if len(config.frames) < 2:
        v.append("at least 2 time frames are required")
    else:
        try:
            plan = config.plan()
        except Exception as e:
            v.append(str(e))
            plan = None
        if plan is not None:
            first, last = config.boundary_frames()
            for name, idx in (("first_frame", first), ("last_frame", last)):
                if not 0 <= idx < len(plan):
                    v.append(f"{name} {idx} out of range for {len(plan)} frames")
            if first == last:
                v.append("first_frame and last_frame must differ")
    if not 0.5 <= config.damping < 1.0:
        v.append("damping must be in [0.5, 1)")
    if config.max_iterations < 1:
        v.append("max_iterations must be positive")
    if not 1 <= config.convergence_window <= config.max_iterations:
        v.append("convergence_window must be in [1, max_iterations]")
    if config.emd_mode not in ("counts", "normalized"):
        v.append(f"emd_mode must be 'counts' or 'normalized', got {config.emd_mode!r}")
    if config.embedding_source not in ("native", "import"):
        v.append(f"embedding_source must be 'native' or 'import', got {config.embedding_source!r}")
    if config.embedding_source == "import":
        if not config.embedding_path:
            v.append("embedding_path is required when embedding_source is 'import'")
        elif not Path(config.embedding_path).exists():
            v.append(f"embedding_path does not exist: {config.embedding_path}")
    if config.ppmi_shift < 0:
        v.append("ppmi_shift must be >= 0")
    for name in ("min_frequency", "min_length", "min_frames", "min_cluster_size",
                 "context_vocab_size", "window", "top_k", "neighbors_k",
                 "lda_topics", "lda_passes"):
        if getattr(config, name) < 1:
            v.append(f"{name} must be positive")
    for name in ("stopwords_path", "pos_allowlist_path"):
        p = getattr(config, name)
        if p is not None and not Path(p).exists():
            v.append(f"{name} does not exist: {p}")
    return v


# ---------------------------------------------------------------------------
# Artifact (de)serialization: plain text so every stage is auditable and
# re-runnable in isolation.

def write_corpus_artifact(corpus: SlicedCorpus, path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        header = {
            "frames": [[f.label, f.year_start, f.year_end] for f in corpus.plan.frames],
            "excluded_count": corpus.excluded_count,
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for d in corpus.documents:
            rec = {"id": d.id, "year": d.year, "frame_index": d.frame_index,
                   "sentences": [list(s) for s in d.sentences]}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_corpus_artifact(path: Path) -> SlicedCorpus:
    with path.open(encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        plan = TimeFramePlan.from_pairs((l, a, b) for l, a, b in header["frames"])
        docs = []
        for line in fh:
            rec = json.loads(line)
            docs.append(Document(
                id=rec["id"], year=rec["year"], frame_index=rec["frame_index"],
                sentences=tuple(tuple(s) for s in rec["sentences"]),
            ))
    return SlicedCorpus.from_documents(plan, docs, header["excluded_count"])


def write_vocabulary_artifact(vocab: Vocabulary, path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        fh.write("#word\ttotal\tper_frame\tframe_presence\n")
        for w in vocab.words():
            e = vocab.entries[w]
            fh.write(f"{w}\t{e.total_frequency}\t"
                     f"{','.join(map(str, e.per_frame_frequency))}\t{e.frame_presence_count}\n")


def read_vocabulary_artifact(path: Path) -> Vocabulary:
    entries = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        w, total, per_frame, presence = line.split("\t")
        entries[w] = VocabEntry(int(total), tuple(int(x) for x in per_frame.split(",")),
                                int(presence))
    return Vocabulary(entries)


def write_clusters_artifact(clusters: list[clustering.Cluster], path: Path) -> None:
    data = [{"id": c.id, "exemplar": c.exemplar, "members": list(c.members)} for c in clusters]
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def read_clusters_artifact(path: Path) -> list[clustering.Cluster]:
    data = json.loads(path.read_text(encoding="utf-8"))
    return [clustering.Cluster(id=c["id"], exemplar=c["exemplar"], members=tuple(c["members"]))
            for c in data]


def write_diffs_artifact(diffs: list[drift.DifferenceVector], path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for dv in diffs:
            fh.write(f"{dv.word}\t" + " ".join("%.9g" % x for x in dv.d) + "\n")


def read_diffs_artifact(path: Path) -> list[drift.DifferenceVector]:
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line:
            continue
        word, vec_s = line.split("\t")
        d = np.array([float(x) for x in vec_s.split()], dtype=np.float64)
        out.append(drift.DifferenceVector(word=word, d=d, magnitude=float(np.linalg.norm(d))))
    return out


def dump_json(data, path: Path) -> None:
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------


class _OutputLock:
    """One pipeline instance per output directory."""

    def __init__(self, out_dir: Path):
        self.path = out_dir / ".driftscope.lock"

    def __enter__(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise RuntimeError(
                f"output directory is locked by another run: {self.path}"
            ) from None
        os.close(fd)
        return self

    def __exit__(self, *exc):
        self.path.unlink(missing_ok=True)
        return False


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as e:
        raise PipelineError(name, e) from e


def run(config: RunConfig) -> dict:
    """Execute the whole method and return the report (also written to disk).

    Intermediate artifacts land in the output directory after each stage, so a
    failure keeps everything produced up to that point.  The report excludes
    wall-clock timing (written separately) so identical config + seed yields a
    byte-identical report file.
    """
    violations = validate(config)
    if violations:
        raise ValueError("invalid config: " + "; ".join(violations))
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    plan = config.plan()
    first, last = config.boundary_frames()
    timings: list[tuple[str, float]] = []

    def timed(name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        result = _stage(name, fn, *args, **kwargs)
        timings.append((name, time.perf_counter() - t0))
        return result

    with _OutputLock(out):
        corpus = timed("ingest", ingest, config.corpus_path, plan, config.corpus_format)
        write_corpus_artifact(corpus, out / "corpus.jsonl")

        stopwords = (load_stopwords(config.stopwords_path)
                     if config.stopwords_path else frozenset())
        allowlist = (frozenset(load_stopwords(config.pos_allowlist_path))
                     if config.pos_allowlist_path else None)
        vocab = timed("vocabulary", build_vocabulary, corpus,
                      min_frequency=config.min_frequency, min_length=config.min_length,
                      min_frames=config.min_frames, stopwords=stopwords,
                      pos_allowlist=allowlist)
        write_vocabulary_artifact(vocab, out / "vocabulary.tsv")

        if config.embedding_source == "native":
            store = timed("embeddings", embeddings.compute_native_embeddings, corpus, vocab,
                          context_vocab_size=config.context_vocab_size,
                          window=config.window, shift=config.ppmi_shift)
        else:
            store = timed("embeddings", embeddings.import_embeddings, config.embedding_path)
        embeddings.export_embeddings(store, out / "embeddings.tsv")

        scores = timed("drift", drift.semantic_change_scores, store, vocab, first, last)
        dump_json([{"rank": s.rank, "word": s.word, "similarity": s.similarity}
                   for s in scores], out / "change_scores.json")
        diffs = timed("drift", drift.difference_vectors, store, vocab, first, last)
        write_diffs_artifact(diffs, out / "difference_vectors.tsv")

        params = clustering.APParams(
            damping=config.damping, max_iterations=config.max_iterations,
            convergence_window=config.convergence_window, preference=config.preference)
        clusters = timed("clustering", clustering.cluster_drift, diffs, params)
        write_clusters_artifact(clusters, out / "clusters.json")
        filtered = timed("filtering", clustering.filter_clusters, clusters, diffs,
                         config.min_cluster_size)
        write_clusters_artifact(filtered, out / "filtered_clusters.json")

        ranked = timed("ranking", ranking.rank_clusters, filtered, corpus, first, last,
                       config.emd_mode)
        dump_json([{
            "rank": s.rank, "emd": s.emd, "exemplar": s.cluster.exemplar,
            "members": list(s.cluster.members),
            "hist_first": list(s.hist_first.bins), "hist_last": list(s.hist_last.bins),
        } for s in ranked], out / "cluster_scores.json")

        lda_summary = None
        if config.run_lda:
            lda_docs = (list(corpus.documents_in_frame(first))
                        + list(corpus.documents_in_frame(last)))
            model = timed("lda", lda.lda_fit, lda_docs, k=config.lda_topics,
                          passes=config.lda_passes, min_doc_freq=config.lda_min_doc_freq,
                          max_doc_fraction=config.lda_max_doc_fraction, seed=config.seed,
                          alpha=config.lda_alpha)
            frame_label = {d.id: plan.frames[d.frame_index].label for d in lda_docs}
            shifts = timed("lda", lda.topic_shift_ranking, model, frame_label.__getitem__,
                           plan.frames[first].label, plan.frames[last].label, config.top_k)
            lda_summary = [{
                "topic": s.topic,
                "top_words": lda.top_topic_words(model, s.topic, 10),
                "importance_first": s.importance_first,
                "importance_last": s.importance_last,
                "gain": s.gain,
            } for s in shifts]
            dump_json(lda_summary, out / "lda_topics.json")

        movement = {}
        for s in scores[: config.top_k]:
            diverted, moved = drift.movement_neighbors(
                s.word, store, vocab, config.neighbors_k, first, last)
            movement[s.word] = {"diverted_from": diverted, "moved_to": moved}

        report = {
            "config": asdict(config),
            "resolved": {
                "first_frame": first,
                "last_frame": last,
                "preference": "median" if config.preference is None else config.preference,
                "filter_order": "quartile-removal-then-min-size",
                "quartile_rule": "remove magnitude strictly below Q1 (linear interpolation)",
                "emd_ground_distance": "|i - j| on bins 1..10",
                "lda_priors": {
                    "alpha": (50.0 / config.lda_topics if config.lda_alpha is None
                              else config.lda_alpha),
                    "beta": 0.01,
                },
            },
            "counts": {
                "documents": len(corpus.documents),
                "documents_per_frame": corpus.frame_document_counts(),
                "excluded_documents": corpus.excluded_count,
                "vocabulary_size": len(vocab),
                "words_scored": len(scores),
                "words_missing_boundary_frame": len(vocab) - len(scores),
                "clusters_before_filter": len(clusters),
                "clusters_after_filter": len(filtered),
            },
            "top_changed_words": [
                {"rank": s.rank, "word": s.word, "similarity": s.similarity}
                for s in scores[: config.top_k]
            ],
            "top_clusters": [{
                "rank": s.rank, "emd": s.emd, "exemplar": s.cluster.exemplar,
                "members": list(s.cluster.members),
            } for s in ranked[: config.top_k]],
            "movement_examples": movement,
            "lda_baseline": lda_summary,
        }
        dump_json(report, out / "report.json")
        with (out / "timing.txt").open("w", encoding="utf-8") as fh:
            for name, dt in timings:
                fh.write(f"{name}\t{dt:.3f}s\n")
    return report
