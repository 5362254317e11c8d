"""Command-line interface; each stage reads prior stages' artifacts from --out."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import clustering, drift, embeddings, lda, pipeline, ranking
from .corpus import build_vocabulary, ingest, load_stopwords

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _load_config(args) -> pipeline.RunConfig:
    overrides = {}
    for name in ("out_dir", "seed", "emd_mode", "corpus_path", "corpus_format",
                 "embedding_path"):
        if getattr(args, name, None) is not None:
            overrides[name] = getattr(args, name)
    if getattr(args, "frames_pair", None):
        try:
            first, last = (int(x) for x in args.frames_pair.split(","))
        except ValueError:
            raise ValueError("--frames expects 'first,last' as two integers") from None
        overrides["first_frame"] = first
        overrides["last_frame"] = last
    if args.config:
        return pipeline.RunConfig.from_file(args.config, overrides)
    return pipeline.RunConfig(**overrides)


def _out(cfg: pipeline.RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(path: Path, produced_by: str) -> Path:
    if not path.exists():
        raise ValueError(f"missing artifact {path.name}; run the {produced_by!r} stage first")
    return path


def cmd_ingest(cfg: pipeline.RunConfig) -> int:
    corpus = ingest(cfg.corpus_path, cfg.plan(), cfg.corpus_format)
    out = _out(cfg)
    pipeline.write_corpus_artifact(corpus, out / "corpus.jsonl")
    print(f"ingested {len(corpus.documents)} documents "
          f"({corpus.excluded_count} outside all frames) -> {out / 'corpus.jsonl'}")
    return EXIT_OK


def cmd_vocab(cfg: pipeline.RunConfig) -> int:
    out = _out(cfg)
    corpus = pipeline.read_corpus_artifact(_require(out / "corpus.jsonl", "ingest"))
    stopwords = load_stopwords(cfg.stopwords_path) if cfg.stopwords_path else frozenset()
    allowlist = (frozenset(load_stopwords(cfg.pos_allowlist_path))
                 if cfg.pos_allowlist_path else None)
    vocab = build_vocabulary(corpus, min_frequency=cfg.min_frequency,
                             min_length=cfg.min_length, min_frames=cfg.min_frames,
                             stopwords=stopwords, pos_allowlist=allowlist)
    pipeline.write_vocabulary_artifact(vocab, out / "vocabulary.tsv")
    print(f"vocabulary: {len(vocab)} words -> {out / 'vocabulary.tsv'}")
    return EXIT_OK


def cmd_embed(cfg: pipeline.RunConfig) -> int:
    out = _out(cfg)
    corpus = pipeline.read_corpus_artifact(_require(out / "corpus.jsonl", "ingest"))
    vocab = pipeline.read_vocabulary_artifact(_require(out / "vocabulary.tsv", "vocab"))
    store = embeddings.compute_native_embeddings(
        corpus, vocab, context_vocab_size=cfg.context_vocab_size,
        window=cfg.window, shift=cfg.ppmi_shift)
    embeddings.export_embeddings(store, out / "embeddings.tsv")
    print(f"native embeddings: {len(store)} (word, frame) rows, dim={store.dim} "
          f"-> {out / 'embeddings.tsv'}")
    return EXIT_OK


def cmd_import_embeddings(cfg: pipeline.RunConfig) -> int:
    if not cfg.embedding_path:
        raise ValueError("--embedding-path (or embedding_path in config) is required")
    out = _out(cfg)
    store = embeddings.import_embeddings(cfg.embedding_path)
    embeddings.export_embeddings(store, out / "embeddings.tsv")
    print(f"imported {len(store)} rows, dim={store.dim} -> {out / 'embeddings.tsv'}")
    return EXIT_OK


def cmd_drift(cfg: pipeline.RunConfig) -> int:
    out = _out(cfg)
    vocab = pipeline.read_vocabulary_artifact(_require(out / "vocabulary.tsv", "vocab"))
    store = embeddings.import_embeddings(_require(out / "embeddings.tsv", "embed"))
    first, last = cfg.boundary_frames()
    scores = drift.semantic_change_scores(store, vocab, first, last)
    pipeline.dump_json([{"rank": s.rank, "word": s.word, "similarity": s.similarity}
                        for s in scores], out / "change_scores.json")
    diffs = drift.difference_vectors(store, vocab, first, last)
    pipeline.write_diffs_artifact(diffs, out / "difference_vectors.tsv")

    reports = {}
    md = ["| word | similarity |", "|---|---|"]
    for s in scores[: cfg.top_k]:
        md.append(f"| {s.word} | {s.similarity:.4f} |")
        diverted, moved = drift.movement_neighbors(s.word, store, vocab,
                                                   cfg.neighbors_k, first, last)
        reports[s.word] = {"diverted_from": diverted, "moved_to": moved}
    pipeline.dump_json(reports, out / "movement.json")
    (out / "change_table.md").write_text("\n".join(md) + "\n", encoding="utf-8")
    print(f"scored {len(scores)} words; top changed: "
          + ", ".join(f"{s.word} ({s.similarity:.4f})" for s in scores[: cfg.top_k]))
    return EXIT_OK


def cmd_cluster(cfg: pipeline.RunConfig) -> int:
    out = _out(cfg)
    diffs = pipeline.read_diffs_artifact(_require(out / "difference_vectors.tsv", "drift"))
    params = clustering.APParams(damping=cfg.damping, max_iterations=cfg.max_iterations,
                                 convergence_window=cfg.convergence_window,
                                 preference=cfg.preference)
    clusters = clustering.cluster_drift(diffs, params)
    pipeline.write_clusters_artifact(clusters, out / "clusters.json")
    filtered = clustering.filter_clusters(clusters, diffs, cfg.min_cluster_size)
    pipeline.write_clusters_artifact(filtered, out / "filtered_clusters.json")
    print(f"clusters: {len(clusters)} before filtering, {len(filtered)} after")
    return EXIT_OK


def cmd_rank(cfg: pipeline.RunConfig) -> int:
    out = _out(cfg)
    corpus = pipeline.read_corpus_artifact(_require(out / "corpus.jsonl", "ingest"))
    filtered = pipeline.read_clusters_artifact(
        _require(out / "filtered_clusters.json", "cluster"))
    first, last = cfg.boundary_frames()
    ranked = ranking.rank_clusters(filtered, corpus, first, last, cfg.emd_mode)
    pipeline.dump_json([{
        "rank": s.rank, "emd": s.emd, "exemplar": s.cluster.exemplar,
        "members": list(s.cluster.members),
        "hist_first": list(s.hist_first.bins), "hist_last": list(s.hist_last.bins),
    } for s in ranked], out / "cluster_scores.json")
    md = ["| value | terms |", "|---|---|"]
    for s in ranked[: cfg.top_k]:
        md.append(f"| {s.emd:.2f} | {', '.join(s.cluster.members)} |")
    (out / "ranking_table.md").write_text("\n".join(md) + "\n", encoding="utf-8")
    print(f"ranked {len(ranked)} clusters (mode={cfg.emd_mode})")
    for s in ranked[: cfg.top_k]:
        print(f"  {s.rank}. emd={s.emd:.2f} {', '.join(s.cluster.members)}")
    return EXIT_OK


def cmd_lda_baseline(cfg: pipeline.RunConfig) -> int:
    out = _out(cfg)
    corpus = pipeline.read_corpus_artifact(_require(out / "corpus.jsonl", "ingest"))
    first, last = cfg.boundary_frames()
    docs = list(corpus.documents_in_frame(first)) + list(corpus.documents_in_frame(last))
    model = lda.lda_fit(docs, k=cfg.lda_topics, passes=cfg.lda_passes,
                        min_doc_freq=cfg.lda_min_doc_freq,
                        max_doc_fraction=cfg.lda_max_doc_fraction, seed=cfg.seed,
                        alpha=cfg.lda_alpha)
    plan = corpus.plan
    frame_label = {d.id: plan.frames[d.frame_index].label for d in docs}
    shifts = lda.topic_shift_ranking(model, frame_label.__getitem__,
                                     plan.frames[first].label, plan.frames[last].label,
                                     cfg.top_k)
    summary = [{
        "topic": s.topic,
        "top_words": lda.top_topic_words(model, s.topic, 10),
        "importance_first": s.importance_first,
        "importance_last": s.importance_last,
        "gain": s.gain,
    } for s in shifts]
    pipeline.dump_json(summary, out / "lda_topics.json")
    print(f"lda baseline: {len(shifts)} topics -> {out / 'lda_topics.json'}")
    return EXIT_OK


def cmd_run(cfg: pipeline.RunConfig) -> int:
    report = pipeline.run(cfg)
    print(f"run complete -> {Path(cfg.out_dir) / 'report.json'}")
    c = report["counts"]
    print(f"  documents={c['documents']} vocabulary={c['vocabulary_size']} "
          f"clusters={c['clusters_before_filter']}->{c['clusters_after_filter']}")
    return EXIT_OK


def cmd_report(cfg: pipeline.RunConfig) -> int:
    path = _require(Path(cfg.out_dir) / "report.json", "run")
    print(path.read_text(encoding="utf-8"), end="")
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "vocab": cmd_vocab,
    "embed": cmd_embed,
    "import-embeddings": cmd_import_embeddings,
    "drift": cmd_drift,
    "cluster": cmd_cluster,
    "rank": cmd_rank,
    "lda-baseline": cmd_lda_baseline,
    "run": cmd_run,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftscope",
        description="Summarize semantic change across a diachronic document collection.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file (RunConfig schema)")
        p.add_argument("--out", dest="out_dir", help="output directory for artifacts")
        p.add_argument("--seed", type=int, dest="seed")
        p.add_argument("--frames", dest="frames_pair", metavar="FIRST,LAST",
                       help="boundary frame indices, e.g. 0,4")
        p.add_argument("--emd-mode", dest="emd_mode", choices=["counts", "normalized"])
        p.add_argument("--corpus", dest="corpus_path")
        p.add_argument("--format", dest="corpus_format", choices=["jsonl", "directory"])
        p.add_argument("--embedding-path", dest="embedding_path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        violations = pipeline.validate(cfg) if args.command == "run" else []
        if violations:
            for v in violations:
                print(f"config error: {v}", file=sys.stderr)
            return EXIT_VALIDATION
        return COMMANDS[args.command](cfg)
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
