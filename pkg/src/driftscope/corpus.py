"""Corpus ingestion: sentence/token splitting, time-frame slicing, vocabulary."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

_SENTENCE_BOUNDARY = re.compile(r"(?<=[.!?])\s+")
_TOKEN = re.compile(r"[^\W\d_]+(?:-[^\W\d_]+)*", re.UNICODE)
_NUMERIC = re.compile(r"^\d+$")


class CorpusError(ValueError):
    """Raised for malformed input files or invalid corpus configuration."""


@dataclass(frozen=True)
class TimeFrame:
    label: str
    year_start: int
    year_end: int


@dataclass(frozen=True)
class TimeFramePlan:
    """Ordered, non-overlapping year ranges; at least a first and a last frame."""

    frames: tuple[TimeFrame, ...]

    def __post_init__(self):
        if len(self.frames) < 2:
            raise CorpusError("a time-frame plan needs at least 2 frames")
        for f in self.frames:
            if f.year_start > f.year_end:
                raise CorpusError(
                    f"frame {f.label!r}: year_start {f.year_start} > year_end {f.year_end}"
                )
        for a, b in zip(self.frames, self.frames[1:]):
            if b.year_start <= a.year_end:
                raise CorpusError(
                    f"frames {a.label!r} and {b.label!r} overlap or are out of order"
                )

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, int, int]]) -> "TimeFramePlan":
        return cls(tuple(TimeFrame(*p) for p in pairs))

    def frame_for_year(self, year: int) -> Optional[int]:
        """Index of the frame containing `year` (boundaries inclusive), or None."""
        for i, f in enumerate(self.frames):
            if f.year_start <= year <= f.year_end:
                return i
        return None

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f.label for f in self.frames)

    def __len__(self) -> int:
        return len(self.frames)


def tokenize_sentences(text: str) -> list[list[str]]:
    """Split text into sentences of lowercase tokens.

    Sentence boundaries sit after '.', '!' or '?' followed by whitespace.
    A token is a maximal run of letters, allowing internal hyphens; digits
    and punctuation never become tokens.  Sentences with no tokens are dropped.
    """
    if not text:
        return []
    sentences = []
    for raw in _SENTENCE_BOUNDARY.split(text):
        tokens = _TOKEN.findall(raw.lower())
        if tokens:
            sentences.append(tokens)
    return sentences


@dataclass(frozen=True)
class Document:
    id: str
    year: int
    frame_index: int
    sentences: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class SlicedCorpus:
    plan: TimeFramePlan
    documents: tuple[Document, ...]
    frame_sentences: tuple[tuple[frozenset[str], ...], ...]  # per frame, token sets
    excluded_count: int = 0

    @classmethod
    def from_documents(
        cls, plan: TimeFramePlan, documents: Iterable[Document], excluded_count: int = 0
    ) -> "SlicedCorpus":
        docs = tuple(documents)
        per_frame: list[list[frozenset[str]]] = [[] for _ in range(len(plan))]
        for d in docs:
            if not 0 <= d.frame_index < len(plan):
                raise CorpusError(f"document {d.id!r}: frame_index {d.frame_index} out of range")
            for sent in d.sentences:
                per_frame[d.frame_index].append(frozenset(sent))
        return cls(plan, docs, tuple(tuple(s) for s in per_frame), excluded_count)

    def documents_in_frame(self, frame_index: int) -> list[Document]:
        return [d for d in self.documents if d.frame_index == frame_index]

    def frame_document_counts(self) -> list[int]:
        counts = [0] * len(self.plan)
        for d in self.documents:
            counts[d.frame_index] += 1
        return counts


def _document_from_record(rec: dict, plan: TimeFramePlan, where: str) -> Optional[Document]:
    if "year" not in rec or "text" not in rec:
        raise CorpusError(f"{where}: record must have 'year' and 'text' fields")
    try:
        year = int(rec["year"])
    except (TypeError, ValueError):
        raise CorpusError(f"{where}: year {rec['year']!r} is not an integer") from None
    fi = plan.frame_for_year(year)
    if fi is None:
        return None
    sentences = tuple(tuple(s) for s in tokenize_sentences(rec["text"]))
    return Document(id=str(rec.get("id", where)), year=year, frame_index=fi, sentences=sentences)


def _ingest_jsonl(path: Path, plan: TimeFramePlan) -> SlicedCorpus:
    docs = []
    excluded = 0
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusError(f"{path}:{lineno}: invalid JSON ({e.msg})") from None
            doc = _document_from_record(rec, plan, f"{path}:{lineno}")
            if doc is None:
                excluded += 1
            else:
                docs.append(doc)
    return SlicedCorpus.from_documents(plan, docs, excluded)


def _ingest_directory(path: Path, plan: TimeFramePlan) -> SlicedCorpus:
    # One sub-directory per frame label, each with a manifest.json mapping
    # file name -> publication year.
    docs = []
    excluded = 0
    for sub in sorted(p for p in path.iterdir() if p.is_dir()):
        manifest_path = sub / "manifest.json"
        if not manifest_path.exists():
            raise CorpusError(f"{sub}: missing manifest.json")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        for name in sorted(manifest):
            fpath = sub / name
            if not fpath.exists():
                raise CorpusError(f"{manifest_path}: listed file {name!r} not found")
            rec = {"id": f"{sub.name}/{name}", "year": manifest[name],
                   "text": fpath.read_text(encoding="utf-8")}
            doc = _document_from_record(rec, plan, str(fpath))
            if doc is None:
                excluded += 1
            else:
                docs.append(doc)
    return SlicedCorpus.from_documents(plan, docs, excluded)


def ingest(path: str | Path, plan: TimeFramePlan, format: str = "jsonl") -> SlicedCorpus:
    """Read raw documents and slice them into time frames.

    Records whose year falls outside every frame are excluded and counted
    in SlicedCorpus.excluded_count.
    """
    p = Path(path)
    if not p.exists():
        raise CorpusError(f"corpus path does not exist: {p}")
    if format == "jsonl":
        return _ingest_jsonl(p, plan)
    if format == "directory":
        return _ingest_directory(p, plan)
    raise CorpusError(f"unknown corpus format {format!r}")


@dataclass(frozen=True)
class VocabEntry:
    total_frequency: int
    per_frame_frequency: tuple[int, ...]
    frame_presence_count: int


@dataclass(frozen=True)
class Vocabulary:
    entries: dict[str, VocabEntry] = field(default_factory=dict)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def words(self) -> list[str]:
        return sorted(self.entries)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One word per line, UTF-8; blank lines ignored."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        w = line.strip()
        if w:
            words.add(w.lower())
    return frozenset(words)


def build_vocabulary(
    corpus: SlicedCorpus,
    min_frequency: int = 100,
    min_length: int = 3,
    min_frames: int = 2,
    stopwords: frozenset[str] = frozenset(),
    pos_allowlist: Optional[frozenset[str]] = None,
) -> Vocabulary:
    """Count tokens per frame and keep words passing every filter."""
    if not corpus.documents:
        raise CorpusError("cannot build a vocabulary from an empty corpus")
    n_frames = len(corpus.plan)
    counts: dict[str, list[int]] = {}
    for doc in corpus.documents:
        fi = doc.frame_index
        for sent in doc.sentences:
            for tok in sent:
                row = counts.get(tok)
                if row is None:
                    row = counts[tok] = [0] * n_frames
                row[fi] += 1

    entries = {}
    for word in sorted(counts):
        per_frame = counts[word]
        total = sum(per_frame)
        presence = sum(1 for c in per_frame if c > 0)
        if total < min_frequency:
            continue
        if len(word) < min_length:
            continue
        if presence < min_frames:
            continue
        if word in stopwords or _NUMERIC.match(word):
            continue
        if pos_allowlist is not None and word not in pos_allowlist:
            continue
        entries[word] = VocabEntry(total, tuple(per_frame), presence)

    if not entries:
        raise CorpusError(
            "vocabulary is empty after filtering; lower min_frequency/min_length "
            "or loosen the frame-presence requirement"
        )
    return Vocabulary(entries)
