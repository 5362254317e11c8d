"""Read the shared corpus formats into time-framed token sentences.

The exporter talks to the analysis pipeline only through files, so it
carries its own reader for the two corpus layouts (JSONL records and
per-batch directories with a manifest.json) and applies the same
tokenization the pipeline documents: lowercase, sentence boundaries after
./!/? plus whitespace, tokens are letter runs with internal hyphens.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

_SENTENCE_BOUNDARY = re.compile(r"(?<=[.!?])\s+")
_TOKEN = re.compile(r"[^\W\d_]+(?:-[^\W\d_]+)*", re.UNICODE)


class CorpusReadError(ValueError):
    pass


@dataclass(frozen=True)
class FramePlan:
    """Ordered, non-overlapping labeled year ranges."""

    frames: tuple[tuple[str, int, int], ...]

    def __post_init__(self):
        if len(self.frames) < 2:
            raise CorpusReadError("at least 2 time frames are required")
        for label, start, end in self.frames:
            if start > end:
                raise CorpusReadError(f"frame {label!r}: start {start} > end {end}")
        for (la, _, ea), (lb, sb, _) in zip(self.frames, self.frames[1:]):
            if sb <= ea:
                raise CorpusReadError(f"frames {la!r} and {lb!r} overlap or are unsorted")

    @classmethod
    def parse(cls, text: str) -> "FramePlan":
        """Parse 'label:start-end,label:start-end,...'."""
        frames = []
        for part in text.split(","):
            m = re.fullmatch(r"([^:]+):(\d+)-(\d+)", part.strip())
            if not m:
                raise CorpusReadError(
                    f"bad frame spec {part!r}; expected label:start-end")
            frames.append((m.group(1), int(m.group(2)), int(m.group(3))))
        return cls(tuple(frames))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _, _ in self.frames)

    def frame_for_year(self, year: int) -> int | None:
        for i, (_, start, end) in enumerate(self.frames):
            if start <= year <= end:
                return i
        return None


def tokenize_sentences(text: str) -> list[list[str]]:
    sentences = []
    for raw in _SENTENCE_BOUNDARY.split(text or ""):
        tokens = _TOKEN.findall(raw.lower())
        if tokens:
            sentences.append(tokens)
    return sentences


def read_sentences(path: str | Path, plan: FramePlan,
                   format: str = "jsonl") -> list[list[list[str]]]:
    """Return per-frame lists of token sentences; out-of-frame records skipped."""
    p = Path(path)
    if not p.exists():
        raise CorpusReadError(f"corpus path does not exist: {p}")
    if format == "jsonl":
        records = _iter_jsonl(p)
    elif format == "directory":
        records = _iter_directory(p)
    else:
        raise CorpusReadError(f"unknown corpus format {format!r}")

    per_frame: list[list[list[str]]] = [[] for _ in plan.frames]
    for where, year, text in records:
        fi = plan.frame_for_year(year)
        if fi is None:
            continue
        per_frame[fi].extend(tokenize_sentences(text))
    return per_frame


def _iter_jsonl(path: Path):
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusReadError(f"{path}:{lineno}: invalid JSON ({e.msg})") from None
            if "year" not in rec or "text" not in rec:
                raise CorpusReadError(
                    f"{path}:{lineno}: record must have 'year' and 'text' fields")
            yield f"{path}:{lineno}", int(rec["year"]), rec["text"]


def _iter_directory(path: Path):
    for sub in sorted(p for p in path.iterdir() if p.is_dir()):
        manifest_path = sub / "manifest.json"
        if not manifest_path.exists():
            raise CorpusReadError(f"{sub}: missing manifest.json")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        for name in sorted(manifest):
            fpath = sub / name
            if not fpath.exists():
                raise CorpusReadError(f"{manifest_path}: listed file {name!r} not found")
            yield str(fpath), int(manifest[name]), fpath.read_text(encoding="utf-8")
