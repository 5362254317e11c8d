"""Contextual embedding exporter for the driftscope interchange format."""

from .corpus_io import CorpusReadError, FramePlan, read_sentences, tokenize_sentences
from .exporter import ExportError, ExportJob, export_embeddings, load_vocabulary

__version__ = "0.1.0"

__all__ = [
    "CorpusReadError",
    "ExportError",
    "ExportJob",
    "FramePlan",
    "export_embeddings",
    "load_vocabulary",
    "read_sentences",
    "tokenize_sentences",
]
