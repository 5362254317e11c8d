"""driftscope: semantic-change summarization for diachronic document collections."""

from .corpus import (
    Document,
    SlicedCorpus,
    TimeFrame,
    TimeFramePlan,
    Vocabulary,
    build_vocabulary,
    ingest,
    tokenize_sentences,
)
from .embeddings import EmbeddingStore, compute_native_embeddings, export_embeddings, import_embeddings
from .drift import cosine, difference_vectors, movement_neighbors, semantic_change_scores
from .clustering import APParams, Cluster, ap_fit, cluster_drift, filter_clusters
from .ranking import cooccurrence_histogram, emd, rank_clusters
from .lda import lda_fit, topic_shift_ranking
from .pipeline import RunConfig, run, validate

__version__ = "0.1.0"
