"""Reference-free truthfulness scoring for RAG chatbot answers."""

from veracity._core import (
    Scorer,
    classifier_metrics,
    classify_message,
    cohen_kappa,
    is_scorable,
    load_dataset,
    spearman,
    tokenize,
    __version__,
)

__all__ = [
    "Scorer",
    "classifier_metrics",
    "classify_message",
    "cohen_kappa",
    "is_scorable",
    "load_dataset",
    "spearman",
    "tokenize",
    "__version__",
]
