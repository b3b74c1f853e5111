"""Python bindings for the infodemic analysis core."""

from ._core import (
    InfodemicError,
    __version__,
    agreement_ensemble,
    classify_sentiment,
    coherence,
    concern_index,
    concern_significance,
    eliminate,
    extract_features,
    extract_tags,
    inject_features,
    kmeans,
    make_folds,
    normalize_tag,
    preprocess,
    run_command,
    stem,
)

__all__ = [
    "InfodemicError",
    "__version__",
    "agreement_ensemble",
    "classify_sentiment",
    "coherence",
    "concern_index",
    "concern_significance",
    "eliminate",
    "extract_features",
    "extract_tags",
    "inject_features",
    "kmeans",
    "make_folds",
    "normalize_tag",
    "preprocess",
    "run_command",
    "stem",
]
