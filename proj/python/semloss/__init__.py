"""Dialogue response models: likelihood training with a semantic reward term."""

from semloss._core import (
    BigramStats,
    EmbeddingTable,
    ResponseModel,
    TrainingConfig,
    bigram_stats,
    bleu,
    distinct_n,
    semantic_distance,
    strip_specials,
    tokenize,
    train,
    unseen_bigram_fraction,
    word_repeat_fraction,
)

__all__ = [
    "BigramStats",
    "EmbeddingTable",
    "ResponseModel",
    "TrainingConfig",
    "bigram_stats",
    "bleu",
    "distinct_n",
    "semantic_distance",
    "strip_specials",
    "tokenize",
    "train",
    "unseen_bigram_fraction",
    "word_repeat_fraction",
]
