"""Tree-guided subword tokenization toolkit.

Builds compact vocabularies over character-level parse trees, tokenizes words
top-down with entropy-based post-merge repair, and evaluates segmentations.
"""

from .core import (
    EntropyTable,
    ParseNode,
    TokenizerModel,
    ToolConfig,
    Vocabulary,
    entropy_of,
    validate_tree,
)
from .treeio import (
    CorpusStats,
    GoldSegmentation,
    TreeRecord,
    load_corpus,
    load_gold,
    load_trees,
    load_vocabulary,
    parse_tree_record,
    save_trees,
    save_vocabulary,
    serialize_tree,
)
from .vocab import (
    build_vocabulary,
    count_tree_pairs,
    e_step,
    init_vocab,
    m_step,
    prune_vocab,
    tree_viterbi,
)
from .segment import (
    CorpusTokenStats,
    SegmentationResult,
    post_merge,
    tokenize_corpus,
    tokenize_word,
    top_down_tokenize,
)
from .baselines import bpe_tokenize, bpe_train, fallback_tree
from .metrics import (
    average_morpheme_recall,
    corpus_entropy,
    corpus_stats,
    distribution_from_counts,
    morpheme_recall,
    renyi_efficiency,
    segmentation_accuracy,
)

__version__ = "0.1.0"

__all__ = [
    "EntropyTable",
    "ParseNode",
    "TokenizerModel",
    "ToolConfig",
    "Vocabulary",
    "entropy_of",
    "validate_tree",
    "CorpusStats",
    "GoldSegmentation",
    "TreeRecord",
    "load_corpus",
    "load_gold",
    "load_trees",
    "load_vocabulary",
    "parse_tree_record",
    "save_trees",
    "save_vocabulary",
    "serialize_tree",
    "build_vocabulary",
    "count_tree_pairs",
    "e_step",
    "init_vocab",
    "m_step",
    "prune_vocab",
    "tree_viterbi",
    "CorpusTokenStats",
    "SegmentationResult",
    "post_merge",
    "tokenize_corpus",
    "tokenize_word",
    "top_down_tokenize",
    "bpe_tokenize",
    "bpe_train",
    "fallback_tree",
    "average_morpheme_recall",
    "corpus_entropy",
    "corpus_stats",
    "distribution_from_counts",
    "morpheme_recall",
    "renyi_efficiency",
    "segmentation_accuracy",
]
