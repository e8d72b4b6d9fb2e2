"""Character-level composition model that induces binary parse trees of words.

Trains with two self-supervised objectives (span prediction from context and
next-word prediction over composed embeddings) and exports trees in the
``word<TAB>tree`` format the tokenizer toolkit consumes.
"""

from .model import (
    CharCompositionModel,
    Chart,
    ModelConfig,
    SpanNode,
    induce_tree,
    tree_from_chart,
)
from .losses import TrainingBatch, auto_encoding_loss, auto_regression_loss
from .training import (
    DivergenceError,
    TrainConfig,
    export_trees,
    induce_trees,
    load_checkpoint,
    model_from_checkpoint,
    save_checkpoint,
    train,
)
from .formats import load_morph_vocab, serialize_span_tree, write_trees_file
from .fixture import MorphologyFixture, build_fixture

__version__ = "0.1.0"

__all__ = [
    "CharCompositionModel",
    "Chart",
    "ModelConfig",
    "SpanNode",
    "induce_tree",
    "tree_from_chart",
    "TrainingBatch",
    "auto_encoding_loss",
    "auto_regression_loss",
    "DivergenceError",
    "TrainConfig",
    "export_trees",
    "induce_trees",
    "load_checkpoint",
    "model_from_checkpoint",
    "save_checkpoint",
    "train",
    "load_morph_vocab",
    "serialize_span_tree",
    "write_trees_file",
    "MorphologyFixture",
    "build_fixture",
]
