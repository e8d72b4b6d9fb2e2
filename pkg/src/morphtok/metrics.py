"""Evaluation metrics: segmentation accuracy, morpheme recall against tree
spans, Renyi efficiency of a token distribution, and corpus token statistics.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

from .core import ParseNode, TokenDistribution, Vocabulary
from .errors import CoverageMismatchError, InvalidAlphaError, LengthMismatchError
from .segment import CorpusTokenStats
from .treeio import GoldSegmentation


def segmentation_accuracy(
    preds: Sequence[Sequence[str]], golds: Sequence[GoldSegmentation]
) -> float:
    """Fraction of words whose predicted token list equals the gold morphs."""
    if len(preds) != len(golds):
        raise LengthMismatchError(
            f"{len(preds)} predictions against {len(golds)} gold entries"
        )
    if not golds:
        return 0.0
    correct = sum(
        1 for pred, gold in zip(preds, golds) if tuple(pred) == gold.morphs
    )
    return correct / len(golds)


def morpheme_recall(tree: ParseNode, gold: GoldSegmentation) -> float | None:
    """Fraction of eligible gold morphs that appear as spans of ``tree``.

    Character-level and whole-word tree spans are trivial and discarded;
    symmetrically, gold morphs of length one or spanning the whole word are
    excluded from the denominator.  Returns ``None`` when no morph is
    eligible.
    """
    word = gold.word
    if tree.token != word:
        raise CoverageMismatchError(
            f"tree covers {tree.token!r}, gold word is {word!r}"
        )
    n = len(word)
    spans = {
        (i, j) for (i, j) in tree.spans() if i != j and not (i == 0 and j == n - 1)
    }
    eligible = 0
    found = 0
    offset = 0
    for morph in gold.morphs:
        start, end = offset, offset + len(morph) - 1
        offset += len(morph)
        if len(morph) <= 1 or len(morph) >= n:
            continue
        eligible += 1
        if (start, end) in spans:
            found += 1
    if eligible == 0:
        return None
    return found / eligible


def average_morpheme_recall(
    pairs: Iterable[tuple[ParseNode, GoldSegmentation]]
) -> float | None:
    """Macro average of :func:`morpheme_recall`, skipping inapplicable words."""
    values = [morpheme_recall(tree, gold) for tree, gold in pairs]
    applicable = [v for v in values if v is not None]
    if not applicable:
        return None
    return sum(applicable) / len(applicable)


def distribution_from_counts(counts: Mapping[str, int]) -> dict[str, float]:
    """Empirical token distribution; zero-count tokens are omitted."""
    total = sum(counts.values())
    if total <= 0:
        return {}
    return {token: count / total for token, count in counts.items() if count > 0}


def renyi_efficiency(dist: TokenDistribution, alpha: float) -> float:
    """Order-``alpha`` Renyi entropy normalized by the log support size.

    Lies in [0, 1]; equals 1 exactly when the distribution is uniform over
    its support, and 0 for a single-token (or empty) support.
    """
    if alpha <= 0 or alpha == 1.0:
        raise InvalidAlphaError(f"alpha must be > 0 and != 1, got {alpha}")
    support = [p for p in dist.values() if p > 0]
    if len(support) <= 1:
        return 0.0
    entropy = math.log(sum(p**alpha for p in support)) / (1.0 - alpha)
    return entropy / math.log(len(support))


def corpus_entropy(vocab: Vocabulary) -> float:
    """Total corpus entropy -sum (c/T) ln(c/T) of a vocabulary's counts."""
    if vocab.T <= 0:
        raise ValueError("vocabulary has no counts")
    total = vocab.T
    acc = 0.0
    for count in vocab.entries.values():
        if count > 0:
            p = count / total
            acc -= p * math.log(p)
    return acc


def corpus_stats(
    sentences: Iterable[Sequence[str]], vocab: Vocabulary | None = None
) -> CorpusTokenStats:
    """Aggregate token statistics over per-sentence token lists.

    Unknown tokens are counted against ``vocab`` when one is given, else 0.
    """
    per_sentence = []
    unk = 0
    for tokens in sentences:
        per_sentence.append(len(tokens))
        if vocab is not None:
            unk += sum(1 for token in tokens if token not in vocab)
    return CorpusTokenStats(
        per_sentence=tuple(per_sentence),
        total_tokens=sum(per_sentence),
        unk_tokens=unk,
    )
