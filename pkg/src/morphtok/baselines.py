"""Classic BPE training/segmentation and deterministic fallback tree shapes.

The BPE trainer exists for two reasons: as a comparison baseline, and to
produce the morpheme vocabulary file the companion composition model consumes.
Fallback trees let every pipeline stage run without a learned tree provider.
"""

from __future__ import annotations

import random
from collections import Counter
from typing import Iterable, Sequence

from .core import ParseNode, Vocabulary
from .errors import MalformedLineError
from .treeio import CorpusStats, atomic_writer

MergeList = list[tuple[str, str]]

FALLBACK_STRATEGIES = ("right", "left", "balanced", "random")


def bpe_train(corpus: CorpusStats, vocab_size: int) -> tuple[MergeList, Vocabulary]:
    """Greedy pair-merge training.

    Merges the most frequent adjacent symbol pair until ``vocab_size`` tokens
    exist or no pair occurs at least twice.  Ties break toward the
    lexicographically smallest (left, right) pair, so identical corpora give
    identical merge lists regardless of ordering.  No word boundary marker is
    added.  The returned vocabulary counts token occurrences in the fully
    merged corpus; characters merged away everywhere stay at count zero.
    """
    symbolized = {word: list(word) for word in corpus.word_freq}
    vocab_tokens = {ch for symbols in symbolized.values() for ch in symbols}
    merges: MergeList = []
    while len(vocab_tokens) < vocab_size:
        pair_counts: Counter[tuple[str, str]] = Counter()
        for word, symbols in symbolized.items():
            freq = corpus.word_freq[word]
            for pair in zip(symbols, symbols[1:]):
                pair_counts[pair] += freq
        if not pair_counts:
            break
        pair, count = min(pair_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        if count < 2:
            break
        merges.append(pair)
        vocab_tokens.add(pair[0] + pair[1])
        for word, symbols in symbolized.items():
            symbolized[word] = _apply_merge(symbols, pair)
    token_counts: Counter[str] = Counter()
    for word, symbols in symbolized.items():
        freq = corpus.word_freq[word]
        for symbol in symbols:
            token_counts[symbol] += freq
    entries = {token: token_counts.get(token, 0) for token in vocab_tokens}
    return merges, Vocabulary(entries)


def _apply_merge(symbols: list[str], pair: tuple[str, str]) -> list[str]:
    if len(symbols) < 2:
        return symbols
    merged = pair[0] + pair[1]
    out: list[str] = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == pair[0] and symbols[i + 1] == pair[1]:
            out.append(merged)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def bpe_tokenize(word: str, merges: MergeList) -> list[str]:
    """Segment by replaying the learned merges, in order, exhaustively."""
    symbols = list(word)
    for pair in merges:
        symbols = _apply_merge(symbols, pair)
    return symbols


def save_merges(merges: MergeList, path: str) -> None:
    with atomic_writer(path) as handle:
        for left, right in merges:
            handle.write(f"{left}\t{right}\n")


def load_merges(path: str) -> MergeList:
    merges: MergeList = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise MalformedLineError(f"missing tab separator in {line!r}")
            left, right = line.split("\t", 1)
            merges.append((left, right))
    return merges


def fallback_tree(word: str, strategy: str, seed: int = 0) -> ParseNode:
    """A strictly binary tree over ``word`` with a fixed branching shape.

    ``random`` draws split points from a generator seeded with both ``seed``
    and the word, so the tree for a given word never depends on call order.
    """
    if not word:
        raise ValueError("cannot build a tree over an empty word")
    if strategy not in FALLBACK_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {FALLBACK_STRATEGIES}")
    rng = random.Random(f"{seed}:{word}") if strategy == "random" else None

    def build(i: int, j: int) -> ParseNode:
        if i == j:
            return ParseNode.leaf(i, word[i])
        if strategy == "right":
            split = i
        elif strategy == "left":
            split = j - 1
        elif strategy == "balanced":
            split = (i + j) // 2
        else:
            assert rng is not None
            split = rng.randint(i, j - 1)
        return ParseNode.branch(build(i, split), build(split + 1, j))

    return build(0, len(word) - 1)


def trees_for_words(
    words: Iterable[str], strategy: str, seed: int = 0
) -> dict[str, ParseNode]:
    """Fallback trees for a collection of words, keyed by word."""
    return {word: fallback_tree(word, strategy, seed) for word in words}
