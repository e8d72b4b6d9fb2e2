"""Top-down tokenization over a parse tree, with post-merge repair.

Tokenization walks the tree from the root and emits the first
vocabulary hit on each branch, so a single in-vocabulary constituent is never
fragmented.  Induced trees are imperfect, which can over-split a word (for
example a skewed parse of "booked" may yield ``book e d``); the post-merge
pass then finds the minimum-entropy way of merging adjacent runs back into
vocabulary entries via an interval dynamic program.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .baselines import fallback_tree
from .core import ParseNode, TokenizerModel, Vocabulary, ordered_map, validate_tree
from .errors import MissingTreeError


@dataclass(frozen=True)
class SegmentationResult:
    """Tokens for one word, plus the pre-repair view and the unknown count."""

    tokens: tuple[str, ...]
    unk_count: int
    pre_merge_tokens: tuple[str, ...]


@dataclass(frozen=True)
class CorpusTokenStats:
    """Per-sentence token counts and totals for a tokenized corpus."""

    per_sentence: tuple[int, ...]
    total_tokens: int
    unk_tokens: int

    @property
    def sentences(self) -> int:
        return len(self.per_sentence)

    @property
    def avg_tokens_per_sentence(self) -> float:
        if not self.per_sentence:
            return 0.0
        return self.total_tokens / len(self.per_sentence)

    @property
    def unk_rate(self) -> float:
        if self.total_tokens == 0:
            return 0.0
        return self.unk_tokens / self.total_tokens


def top_down_tokenize(word: str, tree: ParseNode, vocab: Vocabulary) -> list[str]:
    """Emit the first vocabulary hit along each branch, depth-first.

    Nodes are visited with an explicit stack, pushing right then left so
    tokens come out in word order.  A node whose token is in ``vocab`` is
    emitted whole and its subtree skipped; leaves absent from ``vocab`` are
    emitted as single-character unknowns.
    """
    tokens: list[str] = []
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.token in vocab:
            tokens.append(node.token)
        elif node.left is not None and node.right is not None:
            stack.append(node.right)
            stack.append(node.left)
        else:
            tokens.append(node.token)
    return tokens


def post_merge(
    tokens: Sequence[str],
    entropies: Mapping[str, float],
    missing_entropy: float = math.inf,
) -> list[str]:
    """Minimum-entropy repair of an over-split token sequence.

    Any contiguous run may be replaced by its concatenation when that
    concatenation is in the entropy table.  The interval dynamic program
    keeps, for each (i, j), the cheapest segmentation of tokens i..j; a tie
    between merging and splitting resolves toward splitting, and among equal
    splits the largest split index wins.  ``missing_entropy`` is the base
    cost of an input token absent from the table (callers pass a large
    finite value for unknowns so totals stay comparable).
    """
    n = len(tokens)
    if n <= 1:
        return list(tokens)
    get = entropies.get
    cost = [[0.0] * n for _ in range(n)]
    segs: list[list[list[str] | None]] = [[None] * n for _ in range(n)]
    for i, token in enumerate(tokens):
        cost[i][i] = get(token, missing_entropy)
        segs[i][i] = [token]
    for width in range(1, n):
        for i in range(n - width):
            j = i + width
            merged = "".join(tokens[i : j + 1])
            best = get(merged, math.inf)
            best_k = -1
            row = cost[i]
            for k in range(i, j):
                candidate = row[k] + cost[k + 1][j]
                if candidate <= best:
                    best_k = k
                    best = candidate
            if best_k >= 0:
                segs[i][j] = segs[i][best_k] + segs[best_k + 1][j]  # type: ignore[operator]
            else:
                segs[i][j] = [merged]
            cost[i][j] = best
    return segs[0][n - 1]  # type: ignore[return-value]


def tokenize_word(model: TokenizerModel, word: str, tree: ParseNode) -> SegmentationResult:
    """Tokenize one word: cache lookup, else top-down matching plus repair."""
    cached = model.cache.get(word)
    if cached is not None:
        return cached
    validate_tree(tree, word)
    pre = top_down_tokenize(word, tree, model.vocabulary)
    merged = post_merge(pre, model.entropies, missing_entropy=model.unk_entropy)
    unk = sum(1 for token in merged if token not in model.vocabulary)
    result = SegmentationResult(tuple(merged), unk, tuple(pre))
    if len(model.cache) < model.config.cache_capacity:
        model.cache[word] = result
    return result


def tokenize_corpus(
    model: TokenizerModel,
    trees: Mapping[str, ParseNode],
    sentences: Iterable[str],
    fallback: str | None = None,
    fallback_seed: int = 0,
    threads: int = 1,
) -> tuple[list[list[str]], CorpusTokenStats]:
    """Tokenize a corpus of one-sentence lines against a tree mapping.

    Words without a tree use the ``fallback`` strategy when configured and
    raise :class:`MissingTreeError` otherwise.  Lines without words are
    skipped.  Returns the per-sentence token lists and aggregate statistics.
    """

    def tree_for(word: str) -> ParseNode:
        tree = trees.get(word)
        if tree is not None:
            return tree
        if fallback is None:
            raise MissingTreeError(word)
        return fallback_tree(word, fallback, seed=fallback_seed)

    def tokenize_line(words: list[str]) -> tuple[list[str], int]:
        tokens: list[str] = []
        unk = 0
        for word in words:
            result = tokenize_word(model, word, tree_for(word))
            tokens.extend(result.tokens)
            unk += result.unk_count
        return tokens, unk

    lines = [words for words in (line.split() for line in sentences) if words]
    outputs = ordered_map(tokenize_line, lines, threads)
    token_lists = [tokens for tokens, _ in outputs]
    stats = CorpusTokenStats(
        per_sentence=tuple(len(tokens) for tokens in token_lists),
        total_tokens=sum(len(tokens) for tokens in token_lists),
        unk_tokens=sum(unk for _, unk in outputs),
    )
    return token_lists, stats
