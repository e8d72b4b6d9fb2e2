"""Core domain types shared by every module in the package.

The central contract is :class:`ParseNode`: a strictly binary, character-level
parse of a single word, with 0-based inclusive span indices.  Vocabularies map
token strings to corpus counts and convert into entropy tables used by the
segmentation and pruning dynamic programs.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence, TypeVar

from .errors import (
    NonBinaryError,
    SpanMismatchError,
    TokenMismatchError,
)

_T = TypeVar("_T")
_R = TypeVar("_R")


def ordered_map(fn: Callable[[_T], _R], items: Sequence[_T] | Iterable[_T], threads: int = 1) -> list[_R]:
    """Map preserving input order; with ``threads > 1`` work runs on a pool.

    Results come back in input order either way, so reductions over them are
    reproducible at any worker count.
    """
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True, slots=True)
class ParseNode:
    """One node of a binary character-level parse tree.

    ``i`` and ``j`` are 0-based inclusive character indices into the word.
    A node is a leaf iff ``i == j`` iff both children are absent; internal
    nodes always have exactly two children whose spans partition ``[i..j]``.
    ``token`` is the substring of the word covered by the span.
    """

    i: int
    j: int
    token: str
    left: ParseNode | None = None
    right: ParseNode | None = None

    @staticmethod
    def leaf(index: int, char: str) -> ParseNode:
        return ParseNode(index, index, char)

    @staticmethod
    def branch(left: ParseNode, right: ParseNode) -> ParseNode:
        return ParseNode(left.i, right.j, left.token + right.token, left, right)

    @property
    def is_leaf(self) -> bool:
        return self.left is None and self.right is None

    def spans(self) -> Iterator[tuple[int, int]]:
        """Yield the (i, j) span of every node in the subtree, pre-order."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield (node.i, node.j)
            if node.right is not None:
                stack.append(node.right)
            if node.left is not None:
                stack.append(node.left)

    def leaves(self) -> Iterator[ParseNode]:
        """Yield leaf nodes left to right."""
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                yield node
            else:
                if node.right is not None:
                    stack.append(node.right)
                if node.left is not None:
                    stack.append(node.left)


def validate_tree(node: ParseNode, word: str) -> None:
    """Check every structural invariant of ``node`` against ``word``.

    Raises :class:`NonBinaryError`, :class:`SpanMismatchError` or
    :class:`TokenMismatchError` naming the offending node; returns ``None``
    when the tree is valid.
    """
    if node.i != 0 or node.j != len(word) - 1:
        raise SpanMismatchError(
            f"root spans ({node.i}, {node.j}) but word has {len(word)} characters"
        )
    stack = [node]
    while stack:
        cur = stack.pop()
        left, right = cur.left, cur.right
        if (left is None) != (right is None):
            raise NonBinaryError(f"node ({cur.i}, {cur.j}) {cur.token!r} has exactly one child")
        if left is None:
            if cur.i != cur.j:
                raise NonBinaryError(
                    f"node ({cur.i}, {cur.j}) {cur.token!r} spans several characters but has no children"
                )
            if cur.token != word[cur.i]:
                raise TokenMismatchError(
                    f"leaf at {cur.i} carries {cur.token!r}, word has {word[cur.i]!r}"
                )
            continue
        assert right is not None
        if cur.i == cur.j:
            raise NonBinaryError(f"leaf-sized node ({cur.i}, {cur.j}) has children")
        if not (left.i == cur.i and right.j == cur.j and left.j + 1 == right.i):
            raise SpanMismatchError(
                f"node ({cur.i}, {cur.j}) splits into ({left.i}, {left.j}) and ({right.i}, {right.j})"
            )
        if not (cur.i <= left.j < cur.j):
            raise SpanMismatchError(
                f"node ({cur.i}, {cur.j}) has split point {left.j} outside its span"
            )
        if cur.token != left.token + right.token:
            raise TokenMismatchError(
                f"node ({cur.i}, {cur.j}) carries {cur.token!r}, children spell "
                f"{left.token + right.token!r}"
            )
        stack.append(right)
        stack.append(left)


@dataclass(frozen=True)
class Vocabulary:
    """Token counts with their total ``T``.

    Counts are non-negative integers; ``T`` is always the sum of the counts.
    Vocabularies built by this toolkit keep every single character observed in
    the training corpus (the character floor), so any word over the training
    alphabet remains tokenizable.
    """

    entries: dict[str, int]
    T: int = field(init=False)

    def __post_init__(self) -> None:
        for token, count in self.entries.items():
            if count < 0:
                raise ValueError(f"negative count for token {token!r}")
        object.__setattr__(self, "T", sum(self.entries.values()))

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def count(self, token: str) -> int:
        return self.entries.get(token, 0)

    def characters(self) -> set[str]:
        """The single-character tokens present in the vocabulary."""
        return {t for t in self.entries if len(t) == 1}

    def to_entropies(self) -> EntropyTable:
        """Derive the entropy table -ln(count / T); zero-count tokens are omitted."""
        if self.T <= 0:
            return EntropyTable()
        log_t = math.log(self.T)
        return EntropyTable(
            (tok, log_t - math.log(c)) for tok, c in self.entries.items() if c > 0
        )


class EntropyTable(dict):
    """Token -> entropy in nats; lookups of absent tokens yield +inf.

    ``table[token]`` never raises: missing tokens read as ``math.inf`` without
    being inserted, which is exactly the fallback the segmentation and pruning
    dynamic programs rely on.
    """

    def __missing__(self, token: str) -> float:
        return math.inf


def entropy_of(vocab: Vocabulary, token: str) -> float:
    """-ln(count/T) for a token of ``vocab``, +inf when absent or zero-count."""
    count = vocab.count(token)
    if count <= 0 or vocab.T <= 0:
        return math.inf
    return math.log(vocab.T) - math.log(count)


@dataclass
class ToolConfig:
    """Knobs shared by vocabulary construction, segmentation and evaluation."""

    pair_threshold: int = 10
    prune_rate: float = 0.10
    target_vocab_size: int = 30_000
    renyi_alpha: float = 2.5
    lowercase: bool = False
    cache_capacity: int = 100_000

    def __post_init__(self) -> None:
        if not (0.0 < self.prune_rate < 1.0):
            raise ValueError(f"prune_rate must lie in (0, 1), got {self.prune_rate}")
        if self.pair_threshold < 0:
            raise ValueError("pair_threshold must be non-negative")
        if self.renyi_alpha <= 0 or self.renyi_alpha == 1.0:
            raise ValueError("renyi_alpha must be positive and different from 1")
        if self.cache_capacity < 0:
            raise ValueError("cache_capacity must be non-negative")


@dataclass
class TokenizerModel:
    """A frozen vocabulary plus its entropy table and a word cache.

    The vocabulary and entropies are never mutated after construction and may
    be shared freely across threads.  The cache is the one mutable structure:
    a plain dict with insert-on-miss admission and a capacity cap, which under
    CPython gives atomic read/insert with last-writer-wins semantics.  Cached
    results assume each word keeps a single parse tree for the lifetime of the
    model.
    """

    vocabulary: Vocabulary
    entropies: EntropyTable
    config: ToolConfig
    cache: dict = field(default_factory=dict)

    @staticmethod
    def from_vocabulary(vocab: Vocabulary, config: ToolConfig | None = None) -> TokenizerModel:
        return TokenizerModel(vocab, vocab.to_entropies(), config or ToolConfig())

    @property
    def unk_entropy(self) -> float:
        """Large finite entropy assigned to out-of-vocabulary single characters.

        Kept finite (ln T + 1, above any in-vocabulary entropy) so the
        post-merge totals of sequences containing unknowns stay comparable.
        """
        if self.vocabulary.T <= 0:
            return 1.0
        return math.log(self.vocabulary.T) + 1.0


TokenDistribution = Mapping[str, float]
