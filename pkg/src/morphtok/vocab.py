"""Tree-constrained vocabulary construction.

Construction happens in two phases.  Initialization walks every parse tree
and repeatedly promotes adjacent sibling pairs that co-occur often enough,
starting from single characters.  Pruning then alternates a count
re-estimation step with a delta-entropy step over a tree-restricted Viterbi
segmentation, discarding the tokens whose removal costs the least total
entropy until the target size is reached.  Single characters are never
pruned, so every training word stays tokenizable.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

from .core import EntropyTable, ParseNode, ToolConfig, Vocabulary, ordered_map
from .errors import TargetBelowCharacterFloorError
from .treeio import TreeRecord

WeightedTrees = Sequence[tuple[TreeRecord, int]]


def count_tree_pairs(trees: WeightedTrees, vocab: Vocabulary) -> dict[str, int]:
    """Count merge candidates: sibling pairs sharing a parent not yet in ``vocab``.

    A node contributes its token as a candidate iff both children recursively
    hit the vocabulary while the node's own token is absent from it; a node
    whose token is already in ``vocab`` propagates the hit upward without
    contributing.  Counts accumulate across nodes and records, weighted by
    word frequency.
    """
    candidates: dict[str, int] = {}

    def recur(node: ParseNode, freq: int) -> bool:
        if node.left is None or node.right is None:
            return True
        hit_left = recur(node.left, freq)
        hit_right = recur(node.right, freq)
        if not (hit_left and hit_right):
            return False
        if node.token in vocab:
            return True
        candidates[node.token] = candidates.get(node.token, 0) + freq
        return False

    for record, freq in trees:
        recur(record.tree, freq)
    return candidates


def init_vocab(trees: WeightedTrees, pair_threshold: int) -> Vocabulary:
    """Grow the initial vocabulary from characters to a pair-count fixpoint.

    Starts from character frequencies, then repeatedly adds every merge
    candidate whose accumulated count strictly exceeds ``pair_threshold``,
    stopping once a full pass adds no new entry.
    """
    counts: dict[str, int] = {}
    for record, freq in trees:
        for leaf in record.tree.leaves():
            counts[leaf.token] = counts.get(leaf.token, 0) + freq
    vocab = Vocabulary(counts)
    while True:
        new_entries = {
            token: count
            for token, count in count_tree_pairs(trees, vocab).items()
            if count > pair_threshold
        }
        if not new_entries:
            return vocab
        vocab = Vocabulary({**vocab.entries, **new_entries})


def tree_viterbi(
    root: ParseNode,
    entropies: Mapping[str, float],
    delta: dict[str, float] | None = None,
) -> tuple[float, list[str]]:
    """Minimum-entropy segmentation among the cuts of one parse tree.

    Returns the total entropy and the token list.  A node is kept whole only
    when its own entropy is strictly below the children's best sum; exact
    ties split.  Tokens absent from ``entropies`` read as +inf, so leaves
    outside the table still yield a segmentation with infinite total.

    When ``delta`` is given, every internal node whose token has finite
    entropy accumulates ``max(best_children_sum - own_entropy, 0)`` under its
    token: the entropy the word would lose if that token were removed.
    """
    token = root.token
    if root.left is None or root.right is None:
        return entropies.get(token, math.inf), [token]
    left_entropy, left_tokens = tree_viterbi(root.left, entropies, delta)
    right_entropy, right_tokens = tree_viterbi(root.right, entropies, delta)
    split_entropy = left_entropy + right_entropy
    own = entropies.get(token, math.inf)
    if delta is not None and not math.isinf(own):
        delta[token] = delta.get(token, 0.0) + max(split_entropy - own, 0.0)
    if split_entropy > own:
        return own, [token]
    return split_entropy, left_tokens + right_tokens


def e_step(
    trees: WeightedTrees,
    vocab: Vocabulary,
    entropies: Mapping[str, float] | None = None,
    threads: int = 1,
) -> Vocabulary:
    """Re-estimate token counts from the Viterbi segmentation of every tree.

    Tokens whose new count is zero are dropped, except single characters,
    which survive at count zero.
    """
    if entropies is None:
        entropies = vocab.to_entropies()
    segments = ordered_map(
        lambda item: tree_viterbi(item[0].tree, entropies)[1], trees, threads
    )
    counts: dict[str, int] = {}
    for (_, freq), tokens in zip(trees, segments):
        for token in tokens:
            counts[token] = counts.get(token, 0) + freq
    for token in vocab:
        if len(token) == 1 and token not in counts:
            counts[token] = 0
    return Vocabulary(counts)


def m_step(
    trees: WeightedTrees,
    vocab: Vocabulary,
    entropies: Mapping[str, float] | None = None,
    threads: int = 1,
) -> dict[str, float]:
    """Accumulate per-token delta entropies over the corpus.

    For each word, a fresh per-word delta table is filled during the Viterbi
    pass; each token of the chosen segmentation then contributes its per-word
    delta times the word frequency.  Tokens recorded in the per-word table
    but absent from the chosen segmentation contribute nothing.

    Per-token totals use exactly-rounded summation, so the result is
    identical under any permutation of ``trees`` and any worker count.
    """
    if entropies is None:
        entropies = vocab.to_entropies()

    def per_word(item: tuple[TreeRecord, int]) -> tuple[list[str], dict[str, float], int]:
        record, freq = item
        local: dict[str, float] = {}
        _, tokens = tree_viterbi(record.tree, entropies, local)
        return tokens, local, freq

    contributions: dict[str, list[float]] = {}
    for tokens, local, freq in ordered_map(per_word, trees, threads):
        for token in tokens:
            contributions.setdefault(token, []).append(local.get(token, 0.0) * freq)
    return {token: math.fsum(values) for token, values in contributions.items()}


def prune_vocab(
    trees: WeightedTrees,
    vocab: Vocabulary,
    target_size: int,
    prune_rate: float,
    threads: int = 1,
) -> Vocabulary:
    """Shrink ``vocab`` to exactly ``target_size`` entries.

    Each round re-counts tokens, accumulates delta entropies, and removes the
    ``min(|V| - target, floor(prune_rate * |V|))`` non-character tokens with
    the lowest delta (at least one per round, so the size strictly
    decreases).  Delta ties break by ascending count, then lexicographically.
    """
    char_floor = vocab.characters()
    if target_size < len(char_floor):
        raise TargetBelowCharacterFloorError(
            f"target size {target_size} is below the {len(char_floor)}-character floor"
        )
    current = vocab
    while len(current) > target_size:
        counted = e_step(trees, current, threads=threads)
        if len(counted) < target_size:
            # The zero-count drop overshot the target; restore the
            # lexicographically smallest dropped tokens at count zero so the
            # final size is exact.
            restored = dict(counted.entries)
            missing = sorted(t for t in current.entries if t not in restored)
            for token in missing[: target_size - len(restored)]:
                restored[token] = 0
            return Vocabulary(restored)
        current = counted
        if len(current) <= target_size:
            break
        delta = m_step(trees, current, threads=threads)
        budget = min(
            len(current) - target_size,
            max(1, math.floor(prune_rate * len(current))),
        )
        removable = [t for t in current.entries if len(t) > 1]
        removable.sort(key=lambda t: (delta.get(t, 0.0), current.count(t), t))
        victims = set(removable[:budget])
        current = Vocabulary(
            {t: c for t, c in current.entries.items() if t not in victims}
        )
    return current


def build_vocabulary(
    trees: WeightedTrees, config: ToolConfig, threads: int = 1
) -> Vocabulary:
    """Initialize then prune; the result has exactly the configured size.

    When the corpus cannot support the requested size (the pair-count
    fixpoint is already smaller than the target), the fixpoint vocabulary is
    returned as is.
    """
    vocab = init_vocab(trees, config.pair_threshold)
    if len(vocab) <= config.target_vocab_size:
        return vocab
    return prune_vocab(
        trees, vocab, config.target_vocab_size, config.prune_rate, threads=threads
    )
