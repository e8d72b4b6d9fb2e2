"""Shared generators and brute-force oracles for the test suite.

The oracles are deliberately naive (exhaustive enumeration) and never share
code with the implementations they check.
"""

from __future__ import annotations

import math
import random

import pytest

from morphtok import ParseNode


def random_tree(word: str, rng: random.Random) -> ParseNode:
    """A uniform-ish random binary tree over the word's characters."""

    def build(i: int, j: int) -> ParseNode:
        if i == j:
            return ParseNode.leaf(i, word[i])
        k = rng.randint(i, j - 1)
        return ParseNode.branch(build(i, k), build(k + 1, j))

    return build(0, len(word) - 1)


def random_word(rng: random.Random, min_len: int = 1, max_len: int = 12,
                alphabet: str = "abcdefgh()\\") -> str:
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(min_len, max_len)))


def tree_segmentations(node: ParseNode) -> list[list[str]]:
    """Every segmentation reachable by cutting the tree at subtree roots."""
    if node.left is None or node.right is None:
        return [[node.token]]
    out = [[node.token]]
    for left in tree_segmentations(node.left):
        for right in tree_segmentations(node.right):
            out.append(left + right)
    return out


def brute_force_tree_min(node: ParseNode, entropies) -> tuple[float, list[str]]:
    """Minimum total entropy over all tree-consistent segmentations."""
    best_value = math.inf
    best_seg: list[str] = [node.token]
    for seg in tree_segmentations(node):
        value = sum(entropies.get(token, math.inf) for token in seg)
        if value < best_value:
            best_value = value
            best_seg = seg
    return best_value, best_seg


def contiguous_partitions(n: int):
    """All ways of cutting range(n) into contiguous runs, as index lists."""
    for mask in range(1 << (n - 1)):
        part = []
        start = 0
        for cut in range(n - 1):
            if mask & (1 << cut):
                part.append((start, cut))
                start = cut + 1
        part.append((start, n - 1))
        yield part


def brute_force_merge_min(tokens, entropies, missing_entropy=math.inf) -> float:
    """Minimum total entropy over all contiguous-run merges of a token list."""
    best = math.inf
    for part in contiguous_partitions(len(tokens)):
        total = 0.0
        for i, j in part:
            if i == j:
                total += entropies.get(tokens[i], missing_entropy)
            else:
                total += entropies.get("".join(tokens[i : j + 1]), math.inf)
        best = min(best, total)
    return best


def collect_spans(node: ParseNode) -> set[tuple[int, int]]:
    """Span set of a tree by plain recursion (independent of ParseNode.spans)."""
    if node.left is None or node.right is None:
        return {(node.i, node.j)}
    return {(node.i, node.j)} | collect_spans(node.left) | collect_spans(node.right)


def dyadic_entropy(rng: random.Random) -> float:
    """Entropy values on a 1/1024 grid: short float sums are exact, so DP and
    oracle totals can be compared with ``==``."""
    return rng.randint(1, 8 * 1024) / 1024.0


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)


acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one line per acceptance criterion after the test summary."""
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
