import math
import random

import pytest

from morphtok import (
    Vocabulary,
    ToolConfig,
    TreeRecord,
    build_vocabulary,
    count_tree_pairs,
    e_step,
    entropy_of,
    init_vocab,
    m_step,
    parse_tree_record,
    prune_vocab,
    tree_viterbi,
)
from morphtok.errors import TargetBelowCharacterFloorError

from conftest import (
    brute_force_tree_min,
    dyadic_entropy,
    random_tree,
    random_word,
    tree_segmentations,
)


def rec(line: str) -> TreeRecord:
    return parse_tree_record(line)


CHAR_VOCAB_BOOK = Vocabulary({"b": 1, "o": 2, "k": 1})


class TestCountTreePairs:
    def test_only_sibling_pair_counted(self):
        # [[b[o o]]k] over characters: only (o, o) shares a parent.
        pairs = count_tree_pairs([(rec("book\t((b (o o)) k)"), 5)], CHAR_VOCAB_BOOK)
        assert pairs == {"oo": 5}

    def test_recount_after_merge(self):
        vocab = Vocabulary({"b": 1, "o": 2, "k": 1, "oo": 2})
        pairs = count_tree_pairs([(rec("book\t((b (o o)) k)"), 5)], vocab)
        assert pairs == {"boo": 5}

    def test_root_hit_contributes_nothing(self):
        vocab = Vocabulary({"a": 1, "b": 1, "ab": 1})
        assert count_tree_pairs([(rec("ab\t(a b)"), 9)], vocab) == {}

    def test_permutation_and_frequency_splitting_invariance(self, rng):
        records = []
        for _ in range(30):
            word = random_word(rng, 2, 8, "abc")
            records.append((rec(f"{word}\t" + _serialize(random_tree(word, rng))), rng.randint(1, 5)))
        chars = Vocabulary({c: 1 for c in "abc"})
        base = count_tree_pairs(records, chars)
        shuffled = records[:]
        rng.shuffle(shuffled)
        assert count_tree_pairs(shuffled, chars) == base
        split = [(record, 1) for record, freq in records for _ in range(freq)]
        assert count_tree_pairs(split, chars) == base


def _serialize(node) -> str:
    if node.is_leaf:
        return node.token
    return f"({_serialize(node.left)} {_serialize(node.right)})"


class TestInitVocab:
    def test_two_round_fixpoint(self):
        trees = [(rec("aaaa\t((a a) (a a))"), 1) for _ in range(10)]
        vocab = init_vocab(trees, pair_threshold=5)
        assert vocab.entries == {"a": 40, "aa": 20, "aaaa": 10}

    def test_threshold_above_every_pair(self):
        trees = [(rec("aaaa\t((a a) (a a))"), 1) for _ in range(10)]
        vocab = init_vocab(trees, pair_threshold=1000)
        assert vocab.entries == {"a": 40}

    def test_threshold_is_strict(self):
        trees = [(rec("ab\t(a b)"), 10)]
        assert "ab" not in init_vocab(trees, pair_threshold=10)
        assert "ab" in init_vocab(trees, pair_threshold=9)

    def test_single_char_words_degenerate(self):
        trees = [(rec("a\ta"), 3), (rec("b\tb"), 2)]
        assert init_vocab(trees, pair_threshold=0).entries == {"a": 3, "b": 2}


class TestTreeViterbi:
    BOOK_ENTROPIES = {"book": 1.0, "bo": 2.0, "ok": 2.5, "b": 3.0, "o": 3.0, "k": 3.0}

    def test_whole_word_wins(self):
        # Oracle check: brute force over all 5 tree-consistent segmentations.
        root = rec("book\t((b o) (o k))").tree
        assert len(tree_segmentations(root)) == 5
        assert brute_force_tree_min(root, self.BOOK_ENTROPIES) == (1.0, ["book"])
        assert tree_viterbi(root, self.BOOK_ENTROPIES) == (1.0, ["book"])

    def test_absent_node_forces_split(self):
        root = rec("ab\t(a b)").tree
        entropy, tokens = tree_viterbi(root, {"a": 1.0, "b": 1.0})
        assert tokens == ["a", "b"] and entropy == 2.0

    def test_tie_splits(self):
        root = rec("ab\t(a b)").tree
        entropy, tokens = tree_viterbi(root, {"a": 1.0, "b": 1.0, "ab": 2.0})
        assert tokens == ["a", "b"] and entropy == 2.0

    def test_absent_leaf_yields_infinite_total(self):
        root = rec("ab\t(a b)").tree
        entropy, tokens = tree_viterbi(root, {"a": 1.0})
        assert math.isinf(entropy) and tokens == ["a", "b"]

    def test_optimality_on_random_trees(self, rng):
        for _ in range(200):
            word = random_word(rng, 1, 12, "abcd")
            root = random_tree(word, rng)
            entropies = {}
            for node_span in {n.token for n in _walk(root)}:
                if rng.random() < 0.8:
                    entropies[node_span] = dyadic_entropy(rng)
            got_entropy, got_tokens = tree_viterbi(root, entropies)
            want_entropy, _ = brute_force_tree_min(root, entropies)
            assert got_entropy == want_entropy
            if not math.isinf(got_entropy):
                assert sum(entropies[t] for t in got_tokens) == got_entropy
                assert "".join(got_tokens) == word

    def test_delta_accumulation(self):
        # Single word "ab", e(ab)=1, e(a)=e(b)=2, freq 7: delta 3 per pass.
        root = rec("ab\t(a b)").tree
        delta: dict[str, float] = {}
        entropy, tokens = tree_viterbi(root, {"ab": 1.0, "a": 2.0, "b": 2.0}, delta)
        assert tokens == ["ab"] and entropy == 1.0
        assert delta == {"ab": 3.0}


def _walk(node):
    yield node
    if node.left is not None:
        yield from _walk(node.left)
        yield from _walk(node.right)


class TestEStep:
    def test_whole_word_segmentations_count_word_freq(self):
        trees = [(rec("ab\t(a b)"), 4), (rec("cd\t(c d)"), 6)]
        vocab = Vocabulary({"ab": 50, "cd": 50, "a": 1, "b": 1, "c": 1, "d": 1})
        counted = e_step(trees, vocab)
        assert counted.count("ab") == 4 and counted.count("cd") == 6

    def test_unused_token_dropped_chars_kept(self):
        trees = [(rec("ab\t(a b)"), 100)]
        vocab = Vocabulary({"a": 1, "b": 1, "ab": 10})
        counted = e_step(trees, vocab)
        assert counted.entries == {"ab": 100, "a": 0, "b": 0}

    def test_count_sum_invariant(self, rng):
        trees = []
        for _ in range(20):
            word = random_word(rng, 1, 6, "ab")
            trees.append((rec(f"{word}\t" + _serialize(random_tree(word, rng))), rng.randint(1, 7)))
        vocab = init_vocab(trees, pair_threshold=2)
        counted = e_step(trees, vocab)
        entropies = vocab.to_entropies()
        expected = sum(
            len(tree_viterbi(record.tree, entropies)[1]) * freq for record, freq in trees
        )
        assert sum(counted.entries.values()) == expected
        assert all(c >= 0 for c in counted.entries.values())


class TestMStep:
    def test_delta_times_frequency(self):
        trees = [(rec("ab\t(a b)"), 7)]
        vocab = Vocabulary({"ab": 1, "a": 1, "b": 1})
        delta = m_step(trees, vocab, entropies={"ab": 1.0, "a": 2.0, "b": 2.0})
        assert delta["ab"] == pytest.approx(21.0)

    def test_token_not_changing_entropy_has_zero_delta(self):
        # "ab" more expensive than the split: never kept, delta never read.
        trees = [(rec("ab\t(a b)"), 5)]
        delta = m_step(trees, Vocabulary({"ab": 1, "a": 1, "b": 1}),
                       entropies={"ab": 5.0, "a": 1.0, "b": 1.0})
        assert delta.get("ab", 0.0) == 0.0

    def test_characters_only_collect_zero_delta(self):
        trees = [(rec("ab\t(a b)"), 5)]
        delta = m_step(trees, Vocabulary({"a": 1, "b": 1}),
                       entropies={"a": 1.0, "b": 1.0})
        assert delta.get("a", 0.0) == 0.0 and delta.get("b", 0.0) == 0.0

    def test_shuffle_invariance(self, rng):
        trees = []
        for _ in range(40):
            word = random_word(rng, 2, 7, "abc")
            trees.append((rec(f"{word}\t" + _serialize(random_tree(word, rng))), rng.randint(1, 9)))
        vocab = init_vocab(trees, pair_threshold=1)
        counted = e_step(trees, vocab)
        base = m_step(trees, counted)
        shuffled = trees[:]
        rng.shuffle(shuffled)
        assert m_step(shuffled, counted) == base  # fsum: bitwise identical


class TestPruneVocab:
    def test_target_equals_size_is_identity(self):
        trees = [(rec("ab\t(a b)"), 2)]
        vocab = Vocabulary({"a": 2, "b": 2, "ab": 2})
        assert prune_vocab(trees, vocab, 3, 0.1) == vocab

    def test_below_character_floor_rejected(self):
        vocab = Vocabulary({"a": 1, "b": 1, "ab": 1})
        with pytest.raises(TargetBelowCharacterFloorError):
            prune_vocab([(rec("ab\t(a b)"), 1)], vocab, 1, 0.1)

    def test_abab_least_useful_token_goes_first(self):
        trees = [(rec("abab\t((a b) (a b))"), 100)]
        vocab = init_vocab(trees, pair_threshold=5)
        assert set(vocab.entries) == {"a", "b", "ab", "abab"}
        pruned = prune_vocab(trees, vocab, 3, 0.5)
        # Brute-force oracle: corpus entropy of the one-word corpus is 0 under
        # any single-token segmentation, so the ranking falls to the Viterbi
        # delta, which keeps "abab" (it heads the chosen segmentation).
        assert set(pruned.entries) == {"a", "b", "abab"}

    def test_removal_budget_and_strict_shrink(self, rng):
        trees = []
        for _ in range(60):
            word = random_word(rng, 2, 8, "abcd")
            trees.append((rec(f"{word}\t" + _serialize(random_tree(word, rng))), rng.randint(1, 9)))
        vocab = init_vocab(trees, pair_threshold=0)
        chars = vocab.characters()
        target = len(chars) + 2
        assert len(vocab) > target
        pruned = prune_vocab(trees, vocab, target, 0.15)
        assert len(pruned) == target
        assert chars <= set(pruned.entries)


class TestBuildVocabulary:
    def _toy_trees(self, rng, n_words=40):
        trees = []
        for _ in range(n_words):
            word = random_word(rng, 2, 8, "abcde")
            trees.append((rec(f"{word}\t" + _serialize(random_tree(word, rng))), rng.randint(1, 20)))
        return trees

    def test_exact_target_and_shuffle_determinism(self, rng):
        trees = self._toy_trees(rng)
        chars = {leaf.token for record, _ in trees for leaf in record.tree.leaves()}
        config = ToolConfig(pair_threshold=2, prune_rate=0.2, target_vocab_size=len(chars) + 5)
        first = build_vocabulary(trees, config)
        shuffled = trees[:]
        random.Random(99).shuffle(shuffled)
        second = build_vocabulary(shuffled, config)
        assert first == second
        assert len(first) == config.target_vocab_size

    def test_target_at_character_count(self, rng):
        trees = self._toy_trees(rng)
        chars = {leaf.token for record, _ in trees for leaf in record.tree.leaves()}
        config = ToolConfig(pair_threshold=2, prune_rate=0.3, target_vocab_size=len(chars))
        built = build_vocabulary(trees, config)
        assert set(built.entries) == chars

    def test_paper_scale_target_is_the_default(self):
        assert ToolConfig().target_vocab_size == 30_000
