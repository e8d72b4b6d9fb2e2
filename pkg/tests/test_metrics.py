import math
import random

import pytest

from morphtok import (
    GoldSegmentation,
    Vocabulary,
    average_morpheme_recall,
    corpus_entropy,
    corpus_stats,
    distribution_from_counts,
    morpheme_recall,
    parse_tree_record,
    renyi_efficiency,
    segmentation_accuracy,
)
from morphtok.errors import CoverageMismatchError, InvalidAlphaError, LengthMismatchError

from conftest import collect_spans, random_tree, random_word


def gold(word: str, *morphs: str) -> GoldSegmentation:
    return GoldSegmentation(word, morphs)


class TestSegmentationAccuracy:
    def test_all_equal(self):
        golds = [gold("ab", "a", "b"), gold("cd", "cd")]
        assert segmentation_accuracy([["a", "b"], ["cd"]], golds) == 1.0

    def test_half_equal(self):
        golds = [gold("ab", "a", "b"), gold("cd", "cd")]
        assert segmentation_accuracy([["a", "b"], ["c", "d"]], golds) == 0.5

    def test_windsurfing_rows(self):
        golds = [gold("windsurfing", "wind", "surf", "ing")]
        assert segmentation_accuracy([["wind", "surf", "ing"]], golds) == 1.0
        assert segmentation_accuracy([["wind", "sur", "fing"]], golds) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            segmentation_accuracy([["a"]], [])

    def test_reordering_invariance(self):
        golds = [gold("ab", "a", "b"), gold("cd", "cd"), gold("ef", "e", "f")]
        preds = [["a", "b"], ["c", "d"], ["e", "f"]]
        base = segmentation_accuracy(preds, golds)
        order = [2, 0, 1]
        assert segmentation_accuracy([preds[i] for i in order], [golds[i] for i in order]) == base


WINDSURFING_TREE = parse_tree_record(
    "windsurfing\t(((w i) (n d)) (((s u) (r f)) ((i n) g)))"
).tree


class TestMorphemeRecall:
    def test_all_morphs_found(self):
        # Constituents at (0,3), (4,7), (8,10) cover wind|surf|ing exactly.
        assert morpheme_recall(WINDSURFING_TREE, gold("windsurfing", "wind", "surf", "ing")) == 1.0

    def test_partial_with_exclusions(self):
        # Spans present: "tri" yes, "cycles" (not "cycle"); "s" is excluded as
        # a single character, leaving 1 found of 2 eligible.
        tree = parse_tree_record("tricycles\t(((t r) i) ((c y) ((c l) (e s))))").tree
        assert morpheme_recall(tree, gold("tricycles", "tri", "cycle", "s")) == 0.5

    def test_whole_word_morph_not_applicable(self):
        tree = parse_tree_record("bed\t((b e) d)").tree
        assert morpheme_recall(tree, gold("bed", "bed")) is None

    def test_coverage_mismatch(self):
        with pytest.raises(CoverageMismatchError):
            morpheme_recall(WINDSURFING_TREE, gold("kitesurfing", "kite", "surf", "ing"))

    def test_monotone_in_added_spans(self):
        flat = parse_tree_record("abcdef\t(a (b (c (d (e f)))))").tree
        better = parse_tree_record("abcdef\t((a (b c)) ((d e) f))").tree
        g = gold("abcdef", "abc", "def")
        worse_value = morpheme_recall(flat, g)
        better_value = morpheme_recall(better, g)
        assert worse_value is not None and better_value is not None
        assert better_value >= worse_value

    def test_oracle_equality_on_random_pairs(self, rng):
        for _ in range(200):
            word = random_word(rng, 2, 10, "abcd")
            tree = random_tree(word, rng)
            # Random surface segmentation of the word.
            cuts = sorted(rng.sample(range(1, len(word)), rng.randint(0, len(word) - 1)))
            bounds = [0, *cuts, len(word)]
            morphs = tuple(word[i:j] for i, j in zip(bounds, bounds[1:]))
            g = GoldSegmentation(word, morphs)
            # Independent oracle over the recursive span set.
            spans = collect_spans(tree)
            eligible = found = 0
            offset = 0
            for morph in morphs:
                lo, hi = offset, offset + len(morph) - 1
                offset += len(morph)
                if len(morph) <= 1 or len(morph) >= len(word):
                    continue
                eligible += 1
                if (lo, hi) in spans and lo != hi and not (lo == 0 and hi == len(word) - 1):
                    found += 1
            expected = None if eligible == 0 else found / eligible
            assert morpheme_recall(tree, g) == expected

    def test_average_skips_not_applicable(self):
        tree_bed = parse_tree_record("bed\t((b e) d)").tree
        pairs = [
            (WINDSURFING_TREE, gold("windsurfing", "wind", "surf", "ing")),
            (tree_bed, gold("bed", "bed")),
        ]
        assert average_morpheme_recall(pairs) == 1.0


class TestRenyiEfficiency:
    def test_uniform_is_one(self):
        dist = {t: 0.25 for t in "abcd"}
        assert renyi_efficiency(dist, 2.5) == pytest.approx(1.0, abs=1e-9)

    def test_single_token_is_zero(self):
        assert renyi_efficiency({"a": 1.0}, 2.5) == 0.0

    def test_skewed_below_uniform(self):
        skewed = renyi_efficiency({"a": 0.9, "b": 0.1}, 2.5)
        uniform = renyi_efficiency({"a": 0.5, "b": 0.5}, 2.5)
        assert skewed < uniform

    @pytest.mark.parametrize("alpha", [1.0, 0.0, -1.0])
    def test_invalid_alpha(self, alpha):
        with pytest.raises(InvalidAlphaError):
            renyi_efficiency({"a": 0.5, "b": 0.5}, alpha)

    def test_range_and_uniform_maximum(self, rng):
        for _ in range(100):
            n = rng.randint(2, 12)
            weights = [rng.random() + 1e-9 for _ in range(n)]
            total = sum(weights)
            dist = {f"t{i}": w / total for i, w in enumerate(weights)}
            value = renyi_efficiency(dist, 2.5)
            assert 0.0 <= value <= 1.0 + 1e-12
            uniform = {f"t{i}": 1 / n for i in range(n)}
            assert renyi_efficiency(uniform, 2.5) == pytest.approx(1.0, abs=1e-9)

    def test_distribution_from_counts(self):
        dist = distribution_from_counts({"a": 3, "b": 1, "c": 0})
        assert dist == {"a": 0.75, "b": 0.25}
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)


class TestCorpusEntropy:
    def test_two_equal_tokens(self):
        assert corpus_entropy(Vocabulary({"a": 1, "b": 1})) == pytest.approx(math.log(2))

    def test_degenerate(self):
        assert corpus_entropy(Vocabulary({"a": 5})) == 0.0

    def test_zero_counts_ignored(self):
        assert corpus_entropy(Vocabulary({"a": 5, "b": 0})) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            corpus_entropy(Vocabulary({}))


class TestCorpusStats:
    def test_average(self):
        stats = corpus_stats([["a", "b", "c"], ["d", "e", "f", "g", "h"]])
        assert stats.avg_tokens_per_sentence == 4.0
        assert stats.total_tokens == 8

    def test_single_empty_sentence(self):
        stats = corpus_stats([[]])
        assert stats.avg_tokens_per_sentence == 0.0
        assert stats.sentences == 1

    def test_unk_rate_against_vocab(self):
        vocab = Vocabulary({"a": 1, "b": 1})
        stats = corpus_stats([["a", "zz"], ["b", "zz"]], vocab)
        assert stats.unk_tokens == 2
        assert stats.unk_rate == 0.5
