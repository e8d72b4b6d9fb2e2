"""Command-line surface.

Subcommands: ``build-vocab``, ``bpe-train``, ``tokenize``, ``parse`` and
``eval`` (with ``seg-accuracy``, ``morph-recall``, ``renyi``, ``stats``).
Every flag can also come from a flat ``key = value`` config file passed with
``--config``; explicit flags win over the file, the file wins over defaults.
Exit codes: 0 success, 1 domain error, 2 usage error.  ``-`` stands for
standard input/output wherever a text stream is expected.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from typing import Callable, Iterable, Sequence

from . import baselines, metrics, segment, treeio, vocab as vocab_mod
from .core import ToolConfig, TokenizerModel
from .errors import LengthMismatchError, MalformedLineError, MissingTreeError, MorphtokError


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _rate(text: str) -> float:
    value = float(text)
    if not (0.0 < value < 1.0):
        raise argparse.ArgumentTypeError(f"expected a rate in (0, 1), got {text!r}")
    return value


def _alpha(text: str) -> float:
    value = float(text)
    if value <= 0 or value == 1.0:
        raise argparse.ArgumentTypeError(
            f"Renyi order must be > 0 and != 1, got {text!r}"
        )
    return value


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise MalformedLineError(f"expected 'key = value' in config, got {line!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("_", "-")] = value.strip()
    return values


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


class _Settings:
    """Flag > config file > default resolution for one parsed command."""

    def __init__(self, args: argparse.Namespace) -> None:
        self.args = args
        path = getattr(args, "config", None)
        self.file_values = _load_config_file(path) if path else {}

    def get(self, name: str, default, cast: Callable[[str], object] = str):
        explicit = getattr(self.args, name, None)
        if explicit is not None:
            return explicit
        raw = self.file_values.get(name.replace("_", "-"))
        if raw is None:
            return default
        if cast is bool:  # type: ignore[comparison-overlap]
            lowered = raw.lower()
            if lowered in _BOOL_TRUE:
                return True
            if lowered in _BOOL_FALSE:
                return False
            raise MalformedLineError(f"expected a boolean for {name}, got {raw!r}")
        return cast(raw)


def _read_lines(path: str) -> list[str]:
    if path == "-":
        return sys.stdin.read().splitlines()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read().splitlines()


def _write_lines(lines: Iterable[str], path: str) -> None:
    if path == "-":
        for line in lines:
            sys.stdout.write(line + "\n")
        return
    with treeio.atomic_writer(path) as handle:
        for line in lines:
            handle.write(line + "\n")


def _format_value(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit_metric(name: str, value, stream=None) -> None:
    print(f"{name}\t{_format_value(value)}", file=stream or sys.stdout)


def _weighted_trees(
    records: list[treeio.TreeRecord], word_freq: dict[str, int]
) -> list[tuple[treeio.TreeRecord, int]]:
    by_word = {record.word: record for record in records}
    weighted = []
    for word, freq in word_freq.items():
        record = by_word.get(word)
        if record is None:
            raise MissingTreeError(word)
        weighted.append((record, freq))
    return weighted


def _cmd_build_vocab(args: argparse.Namespace) -> int:
    settings = _Settings(args)
    defaults = ToolConfig()
    lowercase = settings.get("lowercase", defaults.lowercase, bool)
    config = ToolConfig(
        pair_threshold=settings.get("pair_threshold", defaults.pair_threshold, int),
        prune_rate=settings.get("prune_rate", defaults.prune_rate, float),
        target_vocab_size=settings.get("vocab_size", defaults.target_vocab_size, int),
        lowercase=lowercase,
    )
    threads = settings.get("threads", 1, int)
    corpus = treeio.load_corpus(args.corpus, lowercase=lowercase)
    weighted = _weighted_trees(treeio.load_trees(args.trees), corpus.word_freq)
    built = vocab_mod.build_vocabulary(weighted, config, threads=threads)
    if len(built) != config.target_vocab_size:
        print(
            f"warning: corpus supports only {len(built)} tokens "
            f"(target was {config.target_vocab_size})",
            file=sys.stderr,
        )
    treeio.save_vocabulary(built, args.out)
    print(f"wrote {len(built)} tokens to {args.out}", file=sys.stderr)
    return 0


def _cmd_bpe_train(args: argparse.Namespace) -> int:
    settings = _Settings(args)
    lowercase = settings.get("lowercase", False, bool)
    corpus = treeio.load_corpus(args.corpus, lowercase=lowercase)
    merges, trained = baselines.bpe_train(
        corpus, settings.get("vocab_size", ToolConfig().target_vocab_size, int)
    )
    treeio.save_vocabulary(trained, args.out)
    if args.merges_out:
        baselines.save_merges(merges, args.merges_out)
    print(f"learned {len(merges)} merges, {len(trained)} tokens", file=sys.stderr)
    return 0


def _cmd_tokenize(args: argparse.Namespace) -> int:
    settings = _Settings(args)
    defaults = ToolConfig()
    config = ToolConfig(
        cache_capacity=settings.get("cache", defaults.cache_capacity, int),
    )
    threads = settings.get("threads", 1, int)
    model = TokenizerModel.from_vocabulary(treeio.load_vocabulary(args.model), config)
    trees = {record.word: record.tree for record in treeio.load_trees(args.trees)}
    sentences = _read_lines(args.text)
    token_lists, stats = segment.tokenize_corpus(
        model,
        trees,
        sentences,
        fallback=settings.get("fallback", None),
        fallback_seed=settings.get("seed", 0, int),
        threads=threads,
    )
    _write_lines((" ".join(tokens) for tokens in token_lists), args.out)
    _emit_metric("sentences", stats.sentences, sys.stderr)
    _emit_metric("total-tokens", stats.total_tokens, sys.stderr)
    _emit_metric("avg-tokens-per-sentence", stats.avg_tokens_per_sentence, sys.stderr)
    _emit_metric("unk-rate", stats.unk_rate, sys.stderr)
    return 0


def _cmd_parse(args: argparse.Namespace) -> int:
    settings = _Settings(args)
    lowercase = settings.get("lowercase", False, bool)
    corpus = treeio.load_corpus(args.text, lowercase=lowercase)
    seed = settings.get("seed", 0, int)
    records = [
        treeio.TreeRecord(word, baselines.fallback_tree(word, args.strategy, seed))
        for word in sorted(corpus.word_freq)
    ]
    treeio.save_trees(records, args.out)
    print(f"wrote {len(records)} trees to {args.out}", file=sys.stderr)
    return 0


def _tokenize_gold_words(
    args: argparse.Namespace, settings: _Settings, golds: list[treeio.GoldSegmentation]
) -> list[Sequence[str]]:
    model = TokenizerModel.from_vocabulary(treeio.load_vocabulary(args.model))
    trees = {record.word: record.tree for record in treeio.load_trees(args.trees)}
    fallback = settings.get("fallback", None)
    preds: list[Sequence[str]] = []
    for gold in golds:
        tree = trees.get(gold.word)
        if tree is None:
            if fallback is None:
                raise MissingTreeError(gold.word)
            tree = baselines.fallback_tree(gold.word, fallback, settings.get("seed", 0, int))
        preds.append(segment.tokenize_word(model, gold.word, tree).tokens)
    return preds


def _cmd_eval_seg_accuracy(args: argparse.Namespace) -> int:
    settings = _Settings(args)
    golds = treeio.load_gold(args.gold)
    if args.pred:
        pred_records = treeio.load_gold(args.pred)
        if len(pred_records) != len(golds):
            raise LengthMismatchError(
                f"{len(pred_records)} predictions against {len(golds)} gold entries"
            )
        for pred, gold in zip(pred_records, golds):
            if pred.word != gold.word:
                raise LengthMismatchError(
                    f"prediction word {pred.word!r} does not align with gold {gold.word!r}"
                )
        preds: list[Sequence[str]] = [record.morphs for record in pred_records]
    elif args.model and args.trees:
        preds = _tokenize_gold_words(args, settings, golds)
    else:
        raise MorphtokError("seg-accuracy needs either --pred or both --model and --trees")
    _emit_metric("seg-accuracy", metrics.segmentation_accuracy(preds, golds))
    return 0


def _cmd_eval_morph_recall(args: argparse.Namespace) -> int:
    golds = treeio.load_gold(args.gold)
    trees = {record.word: record.tree for record in treeio.load_trees(args.trees)}
    pairs = []
    for gold in golds:
        tree = trees.get(gold.word)
        if tree is None:
            raise MissingTreeError(gold.word)
        pairs.append((tree, gold))
    _emit_metric("morph-recall", metrics.average_morpheme_recall(pairs))
    return 0


def _cmd_eval_renyi(args: argparse.Namespace) -> int:
    settings = _Settings(args)
    alpha = settings.get("alpha", ToolConfig().renyi_alpha, _alpha)
    counts = Counter(
        token for line in _read_lines(args.text) for token in line.split()
    )
    efficiency = metrics.renyi_efficiency(metrics.distribution_from_counts(counts), alpha)
    _emit_metric("renyi", efficiency)
    return 0


def _cmd_eval_stats(args: argparse.Namespace) -> int:
    token_lists = [line.split() for line in _read_lines(args.text)]
    trained = treeio.load_vocabulary(args.model) if args.model else None
    stats = metrics.corpus_stats(token_lists, trained)
    _emit_metric("sentences", stats.sentences)
    _emit_metric("total-tokens", stats.total_tokens)
    _emit_metric("avg-tokens-per-sentence", stats.avg_tokens_per_sentence)
    if trained is not None:
        _emit_metric("unk-rate", stats.unk_rate)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--threads", type=_positive_int, help="worker cap (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphtok",
        description="Tree-guided subword tokenizer: build vocabularies, tokenize, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-vocab", help="construct and prune a vocabulary from trees")
    p.add_argument("--trees", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--vocab-size", type=_positive_int)
    p.add_argument("--pair-threshold", type=int)
    p.add_argument("--prune-rate", type=_rate)
    p.add_argument("--lowercase", action=argparse.BooleanOptionalAction, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_build_vocab)

    p = sub.add_parser("bpe-train", help="train the classic pair-merge baseline")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="vocabulary file to write")
    p.add_argument("--merges-out", help="also write the merge list")
    p.add_argument("--vocab-size", type=_positive_int)
    p.add_argument("--lowercase", action=argparse.BooleanOptionalAction, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_bpe_train)

    p = sub.add_parser("tokenize", help="tokenize a corpus with a model and trees")
    p.add_argument("--model", required=True, help="vocabulary file")
    p.add_argument("--trees", required=True)
    p.add_argument("--text", required=True, help="corpus file, or - for stdin")
    p.add_argument("--out", required=True, help="output file, or - for stdout")
    p.add_argument("--fallback", choices=baselines.FALLBACK_STRATEGIES)
    p.add_argument("--seed", type=int)
    p.add_argument("--cache", type=int, help="cache capacity (0 disables)")
    _add_common(p)
    p.set_defaults(func=_cmd_tokenize)

    p = sub.add_parser("parse", help="write fallback trees for every corpus word")
    p.add_argument("--text", required=True, help="corpus file")
    p.add_argument("--out", required=True)
    p.add_argument("--strategy", required=True, choices=baselines.FALLBACK_STRATEGIES)
    p.add_argument("--seed", type=int)
    p.add_argument("--lowercase", action=argparse.BooleanOptionalAction, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_parse)

    ev = sub.add_parser("eval", help="evaluation metrics")
    ev_sub = ev.add_subparsers(dest="metric", required=True)

    p = ev_sub.add_parser("seg-accuracy", help="exact-match segmentation accuracy")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", help="predictions in gold format (word<TAB>tokens)")
    p.add_argument("--model", help="vocabulary file, for tokenizing the gold words")
    p.add_argument("--trees")
    p.add_argument("--fallback", choices=baselines.FALLBACK_STRATEGIES)
    p.add_argument("--seed", type=int)
    _add_common(p)
    p.set_defaults(func=_cmd_eval_seg_accuracy)

    p = ev_sub.add_parser("morph-recall", help="gold morphs found among tree spans")
    p.add_argument("--gold", required=True)
    p.add_argument("--trees", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_eval_morph_recall)

    p = ev_sub.add_parser("renyi", help="Renyi efficiency of a tokenized corpus")
    p.add_argument("--text", required=True, help="tokenized corpus, or - for stdin")
    p.add_argument("--alpha", type=_alpha)
    _add_common(p)
    p.set_defaults(func=_cmd_eval_renyi)

    p = ev_sub.add_parser("stats", help="token counts of a tokenized corpus")
    p.add_argument("--text", required=True, help="tokenized corpus, or - for stdin")
    p.add_argument("--model", help="vocabulary file, for the unknown-token rate")
    _add_common(p)
    p.set_defaults(func=_cmd_eval_stats)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MorphtokError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
