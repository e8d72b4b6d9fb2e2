"""Command line: ``charparse train`` and ``charparse export-trees``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .formats import load_morph_vocab
from .training import (
    DivergenceError,
    TrainConfig,
    export_trees,
    load_checkpoint,
    save_checkpoint,
    train,
)


def _cmd_train(args: argparse.Namespace) -> int:
    with open(args.corpus, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    morphs = load_morph_vocab(args.morph_vocab)
    config = TrainConfig(
        dim=args.dim,
        heads=args.heads,
        comp_layers=args.layers,
        lm_layers=args.lm_layers,
        steps=args.steps,
        batch_size=args.batch_size,
        lr=args.lr,
        seed=args.seed,
        morph_override=not args.no_morph_override,
        use_context=not args.no_context,
        span_loss=not args.char_span_loss_only,
        weighted_spans=not args.unweighted_spans,
    )
    checkpoint = train(lines, morphs, config)
    save_checkpoint(checkpoint, args.out)
    log = checkpoint["log"]
    if log["total"]:
        print(f"final loss {log['total'][-1]:.4f} after {config.steps} steps", file=sys.stderr)
    print(f"wrote checkpoint to {args.out}", file=sys.stderr)
    return 0


def _cmd_export_trees(args: argparse.Namespace) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    with open(args.words, "r", encoding="utf-8") as handle:
        words = [line.strip() for line in handle if line.strip()]
    export_trees(checkpoint, words, args.out)
    print(f"wrote {len(words)} trees to {args.out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charparse",
        description="Train a character composition model and export induced parse trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on a one-sentence-per-line corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--morph-vocab", required=True, help="vocabulary file (token<TAB>count)")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--dim", type=int, default=TrainConfig.dim)
    p.add_argument("--heads", type=int, default=TrainConfig.heads)
    p.add_argument("--layers", type=int, default=TrainConfig.comp_layers)
    p.add_argument("--lm-layers", type=int, default=TrainConfig.lm_layers)
    p.add_argument("--steps", type=int, default=TrainConfig.steps)
    p.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    p.add_argument("--lr", type=float, default=TrainConfig.lr)
    p.add_argument("--seed", type=int, default=TrainConfig.seed)
    p.add_argument("--no-morph-override", action="store_true",
                   help="ablation: every span slot degenerates to the empty slot")
    p.add_argument("--no-context", action="store_true",
                   help="ablation: drop the next-word loss")
    p.add_argument("--char-span-loss-only", action="store_true",
                   help="ablation: span prediction restricted to characters")
    p.add_argument("--unweighted-spans", action="store_true",
                   help="ablation: uniform span prediction weights")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("export-trees", help="induce and write trees for a word list")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--words", required=True, help="one word per line")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_trees)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
