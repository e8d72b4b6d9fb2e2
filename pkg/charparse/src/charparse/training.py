"""Training loop, checkpoints, and tree export."""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field
from typing import Sequence

import torch

from .formats import serialize_span_tree, write_trees_file
from .losses import TrainingBatch, auto_encoding_loss, auto_regression_loss
from .model import CharCompositionModel, ModelConfig, tree_from_chart


class DivergenceError(RuntimeError):
    """Raised when the training loss stops being finite."""


@dataclass
class TrainConfig:
    dim: int = 64
    heads: int = 4
    comp_layers: int = 2
    lm_layers: int = 2
    steps: int = 400
    batch_size: int = 16
    lr: float = 2e-3
    seed: int = 0
    max_chars: int = 512
    lm_max_len: int = 64
    ae_weight: float = 1.0
    ar_weight: float = 1.0
    # Ablation switches.
    morph_override: bool = True   # off: span slots degenerate to the empty slot
    use_context: bool = True      # off: drop the next-word loss
    span_loss: bool = True        # off: predict characters only
    weighted_spans: bool = True   # off: unweighted span prediction loss
    log_every: int = 50

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            dim=self.dim,
            heads=self.heads,
            comp_layers=self.comp_layers,
            lm_layers=self.lm_layers,
            lm_max_len=self.lm_max_len,
            morph_override=self.morph_override,
        )


@dataclass
class TrainLog:
    steps: list[int] = field(default_factory=list)
    ae: list[float] = field(default_factory=list)
    ar: list[float] = field(default_factory=list)
    total: list[float] = field(default_factory=list)
    spanless_batches: int = 0


def corpus_sequences(lines: Sequence[str], max_chars: int) -> list[list[str]]:
    """Word sequences per line, truncated to the character budget."""
    sequences = []
    for line in lines:
        words = line.split()
        if not words:
            continue
        kept: list[str] = []
        used = 0
        for word in words:
            used += len(word) + 1
            if kept and used > max_chars:
                break
            kept.append(word)
        sequences.append(kept)
    return sequences


def _charset(sequences: list[list[str]], morphs: Sequence[str]) -> list[str]:
    chars = {c for seq in sequences for word in seq for c in word}
    chars |= {m for m in morphs if len(m) == 1}
    return sorted(chars)


def train(
    lines: Sequence[str],
    morphs: Sequence[str],
    config: TrainConfig | None = None,
) -> dict:
    """Train on one-sentence-per-line text; returns a checkpoint dict.

    Reproducible under a fixed seed: model init, batch order, and every
    reduction are deterministic on a fixed device.
    """
    config = config or TrainConfig()
    torch.manual_seed(config.seed)
    sequences = corpus_sequences(lines, config.max_chars)
    if not sequences:
        raise ValueError("corpus has no sentences")
    chars = _charset(sequences, morphs)
    model = CharCompositionModel(chars, list(morphs), config.model_config())
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    rng = random.Random(config.seed)
    order: list[int] = []
    log = TrainLog()

    model.train()
    for step in range(config.steps):
        if len(order) < config.batch_size:
            fresh = list(range(len(sequences)))
            rng.shuffle(fresh)
            order.extend(fresh)
        picked = [sequences[i] for i in order[: config.batch_size]]
        del order[: config.batch_size]
        batch = TrainingBatch([seq[: config.lm_max_len] for seq in picked])
        charts = _charts_for(model, batch.words, config)

        ae, n_spans = auto_encoding_loss(
            model, charts, weighted=config.weighted_spans, char_only=not config.span_loss
        )
        if n_spans == 0:
            log.spanless_batches += 1
        loss = config.ae_weight * ae
        ar = torch.zeros(())
        if config.use_context:
            embeddings = _root_embeddings(charts)
            ar = auto_regression_loss(model, batch, embeddings)
            loss = loss + config.ar_weight * ar
        if not torch.isfinite(loss):
            raise DivergenceError(f"non-finite loss at step {step}: {loss.item()!r}")
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        if step % config.log_every == 0 or step == config.steps - 1:
            log.steps.append(step)
            log.ae.append(ae.detach().item())
            log.ar.append(ar.detach().item())
            log.total.append(loss.detach().item())
    model.eval()
    return {
        "model_state": model.state_dict(),
        "chars": chars,
        "morphs": list(morphs),
        "train_config": asdict(config),
        "log": asdict(log),
    }


def _charts_for(model: CharCompositionModel, words: list[str], config: TrainConfig):
    by_len: dict[int, list[str]] = {}
    for word in words:
        by_len.setdefault(len(word), []).append(word)
    charts = []
    for length in sorted(by_len):
        chart = model.inside_pass(by_len[length])
        model.outside_pass(chart)
        if config.weighted_spans:
            model.span_probabilities(chart)
        charts.append(chart)
    return charts


def _root_embeddings(charts) -> dict[str, torch.Tensor]:
    out = {}
    for chart in charts:
        root = chart.inside[chart.root]
        for row, word in enumerate(chart.words):
            out[word] = root[row]
    return out


def save_checkpoint(checkpoint: dict, path: str) -> None:
    torch.save(checkpoint, path)


def load_checkpoint(path: str) -> dict:
    return torch.load(path, weights_only=False)


def model_from_checkpoint(checkpoint: dict) -> CharCompositionModel:
    config = TrainConfig(**checkpoint["train_config"])
    model = CharCompositionModel(
        checkpoint["chars"], checkpoint["morphs"], config.model_config()
    )
    model.load_state_dict(checkpoint["model_state"])
    model.eval()
    return model


def induce_trees(model: CharCompositionModel, words: Sequence[str]) -> list[str]:
    """``word<TAB>tree`` lines for each word, in input order."""
    order = {word: pos for pos, word in enumerate(words)}
    if len(order) != len(words):
        raise ValueError("duplicate words in export list")
    by_len: dict[int, list[str]] = {}
    for word in words:
        by_len.setdefault(len(word), []).append(word)
    lines: list[str] = [""] * len(words)
    with torch.no_grad():
        for length in sorted(by_len):
            group = by_len[length]
            chart = model.inside_pass(group)
            for row, word in enumerate(group):
                node = tree_from_chart(chart, row)
                lines[order[word]] = serialize_span_tree(word, node)
    return lines


def export_trees(checkpoint: dict, words: Sequence[str], path: str) -> None:
    """Induce one tree per word and write the trees file."""
    model = model_from_checkpoint(checkpoint)
    write_trees_file(induce_trees(model, words), path)
