"""Self-supervised training objectives.

The span prediction loss asks the model to recover each in-vocabulary
subword from its context vector, optionally weighting every span by its
existence probability.  The next-word loss feeds composed word embeddings
through the causal LM and scores the true next word against all words of the
batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import torch
from torch import Tensor
from torch.nn import functional as F

from .model import CharCompositionModel, Chart


@dataclass
class TrainingBatch:
    """Word sequences plus the deduplicated word set they draw from."""

    sequences: list[list[str]]
    words: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.words:
            seen: set[str] = set()
            for sequence in self.sequences:
                for word in sequence:
                    if word not in seen:
                        seen.add(word)
                        self.words.append(word)

    @property
    def word_index(self) -> dict[str, int]:
        return {word: i for i, word in enumerate(self.words)}


def auto_encoding_loss(
    model: CharCompositionModel,
    charts: list[Chart],
    weighted: bool = True,
    char_only: bool = False,
) -> tuple[Tensor, int]:
    """Cross-entropy of predicting each in-vocabulary span from its context.

    Unweighted, the mean runs over the number of such spans; weighted, every
    span's term is scaled by its existence probability and the normalizer is
    the probability mass over the same spans.  ``char_only`` restricts the
    span set to single characters.  Returns (loss, number of spans); with no
    qualifying span the loss is 0 and the caller may count the event.
    """
    table = model.morph_emb.weight
    losses = []
    weights = []
    count = 0
    for chart in charts:
        for (i, j), ids in chart.morph_ids.items():
            if char_only and i != j:
                continue
            hit = ids >= 0
            if not bool(hit.any()):
                continue
            context = chart.context[(i, j)][hit]
            logits = context @ table.t().to(context.dtype)
            term = F.cross_entropy(logits, ids[hit], reduction="none")
            if weighted:
                prob = chart.span_prob[(i, j)][hit]
                losses.append(term * prob)
                weights.append(prob)
            else:
                losses.append(term)
            count += int(hit.sum())
    if not losses:
        zero = model.empty_slot.sum() * 0.0
        return zero, 0
    total = torch.cat(losses).sum()
    if weighted:
        denom = torch.cat(weights).sum().clamp(min=1e-12)
    else:
        denom = torch.tensor(float(count), dtype=total.dtype, device=total.device)
    return total / denom, count


def auto_regression_loss(
    model: CharCompositionModel,
    batch: TrainingBatch,
    embeddings: dict[str, Tensor],
) -> Tensor:
    """Mean cross-entropy of picking each next word among the batch's words.

    Hidden state t scores every candidate word embedding by dot product; the
    target is the word at position t+1.  Sequences with fewer than two words
    contribute nothing; a batch with no scored position returns 0.
    """
    candidates = torch.stack([embeddings[w] for w in batch.words])
    index = batch.word_index
    scored: list[Tensor] = []
    targets: list[int] = []
    sequences = [s for s in batch.sequences if len(s) >= 2]
    if not sequences:
        return model.root_context.sum() * 0.0
    max_len = max(len(s) for s in sequences)
    dim = candidates.shape[1]
    inputs = torch.zeros(len(sequences), max_len, dim, dtype=candidates.dtype)
    for row, sequence in enumerate(sequences):
        for t, word in enumerate(sequence):
            inputs[row, t] = embeddings[word]
    hidden = model.lm(inputs)
    for row, sequence in enumerate(sequences):
        for t in range(len(sequence) - 1):
            scored.append(hidden[row, t])
            targets.append(index[sequence[t + 1]])
    logits = torch.stack(scored) @ candidates.t()
    return F.cross_entropy(logits, torch.tensor(targets, dtype=torch.long))
