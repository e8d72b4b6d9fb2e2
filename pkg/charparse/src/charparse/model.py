"""Character-level composition model over binary chart parses.

Every word is encoded bottom-up: each span's vector is a weighted average of
composition vectors over all of its binary splits, with the weights given by
learned compatibility scores.  When a span's string matches an entry of the
morpheme vocabulary, the span's slot in the composition function carries that
morpheme's embedding instead of the shared empty slot, letting the model mix
with or override the purely compositional vector for units that should not
decompose.  A matching top-down pass produces context vectors per span, and a
second top-down recursion yields each span's existence probability under the
chart's split distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import torch
from torch import Tensor, nn


@dataclass
class ModelConfig:
    dim: int = 64
    heads: int = 4
    comp_layers: int = 2
    lm_layers: int = 2
    ffn_mult: int = 4
    lm_max_len: int = 64
    morph_override: bool = True  # False: every span slot is the empty slot


class Block(nn.Module):
    """Pre-norm attention block."""

    def __init__(self, dim: int, heads: int, ffn_mult: int) -> None:
        super().__init__()
        self.norm1 = nn.LayerNorm(dim)
        self.attn = nn.MultiheadAttention(dim, heads, batch_first=True)
        self.norm2 = nn.LayerNorm(dim)
        self.mlp = nn.Sequential(
            nn.Linear(dim, ffn_mult * dim), nn.GELU(), nn.Linear(ffn_mult * dim, dim)
        )

    def forward(self, x: Tensor, attn_mask: Tensor | None = None) -> Tensor:
        normed = self.norm1(x)
        attended, _ = self.attn(
            normed, normed, normed, attn_mask=attn_mask, need_weights=False
        )
        x = x + attended
        return x + self.mlp(self.norm2(x))


class SlotEncoder(nn.Module):
    """Scores and composes a fixed number of role-tagged input slots.

    Used with three slots (left constituent, right constituent, morpheme
    slot) for the bottom-up composition function, and with two slots
    (surrounding context, sibling constituent) for the top-down one.
    Returns one composed vector and one scalar compatibility score per row.
    """

    def __init__(self, n_slots: int, config: ModelConfig) -> None:
        super().__init__()
        self.roles = nn.Parameter(torch.zeros(n_slots, config.dim))
        self.blocks = nn.ModuleList(
            Block(config.dim, config.heads, config.ffn_mult)
            for _ in range(config.comp_layers)
        )
        self.out = nn.Linear(config.dim, config.dim)
        self.out_norm = nn.LayerNorm(config.dim)
        self.score = nn.Linear(config.dim, 1)
        nn.init.normal_(self.roles, std=0.02)

    def forward(self, slots: Tensor) -> tuple[Tensor, Tensor]:
        x = slots + self.roles
        for block in self.blocks:
            x = block(x)
        pooled = x.mean(dim=1)
        return self.out_norm(self.out(pooled)), self.score(pooled).squeeze(-1)


class CausalLM(nn.Module):
    """Small autoregressive attention model over composed word embeddings."""

    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        self.pos = nn.Embedding(config.lm_max_len, config.dim)
        self.blocks = nn.ModuleList(
            Block(config.dim, config.heads, config.ffn_mult)
            for _ in range(config.lm_layers)
        )
        self.norm = nn.LayerNorm(config.dim)
        nn.init.normal_(self.pos.weight, std=0.02)

    def forward(self, x: Tensor) -> Tensor:
        """[batch, steps, dim] -> hidden states; position t sees only <= t."""
        steps = x.shape[1]
        positions = torch.arange(steps, device=x.device)
        x = x + self.pos(positions)
        mask = torch.full((steps, steps), float("-inf"), dtype=x.dtype, device=x.device)
        mask = torch.triu(mask, diagonal=1)
        for block in self.blocks:
            x = block(x, attn_mask=mask)
        return self.norm(x)


@dataclass
class Chart:
    """Inside/outside tables for a batch of same-length words.

    Span keys are 0-based inclusive (i, j).  ``split_weights[(i, j)]`` holds
    one weight per split k = i..j-1 (index k - i); ``context_weights`` holds
    one weight per parent configuration, enumerated as k = j+1..n-1 then
    k = 0..i-1.
    """

    words: list[str]
    n: int
    inside: dict[tuple[int, int], Tensor]
    split_scores: dict[tuple[int, int], Tensor] = field(default_factory=dict)
    split_weights: dict[tuple[int, int], Tensor] = field(default_factory=dict)
    morph_ids: dict[tuple[int, int], Tensor] = field(default_factory=dict)
    context: dict[tuple[int, int], Tensor] = field(default_factory=dict)
    context_weights: dict[tuple[int, int], Tensor] = field(default_factory=dict)
    span_prob: dict[tuple[int, int], Tensor] = field(default_factory=dict)

    @property
    def root(self) -> tuple[int, int]:
        return (0, self.n - 1)

    def spans(self):
        for width in range(1, self.n + 1):
            for i in range(self.n - width + 1):
                yield (i, i + width - 1)


UNK_CHAR = 0  # reserved row of the character table


class CharCompositionModel(nn.Module):
    """Composition model plus the causal LM head used during training."""

    def __init__(self, chars: Sequence[str], morphs: Sequence[str], config: ModelConfig) -> None:
        super().__init__()
        if len(set(chars)) != len(chars) or len(set(morphs)) != len(morphs):
            raise ValueError("character and morpheme inventories must be duplicate-free")
        self.config = config
        self.chars = list(chars)
        self.morphs = list(morphs)
        self.char_index = {c: i + 1 for i, c in enumerate(self.chars)}
        self.morph_index = {m: i for i, m in enumerate(self.morphs)}
        self.char_emb = nn.Embedding(len(self.chars) + 1, config.dim)
        self.char_norm = nn.LayerNorm(config.dim)
        self.morph_emb = nn.Embedding(max(len(self.morphs), 1), config.dim)
        self.empty_slot = nn.Parameter(torch.zeros(config.dim))
        self.composer = SlotEncoder(3, config)
        self.context_composer = SlotEncoder(2, config)
        self.root_context = nn.Parameter(torch.zeros(config.dim))
        self.lm = CausalLM(config)
        nn.init.normal_(self.char_emb.weight, std=0.02)
        nn.init.normal_(self.morph_emb.weight, std=0.02)
        nn.init.normal_(self.empty_slot, std=0.02)
        nn.init.normal_(self.root_context, std=0.02)

    # -- chart construction ------------------------------------------------

    def _char_ids(self, words: list[str]) -> Tensor:
        rows = [[self.char_index.get(c, UNK_CHAR) for c in word] for word in words]
        return torch.tensor(rows, dtype=torch.long)

    def _morph_ids(self, words: list[str]) -> dict[tuple[int, int], Tensor]:
        n = len(words[0])
        out = {}
        for i in range(n):
            for j in range(i, n):
                ids = [self.morph_index.get(w[i : j + 1], -1) for w in words]
                out[(i, j)] = torch.tensor(ids, dtype=torch.long)
        return out

    def _slot(self, ids: Tensor) -> Tensor:
        """Morpheme embedding where the span hits the vocabulary, else the
        shared empty slot (always the empty slot when overriding is off)."""
        dtype = self.empty_slot.dtype
        empty = self.empty_slot.unsqueeze(0).expand(ids.shape[0], -1)
        if not self.config.morph_override:
            return empty
        hit = (ids >= 0).unsqueeze(-1)
        emb = self.morph_emb(ids.clamp(min=0)).to(dtype)
        return torch.where(hit, emb, empty)

    def inside_pass(self, words: list[str]) -> Chart:
        """Bottom-up chart over a batch of words of equal length."""
        if not words:
            raise ValueError("empty batch")
        n = len(words[0])
        if n == 0:
            raise ValueError("empty word")
        if any(len(w) != n for w in words):
            raise ValueError("words in one chart batch must share a length")
        device = self.empty_slot.device
        char_ids = self._char_ids(words).to(device)
        leaves = self.char_norm(self.char_emb(char_ids))
        chart = Chart(words=list(words), n=n, inside={})
        chart.morph_ids = {
            span: ids.to(device) for span, ids in self._morph_ids(words).items()
        }
        for i in range(n):
            chart.inside[(i, i)] = leaves[:, i]
        batch = len(words)
        dim = self.config.dim
        for width in range(2, n + 1):
            spans = [(i, i + width - 1) for i in range(n - width + 1)]
            splits = width - 1
            lefts, rights, slots = [], [], []
            for i, j in spans:
                slot = self._slot(chart.morph_ids[(i, j)])
                for k in range(i, j):
                    lefts.append(chart.inside[(i, k)])
                    rights.append(chart.inside[(k + 1, j)])
                    slots.append(slot)
            stacked = torch.stack(
                [torch.stack(lefts), torch.stack(rights), torch.stack(slots)], dim=2
            )  # [spans*splits, batch, 3, dim]
            vec, score = self.composer(stacked.view(-1, 3, dim))
            vec = vec.view(len(spans), splits, batch, dim)
            score = score.view(len(spans), splits, batch)
            weight = torch.softmax(score, dim=1)
            for idx, span in enumerate(spans):
                chart.split_scores[span] = score[idx].permute(1, 0)
                chart.split_weights[span] = weight[idx].permute(1, 0)
                chart.inside[span] = torch.einsum("kb,kbd->bd", weight[idx], vec[idx])
        return chart

    def outside_pass(self, chart: Chart) -> Chart:
        """Top-down context vectors; the root context is a learned vector."""
        n = chart.n
        batch = len(chart.words)
        dim = self.config.dim
        root = chart.root
        chart.context[root] = (
            self.root_context.unsqueeze(0).expand(batch, -1).to(chart.inside[root].dtype)
        )
        for width in range(n - 1, 0, -1):
            spans = [(i, i + width - 1) for i in range(n - width + 1)]
            configs = n - width  # parent configurations per span at this width
            outers, siblings = [], []
            for i, j in spans:
                for k in range(j + 1, n):
                    outers.append(chart.context[(i, k)])
                    siblings.append(chart.inside[(j + 1, k)])
                for k in range(0, i):
                    outers.append(chart.context[(k, j)])
                    siblings.append(chart.inside[(k, i - 1)])
            stacked = torch.stack(
                [torch.stack(outers), torch.stack(siblings)], dim=2
            )  # [spans*configs, batch, 2, dim]
            vec, score = self.context_composer(stacked.view(-1, 2, dim))
            vec = vec.view(len(spans), configs, batch, dim)
            score = score.view(len(spans), configs, batch)
            weight = torch.softmax(score, dim=1)
            for idx, span in enumerate(spans):
                chart.context_weights[span] = weight[idx].permute(1, 0)
                chart.context[span] = torch.einsum("kb,kbd->bd", weight[idx], vec[idx])
        return chart

    def span_probabilities(self, chart: Chart) -> Chart:
        """Existence probability of every span, top-down from p(root) = 1."""
        n = chart.n
        batch = len(chart.words)
        root_vec = chart.inside[chart.root]
        chart.span_prob[chart.root] = torch.ones(
            batch, dtype=root_vec.dtype, device=root_vec.device
        )
        for width in range(n - 1, 0, -1):
            for i in range(n - width + 1):
                j = i + width - 1
                total = torch.zeros(batch, dtype=root_vec.dtype, device=root_vec.device)
                for k in range(0, i):  # parent (k, j), split at i-1
                    total = total + chart.span_prob[(k, j)] * chart.split_weights[(k, j)][:, i - 1 - k]
                for k in range(j + 1, n):  # parent (i, k), split at j
                    total = total + chart.span_prob[(i, k)] * chart.split_weights[(i, k)][:, j - i]
                chart.span_prob[(i, j)] = total
        return chart

    def full_chart(self, words: list[str]) -> Chart:
        return self.span_probabilities(self.outside_pass(self.inside_pass(words)))

    # -- inference ----------------------------------------------------------

    def compose_word_embedding(self, word: str) -> Tensor:
        """The root inside vector; the representation of the whole word."""
        chart = self.inside_pass([word])
        return chart.inside[chart.root][0]

    def embed_words(self, words: Sequence[str]) -> dict[str, Tensor]:
        """Root inside vectors for unique words, charted per length group."""
        unique: list[str] = []
        seen = set()
        for word in words:
            if word not in seen:
                seen.add(word)
                unique.append(word)
        by_len: dict[int, list[str]] = {}
        for word in unique:
            by_len.setdefault(len(word), []).append(word)
        out: dict[str, Tensor] = {}
        for length in sorted(by_len):
            group = by_len[length]
            chart = self.inside_pass(group)
            root = chart.inside[chart.root]
            for row, word in enumerate(group):
                out[word] = root[row]
        return out


@dataclass(frozen=True)
class SpanNode:
    """Binary tree node over character positions, 0-based inclusive."""

    i: int
    j: int
    left: "SpanNode | None" = None
    right: "SpanNode | None" = None


def induce_tree(model: CharCompositionModel, word: str) -> SpanNode:
    """Greedy top-down split selection by compatibility score.

    At each span the split with the highest score wins; exact ties take the
    smallest split index.  This reads the inside chart directly.
    """
    with torch.no_grad():
        chart = model.inside_pass([word])
    return tree_from_chart(chart, row=0)


def tree_from_chart(chart: Chart, row: int) -> SpanNode:
    def descend(i: int, j: int) -> SpanNode:
        if i == j:
            return SpanNode(i, j)
        scores = chart.split_scores[(i, j)][row].tolist()
        best = max(range(len(scores)), key=lambda idx: (scores[idx], -idx))
        k = i + best
        return SpanNode(i, j, descend(i, k), descend(k + 1, j))

    return descend(0, chart.n - 1)
