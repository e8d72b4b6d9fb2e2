"""Synthetic morphology language for desk-scale training and evaluation.

A generated language of stems crossed with a small suffix inventory, plus
two-stem compounds.  Every sentence interleaves function-word markers that
correlate with the following word's suffix group, so sentence context carries
the signal needed to place morpheme boundaries (the same argument that
separates ask+ing from as+king in natural text).  Stems, suffixes, and
markers use disjoint letter sets, which keeps the gold boundaries
unambiguous.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

STEM_LETTERS = "bdfgklmprtv"
SUFFIXES = ["an", "iz", "osh", "une", "ec"]
MARKERS = ["qa", "wo", "xu", "yi", "ja"]
COMPOUND_MARKER = "zz"


@dataclass
class MorphologyFixture:
    stems: list[str]
    suffixes: list[str]
    markers: list[str]
    lines: list[str]
    gold: dict[str, tuple[str, ...]]

    inflections: list[str] = field(default_factory=list)
    compounds: list[str] = field(default_factory=list)
    heldout_inflections: list[str] = field(default_factory=list)
    heldout_compounds: list[str] = field(default_factory=list)

    @property
    def heldout(self) -> list[str]:
        return self.heldout_inflections + self.heldout_compounds

    def gold_lines(self, words: list[str]) -> list[str]:
        return [f"{w}\t{' '.join(self.gold[w])}" for w in words]


def _make_stems(rng: random.Random, n_stems: int) -> list[str]:
    stems: list[str] = []
    seen: set[str] = set()
    while len(stems) < n_stems:
        stem = "".join(rng.choice(STEM_LETTERS) for _ in range(rng.randint(3, 4)))
        # No stem may be a prefix of another, so compound boundaries stay unique.
        if stem in seen or any(s.startswith(stem) or stem.startswith(s) for s in stems):
            continue
        seen.add(stem)
        stems.append(stem)
    return stems


def build_fixture(
    seed: int = 0,
    n_stems: int = 20,
    n_compounds: int = 36,
    n_sentences: int = 1600,
    heldout_fraction: float = 0.15,
) -> MorphologyFixture:
    rng = random.Random(seed)
    stems = _make_stems(rng, n_stems)
    marker_of = dict(zip(SUFFIXES, MARKERS))

    inflections = [s + x for s in stems for x in SUFFIXES]
    pairs: list[tuple[str, str]] = []
    while len(pairs) < n_compounds:
        a, b = rng.sample(stems, 2)
        if (a, b) not in pairs:
            pairs.append((a, b))
    compounds = [a + b for a, b in pairs]

    gold: dict[str, tuple[str, ...]] = {}
    for stem in stems:
        for suffix in SUFFIXES:
            gold[stem + suffix] = (stem, suffix)
    for (a, b), word in zip(pairs, compounds):
        gold[word] = (a, b)

    heldout_inflections = sorted(rng.sample(inflections, int(len(inflections) * heldout_fraction)))
    heldout_compounds = sorted(rng.sample(compounds, max(2, int(len(compounds) * heldout_fraction))))
    blocked = set(heldout_inflections) | set(heldout_compounds)

    def inflected(stem: str, suffix: str) -> str | None:
        word = stem + suffix
        return None if word in blocked else word

    lines: list[str] = []
    while len(lines) < n_sentences:
        words: list[str] = []
        kind = rng.random()
        if kind < 0.6:
            # Inflection chains; the stem persists for a while so different
            # suffixed forms of one stem co-occur in context.
            stem = rng.choice(stems)
            for _ in range(rng.randint(2, 3)):
                suffix = rng.choice(SUFFIXES)
                word = inflected(stem, suffix)
                if word is not None:
                    words += [marker_of[suffix], word]
                if rng.random() < 0.4:
                    stem = rng.choice(stems)
        elif kind < 0.85:
            # Independent inflections.
            for _ in range(rng.randint(2, 3)):
                suffix = rng.choice(SUFFIXES)
                word = inflected(rng.choice(stems), suffix)
                if word is not None:
                    words += [marker_of[suffix], word]
        else:
            # A compound next to an inflected form of its head stem.
            a, b = rng.choice(pairs)
            if a + b not in blocked:
                words += [COMPOUND_MARKER, a + b]
            suffix = rng.choice(SUFFIXES)
            word = inflected(a, suffix)
            if word is not None:
                words += [marker_of[suffix], word]
        if words:
            lines.append(" ".join(words))

    return MorphologyFixture(
        stems=stems,
        suffixes=list(SUFFIXES),
        markers=list(MARKERS),
        lines=lines,
        gold=gold,
        inflections=inflections,
        compounds=compounds,
        heldout_inflections=heldout_inflections,
        heldout_compounds=heldout_compounds,
    )
