"""Reading and writing the four file formats the toolkit exchanges.

* trees file: one ``word<TAB>tree`` per line, where the tree grammar is
  ``TREE := CHAR | "(" TREE " " TREE ")"`` with single-character leaves and
  the escapes ``\\(``, ``\\)``, ``\\\\`` inside leaves.
* corpus file: UTF-8 text, one sentence per line, whitespace-delimited words.
* vocabulary file: ``token<TAB>count`` per line, descending count, ties
  broken lexicographically.  This file is the serialized tokenizer model;
  entropies are derived on load.
* gold file: ``word<TAB>morph1 morph2 ...`` surface segmentations.

All writers are atomic: output goes to a temporary file in the target
directory and is renamed into place only on success.
"""

from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO

from .core import ParseNode, Vocabulary, validate_tree
from .errors import (
    ConcatMismatchError,
    InvalidUtf8Error,
    MalformedLineError,
    NonBinaryError,
)

_LEAF_ESCAPES = {"(": "\\(", ")": "\\)", "\\": "\\\\"}


@dataclass(frozen=True)
class TreeRecord:
    """A word together with its binary character-level parse."""

    word: str
    tree: ParseNode


@dataclass(frozen=True)
class CorpusStats:
    """Word frequencies and line counts of a corpus file."""

    word_freq: dict[str, int]
    sentences: int
    total_words: int


@dataclass(frozen=True)
class GoldSegmentation:
    """A word and its gold morph sequence; morphs concatenate to the word."""

    word: str
    morphs: tuple[str, ...]


@contextmanager
def atomic_writer(path: str) -> Iterator[TextIO]:
    """Open a UTF-8 text file for writing; rename into place only on success."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            yield handle
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


class _TreeParser:
    """Recursive-descent parser for the bracketed tree grammar."""

    def __init__(self, text: str, line: str) -> None:
        self.text = text
        self.pos = 0
        self.leaf_index = 0
        self.line = line

    def fail(self, reason: str) -> MalformedLineError:
        return MalformedLineError(f"{reason} at column {self.pos} in {self.line!r}")

    def peek(self) -> str | None:
        return self.text[self.pos] if self.pos < len(self.text) else None

    def skip_spaces(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] == " ":
            self.pos += 1

    def parse(self) -> ParseNode:
        node = self.parse_tree()
        self.skip_spaces()
        if self.pos != len(self.text):
            raise self.fail("trailing characters after tree")
        return node

    def parse_tree(self) -> ParseNode:
        ch = self.peek()
        if ch is None:
            raise self.fail("unexpected end of tree")
        if ch == "(":
            self.pos += 1
            self.skip_spaces()
            left = self.parse_tree()
            if self.peek() != " ":
                raise self.fail("expected space between children")
            self.skip_spaces()
            right = self.parse_tree()
            self.skip_spaces()
            nxt = self.peek()
            if nxt == ")":
                self.pos += 1
                return ParseNode.branch(left, right)
            if nxt is None:
                raise self.fail("unclosed bracket")
            # A third child inside one bracket pair: structurally non-binary.
            raise NonBinaryError(f"bracket groups more than two children in {self.line!r}")
        if ch == ")":
            raise self.fail("unexpected ')'")
        return self.parse_leaf()

    def parse_leaf(self) -> ParseNode:
        ch = self.text[self.pos]
        if ch == "\\":
            if self.pos + 1 >= len(self.text):
                raise self.fail("dangling escape")
            escaped = self.text[self.pos + 1]
            if escaped not in "()\\":
                raise self.fail(f"unknown escape sequence before {escaped!r}")
            ch = escaped
            self.pos += 2
        else:
            self.pos += 1
        node = ParseNode.leaf(self.leaf_index, ch)
        self.leaf_index += 1
        return node


def parse_tree_record(line: str) -> TreeRecord:
    """Parse one ``word<TAB>tree`` line into a validated :class:`TreeRecord`."""
    line = line.rstrip("\n")
    if "\t" not in line:
        raise MalformedLineError(f"missing tab separator in {line!r}")
    word, tree_text = line.split("\t", 1)
    if not word or any(c.isspace() for c in word):
        raise MalformedLineError(f"bad word field in {line!r}")
    tree = _TreeParser(tree_text, line).parse()
    validate_tree(tree, word)
    return TreeRecord(word, tree)


def _serialize_node(node: ParseNode, out: list[str]) -> None:
    if node.is_leaf:
        out.append(_LEAF_ESCAPES.get(node.token, node.token))
        return
    out.append("(")
    _serialize_node(node.left, out)  # type: ignore[arg-type]
    out.append(" ")
    _serialize_node(node.right, out)  # type: ignore[arg-type]
    out.append(")")


def serialize_tree(rec: TreeRecord) -> str:
    """Inverse of :func:`parse_tree_record`, in canonical single-space form."""
    parts: list[str] = []
    _serialize_node(rec.tree, parts)
    return f"{rec.word}\t{''.join(parts)}"


def load_trees(path: str) -> list[TreeRecord]:
    """Read a trees file; blank lines are skipped."""
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(parse_tree_record(line))
    return records


def save_trees(records: Iterable[TreeRecord], path: str) -> None:
    with atomic_writer(path) as handle:
        for rec in records:
            handle.write(serialize_tree(rec) + "\n")


def load_corpus(path: str, lowercase: bool = False) -> CorpusStats:
    """Count word frequencies in a one-sentence-per-line UTF-8 corpus.

    Lines without words are skipped and do not count as sentences.  Raises
    :class:`InvalidUtf8Error` with the byte offset of the first bad byte.
    """
    with open(path, "rb") as handle:
        raw = handle.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidUtf8Error(path, exc.start) from exc
    return corpus_stats_from_lines(text.splitlines(), lowercase=lowercase)


def corpus_stats_from_lines(lines: Iterable[str], lowercase: bool = False) -> CorpusStats:
    word_freq: dict[str, int] = {}
    sentences = 0
    total = 0
    for line in lines:
        words = line.split()
        if not words:
            continue
        sentences += 1
        for word in words:
            if lowercase:
                word = word.lower()
            word_freq[word] = word_freq.get(word, 0) + 1
            total += 1
    return CorpusStats(word_freq, sentences, total)


def load_gold(path: str) -> list[GoldSegmentation]:
    """Read gold segmentations.

    Entries with several alternative analyses (comma-separated) are reduced
    to the first analysis.  Raises :class:`ConcatMismatchError` for analyses
    that are not surface segmentations of the word.
    """
    out = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise MalformedLineError(f"missing tab separator in {line!r}")
            word, analysis = line.split("\t", 1)
            morphs = tuple(analysis.split(",")[0].split())
            if not morphs:
                raise MalformedLineError(f"empty analysis in {line!r}")
            if "".join(morphs) != word:
                raise ConcatMismatchError(
                    f"morphs {' '.join(morphs)!r} spell {''.join(morphs)!r}, not {word!r}"
                )
            out.append(GoldSegmentation(word, morphs))
    return out


def save_gold(golds: Iterable[GoldSegmentation], path: str) -> None:
    with atomic_writer(path) as handle:
        for gold in golds:
            handle.write(f"{gold.word}\t{' '.join(gold.morphs)}\n")


def vocabulary_lines(vocab: Vocabulary) -> Iterator[str]:
    """Vocabulary entries as file lines: descending count, then lexicographic."""
    for token, count in sorted(vocab.entries.items(), key=lambda kv: (-kv[1], kv[0])):
        yield f"{token}\t{count}"


def save_vocabulary(vocab: Vocabulary, path: str) -> None:
    with atomic_writer(path) as handle:
        for line in vocabulary_lines(vocab):
            handle.write(line + "\n")


def load_vocabulary(path: str) -> Vocabulary:
    entries: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise MalformedLineError(f"missing tab separator in {line!r}")
            token, count_text = line.split("\t", 1)
            try:
                count = int(count_text)
            except ValueError:
                raise MalformedLineError(f"bad count in {line!r}") from None
            if not token or count < 0:
                raise MalformedLineError(f"bad vocabulary entry {line!r}")
            entries[token] = count
    return Vocabulary(entries)
