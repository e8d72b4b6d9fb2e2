"""Codecs for the two file formats shared with the tokenizer toolkit.

* vocabulary file (consumed): ``token<TAB>count`` per line; token order in
  the file defines the morpheme embedding indices.
* trees file (produced): ``word<TAB>tree`` per line with the binary bracket
  grammar ``TREE := CHAR | "(" TREE " " TREE ")"`` and the escapes ``\\(``,
  ``\\)``, ``\\\\`` on single-character leaves.
"""

from __future__ import annotations

import os
import tempfile
from typing import Iterable

from .model import SpanNode

_ESCAPES = {"(": "\\(", ")": "\\)", "\\": "\\\\"}


def load_morph_vocab(path: str) -> list[str]:
    """Tokens of a vocabulary file, in file order (defines embedding ids)."""
    tokens: list[str] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            token = line.split("\t", 1)[0]
            if not token or token in seen:
                raise ValueError(f"bad or duplicate vocabulary entry {line!r}")
            seen.add(token)
            tokens.append(token)
    return tokens


def serialize_span_tree(word: str, node: SpanNode) -> str:
    """One ``word<TAB>tree`` line for an induced tree."""

    def render(n: SpanNode) -> str:
        if n.left is None or n.right is None:
            ch = word[n.i]
            return _ESCAPES.get(ch, ch)
        return f"({render(n.left)} {render(n.right)})"

    return f"{word}\t{render(node)}"


def write_trees_file(lines: Iterable[str], path: str) -> None:
    """Write atomically so failures never leave partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            for line in lines:
                handle.write(line + "\n")
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
