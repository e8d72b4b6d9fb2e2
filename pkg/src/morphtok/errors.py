"""Exception hierarchy for the toolkit.

All domain failures derive from :class:`MorphtokError` so callers (and the
CLI) can distinguish recoverable domain errors from genuine bugs.
"""

from __future__ import annotations


class MorphtokError(Exception):
    """Base class for all domain errors raised by this package."""


class TreeValidationError(MorphtokError):
    """A parse tree violates one of the structural invariants."""


class NonBinaryError(TreeValidationError):
    """A node has exactly one child, or a bracket groups more than two."""


class SpanMismatchError(TreeValidationError):
    """Child spans do not partition the parent span contiguously."""


class TokenMismatchError(TreeValidationError):
    """A node's token disagrees with the characters its span covers."""


class MalformedLineError(MorphtokError):
    """A line of an input file does not match the expected grammar."""


class InvalidUtf8Error(MorphtokError):
    """Input bytes are not valid UTF-8."""

    def __init__(self, path: str, byte_offset: int) -> None:
        super().__init__(f"{path}: invalid UTF-8 at byte offset {byte_offset}")
        self.path = path
        self.byte_offset = byte_offset


class ConcatMismatchError(MorphtokError):
    """Gold morphs do not concatenate to the word they segment."""


class MissingTreeError(MorphtokError):
    """A word has no parse tree and no fallback strategy was configured."""

    def __init__(self, word: str) -> None:
        super().__init__(f"no parse tree for word {word!r} and no fallback configured")
        self.word = word


class TargetBelowCharacterFloorError(MorphtokError):
    """Requested vocabulary size is smaller than the character inventory."""


class LengthMismatchError(MorphtokError):
    """Two sequences that must be aligned have different lengths or keys."""


class CoverageMismatchError(MorphtokError):
    """A tree does not cover the word it is evaluated against."""


class InvalidAlphaError(MorphtokError):
    """Renyi order must be positive and different from 1."""
