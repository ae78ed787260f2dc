"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class PribomError(Exception):
    """Base class for every error raised by this package."""


class BinaryParseError(PribomError):
    """A binary input could not be decoded.

    Carries the byte offset at which decoding failed so truncated or
    corrupt inputs can be reported precisely.
    """

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class ApkError(PribomError):
    """The APK container is missing required members or is not a zip."""


class AxmlError(BinaryParseError):
    """Binary XML chunk stream is malformed."""


class ArscError(BinaryParseError):
    """Resource table chunk stream is malformed."""


class DexError(BinaryParseError):
    """DEX file is malformed or uses an unsupported version."""


class DocumentError(PribomError):
    """An inventory document failed schema-level decoding."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at byte offset {position})"
        super().__init__(message)


class UnknownPermissionError(PribomError):
    """Permission is absent from the bundled permission catalog."""


class NotDangerousError(PribomError):
    """Permission is in the catalog but not protection level dangerous."""


class HierarchyCycleError(PribomError):
    """Application classes form an inheritance cycle."""
