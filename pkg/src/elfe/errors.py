"""Error types raised across the verification pipeline.

Every error that points at source text carries a (line, column) location so
the CLI and the web service can report it precisely.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Loc:
    """1-based position in a source document."""

    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ElfeError(Exception):
    """Base class for document-level failures."""

    def __init__(self, message: str, loc: Loc | None = None):
        self.loc = loc
        self.message = message
        super().__init__(f"{loc}: {message}" if loc else message)


class InvalidCharacter(ElfeError):
    pass


class ParseError(ElfeError):
    """Syntax error; `expected` lists the token shapes that would have been accepted."""

    def __init__(self, message: str, loc: Loc | None = None, expected: tuple[str, ...] = ()):
        self.expected = expected
        if expected:
            message = f"{message} (expected one of: {', '.join(expected)})"
        super().__init__(message, loc)


class UnclosedBlock(ElfeError):
    pass


class DuplicateSlot(ElfeError):
    pass


class ConflictingNotation(ElfeError):
    pass


class UnmatchedAtom(ElfeError):
    pass


class AmbiguousMatch(ElfeError):
    pass


class UnknownLabel(ElfeError):
    pass


class UnknownName(ElfeError):
    pass


class StructureError(ElfeError):
    pass


class LibraryNotFound(ElfeError):
    pass


class CyclicInclude(ElfeError):
    pass


class UninterpretedSymbol(ElfeError):
    pass


class DocumentErrors(ElfeError):
    """Aggregate of independent desugaring errors, kept in source order."""

    def __init__(self, errors: list[ElfeError]):
        self.errors = errors
        first = errors[0]
        summary = str(first)
        if len(errors) > 1:
            summary += f" (+{len(errors) - 1} more)"
        super().__init__(summary, first.loc)
