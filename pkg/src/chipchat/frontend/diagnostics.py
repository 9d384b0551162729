"""Source positions and parse diagnostics shared across the frontend."""

from __future__ import annotations

import enum
from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    """Half-open byte range [start, end) plus the 1-based line/column of start."""

    line: int
    col: int
    start: int
    end: int

    def merge(self, other: "Span") -> "Span":
        if other.start < self.start:
            first, last = other, self
        else:
            first, last = self, other
        return Span(first.line, first.col, first.start, max(self.end, last.end))


class ParseErrorKind(enum.Enum):
    LEXICAL = "lexical"
    SYNTAX = "syntax"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class ParseDiagnostic:
    kind: ParseErrorKind
    message: str
    span: Span

    @property
    def line(self) -> int:
        return self.span.line

    @property
    def col(self) -> int:
        return self.span.col

    def render(self) -> str:
        return f"line {self.span.line}, column {self.span.col}: {self.message}"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "message": self.message,
            "line": self.span.line,
            "col": self.span.col,
        }


class ParseError(Exception):
    """Raised by parse() when the source has one or more problems."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.render() for d in diagnostics))
