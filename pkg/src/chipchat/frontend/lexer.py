"""Tokenizer for the accepted Verilog-2005 subset.

Produces a flat token stream with byte/line/column positions so every AST
node can carry an exact source span. Comments and whitespace are skipped;
compiler directives we tolerate (`default_nettype, `timescale, `resetall)
are skipped too, anything else backticked is a hard error.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import ParseDiagnostic, ParseErrorKind, Span

KEYWORDS = frozenset(
    """
    module endmodule input output inout wire reg integer real parameter
    localparam assign always initial begin end if else case casez casex
    endcase default for while repeat forever fork join posedge negedge
    or signed function endfunction task endtask generate endgenerate
    genvar defparam specify endspecify primitive endprimitive
    """.split()
)

# Multi-character operators, longest first so the scanner is greedy.
OPERATORS = [
    "<<<", ">>>", "===", "!==", "~^", "^~", "<<", ">>", "<=", ">=",
    "==", "!=", "&&", "||", "~&", "~|", "+:", "-:", "(", ")", "[", "]",
    "{", "}", ",", ";", ":", "?", "+", "-", "*", "/", "%", "<", ">",
    "=", "!", "~", "&", "|", "^", "@", "#", ".",
]

_IGNORED_DIRECTIVES = ("default_nettype", "timescale", "resetall", "celldefine", "endcelldefine")

_ID_START = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_ID_CHARS = _ID_START | frozenset("0123456789$")
_DIGITS = frozenset("0123456789")


@dataclass(frozen=True)
class Token:
    kind: str  # 'id', 'keyword', 'number', 'string', 'systask', or the operator text
    text: str
    span: Span

    def __repr__(self) -> str:
        return f"Token({self.kind!r}, {self.text!r}, L{self.span.line})"


class LexError(Exception):
    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def tokenize(text: str) -> list[Token]:
    """Tokenize `text`, raising LexError on the first lexical problem."""
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)

    def span(start: int, end: int, start_line: int, start_col: int) -> Span:
        return Span(start_line, start_col, start, end)

    def err(msg: str, start: int, start_line: int, start_col: int) -> LexError:
        return LexError(
            ParseDiagnostic(
                kind=ParseErrorKind.LEXICAL,
                message=msg,
                span=span(start, min(start + 1, n), start_line, start_col),
            )
        )

    while pos < n:
        ch = text[pos]
        col = pos - line_start + 1

        if ch == "\n":
            line += 1
            pos += 1
            line_start = pos
            continue
        if ch in " \t\r\f":
            pos += 1
            continue

        # Comments.
        if ch == "/" and pos + 1 < n:
            nxt = text[pos + 1]
            if nxt == "/":
                eol = text.find("\n", pos)
                pos = n if eol < 0 else eol
                continue
            if nxt == "*":
                close = text.find("*/", pos + 2)
                if close < 0:
                    raise err("this /* comment is never closed with */", pos, line, col)
                line += text.count("\n", pos, close)
                last_nl = text.rfind("\n", pos, close)
                if last_nl >= 0:
                    line_start = last_nl + 1
                pos = close + 2
                continue

        # Attribute instances (* ... *) are metadata for tools; skip them.
        if ch == "(" and text.startswith("(*", pos):
            close = text.find("*)", pos + 2)
            if close < 0:
                raise err("this (* attribute is never closed with *)", pos, line, col)
            line += text.count("\n", pos, close)
            last_nl = text.rfind("\n", pos, close)
            if last_nl >= 0:
                line_start = last_nl + 1
            pos = close + 2
            continue

        # Compiler directives.
        if ch == "`":
            start = pos
            pos += 1
            name_start = pos
            while pos < n and text[pos] in _ID_CHARS:
                pos += 1
            name = text[name_start:pos]
            if name in _IGNORED_DIRECTIVES:
                eol = text.find("\n", pos)
                pos = n if eol < 0 else eol
                continue
            raise LexError(
                ParseDiagnostic(
                    kind=ParseErrorKind.UNSUPPORTED,
                    message=(
                        f"the compiler directive `{name} is not supported here; "
                        "remove it (only `default_nettype and `timescale are tolerated)"
                    ),
                    span=span(start, pos, line, col),
                )
            )

        # Identifiers / keywords / based-number bases reached via number path.
        if ch in _ID_START:
            start = pos
            while pos < n and text[pos] in _ID_CHARS:
                pos += 1
            word = text[start:pos]
            kind = "keyword" if word in KEYWORDS else "id"
            tokens.append(Token(kind, word, span(start, pos, line, col)))
            continue

        # System tasks/functions: $display, $signed, ...
        if ch == "$":
            start = pos
            pos += 1
            while pos < n and text[pos] in _ID_CHARS:
                pos += 1
            tokens.append(Token("systask", text[start:pos], span(start, pos, line, col)))
            continue

        # Numbers: plain decimal, or [size]'[base]digits. The ' may follow a
        # previously emitted decimal token (size), which the parser stitches
        # back together; emitting one token here keeps spans simple.
        if ch in _DIGITS or ch == "'":
            start = pos
            while pos < n and (text[pos] in _DIGITS or text[pos] == "_"):
                pos += 1
            if pos < n and text[pos] == "'":
                pos += 1
                if pos < n and text[pos] in "sS":
                    raise LexError(
                        ParseDiagnostic(
                            kind=ParseErrorKind.UNSUPPORTED,
                            message="signed number literals ('s...) are not supported; use plain unsigned literals",
                            span=span(start, pos + 1, line, col),
                        )
                    )
                if pos >= n or text[pos] not in "bBoOdDhH":
                    raise err("expected a number base (b, o, d or h) after the ' here", start, line, col)
                pos += 1
                digit_start = pos
                while pos < n and (text[pos] in _ID_CHARS or text[pos] == "?"):
                    pos += 1
                if pos == digit_start:
                    raise err("this number has a base but no digits after it", start, line, col)
            elif pos == start:  # lone apostrophe
                raise err("unexpected ' — number literals look like 8'hFF or 10'd640", start, line, col)
            if pos < n and text[pos] == ".":
                raise LexError(
                    ParseDiagnostic(
                        kind=ParseErrorKind.UNSUPPORTED,
                        message="real (floating point) literals are not supported in synthesizable code",
                        span=span(start, pos + 1, line, col),
                    )
                )
            tokens.append(Token("number", text[start:pos], span(start, pos, line, col)))
            continue

        # Strings (only meaningful as $display arguments).
        if ch == '"':
            start = pos
            pos += 1
            while pos < n and text[pos] != '"':
                if text[pos] == "\n":
                    raise err("this string is never closed before the end of the line", start, line, col)
                if text[pos] == "\\":
                    pos += 1
                pos += 1
            if pos >= n:
                raise err("this string is never closed", start, line, col)
            pos += 1
            tokens.append(Token("string", text[start:pos], span(start, pos, line, col)))
            continue

        # Operators and punctuation.
        for op in OPERATORS:
            if text.startswith(op, pos):
                tokens.append(Token(op, op, span(pos, pos + len(op), line, col)))
                pos += len(op)
                break
        else:
            raise err(f"unexpected character {ch!r}", pos, line, col)

    tokens.append(Token("eof", "", Span(line, pos - line_start + 1, n, n)))
    return tokens
