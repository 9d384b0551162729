"""Effective source-line counting: code lines minus comments and blanks."""

from __future__ import annotations


class UnterminatedComment(Exception):
    def __init__(self, line: int):
        super().__init__(f"a /* comment starting on line {line} is never closed")
        self.line = line


def count_sloc(source) -> int:
    """Count lines carrying at least one character that is neither whitespace
    nor inside a // or /* */ comment.

    Strings are honored so a // inside "..." still counts as code. CRLF and
    LF inputs count identically. Raises UnterminatedComment when a block
    comment runs off the end of the file.
    """
    text = getattr(source, "text", source)
    line_has_code = False
    count = 0
    line_no = 1
    block_start_line = 0
    i = 0
    n = len(text)
    state = "code"  # 'code' | 'block' | 'line' | 'string'

    while i < n:
        ch = text[i]
        if ch == "\n":
            if state == "string":
                state = "code"  # unterminated string: treat the rest as code, not our problem
            if state == "line":
                state = "code"
            if line_has_code:
                count += 1
            line_has_code = False
            line_no += 1
            i += 1
            continue

        if state == "code":
            if ch == "/" and i + 1 < n and text[i + 1] == "/":
                state = "line"
                i += 2
                continue
            if ch == "/" and i + 1 < n and text[i + 1] == "*":
                state = "block"
                block_start_line = line_no
                i += 2
                continue
            if ch == '"':
                state = "string"
                line_has_code = True
                i += 1
                continue
            if ch not in " \t\r\f":
                line_has_code = True
            i += 1
            continue

        if state == "block":
            if ch == "*" and i + 1 < n and text[i + 1] == "/":
                state = "code"
                i += 2
                continue
            i += 1
            continue

        if state == "string":
            if ch == "\\":
                i += 2
                continue
            if ch == '"':
                state = "code"
            i += 1
            continue

        # state == 'line'
        i += 1

    if state == "block":
        raise UnterminatedComment(block_start_line)
    if line_has_code:
        count += 1
    return count
