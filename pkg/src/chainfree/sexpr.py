"""A small s-expression reader for SMT-LIB text."""
from __future__ import annotations

from dataclasses import dataclass


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Str:
    """A string literal, kept apart from symbols."""
    value: str


def parse(text: str) -> list:
    """Parse all top-level s-expressions.

    Lists become Python lists, string literals become :class:`Str`, numerals
    become ``int`` and everything else is a ``str`` symbol.
    """
    pos = 0
    line, col = 1, 1
    n = len(text)

    def advance(k=1):
        nonlocal pos, line, col
        for _ in range(k):
            if text[pos] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            pos += 1

    def skip():
        while pos < n:
            c = text[pos]
            if c.isspace():
                advance()
            elif c == ";":
                while pos < n and text[pos] != "\n":
                    advance()
            else:
                break

    def expr():
        skip()
        if pos >= n:
            raise ParseError("unexpected end of input", line, col)
        c = text[pos]
        if c == "(":
            start = (line, col)
            advance()
            items = []
            while True:
                skip()
                if pos >= n:
                    raise ParseError("unclosed '('", *start)
                if text[pos] == ")":
                    advance()
                    return items
                items.append(expr())
        if c == ")":
            raise ParseError("unexpected ')'", line, col)
        if c == '"':
            start = (line, col)
            advance()
            chars = []
            while True:
                if pos >= n:
                    raise ParseError("unterminated string literal", *start)
                if text[pos] == '"':
                    if pos + 1 < n and text[pos + 1] == '"':
                        chars.append('"')
                        advance(2)
                        continue
                    advance()
                    return Str(_unescape("".join(chars)))
                chars.append(text[pos])
                advance()
        if c == "|":
            start = (line, col)
            advance()
            chars = []
            while pos < n and text[pos] != "|":
                chars.append(text[pos])
                advance()
            if pos >= n:
                raise ParseError("unterminated quoted symbol", *start)
            advance()
            return "".join(chars)
        chars = []
        while pos < n and not text[pos].isspace() and text[pos] not in '()";':
            chars.append(text[pos])
            advance()
        tok = "".join(chars)
        if tok.isdigit():
            return int(tok)
        return tok

    out = []
    while True:
        skip()
        if pos >= n:
            return out
        out.append(expr())


def _unescape(s: str) -> str:
    """Resolve the ``\\u{..}`` and ``\\ud..d`` escapes of SMT-LIB string literals."""
    out = []
    i = 0
    while i < len(s):
        if s.startswith("\\u{", i):
            j = s.find("}", i)
            if j != -1:
                out.append(chr(int(s[i + 3:j], 16)))
                i = j + 1
                continue
        if s.startswith("\\u", i) and i + 6 <= len(s) and all(c in "0123456789abcdefABCDEF" for c in s[i + 2:i + 6]):
            out.append(chr(int(s[i + 2:i + 6], 16)))
            i += 6
            continue
        out.append(s[i])
        i += 1
    return "".join(out)


def dump(e) -> str:
    if isinstance(e, list):
        return "(" + " ".join(dump(x) for x in e) + ")"
    if isinstance(e, Str):
        return '"' + e.value.replace('"', '""') + '"'
    if isinstance(e, int) and e < 0:
        return f"(- {-e})"
    return str(e)
