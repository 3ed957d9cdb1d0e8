"""Tokenizer for modification programs.

Vectors `(x, y, z)` and HEX colors are single tokens; newlines terminate
statements and are emitted as tokens; `;` starts a comment running to end
of line.  Strings accept single or double quotes with \\" \\' \\\\ \\n \\t
escapes; the canonical form (see formatter) is double-quoted.
"""

from __future__ import annotations

import re

from ..types import ColorRGBA, Vec3
from .syntax import LexError, Token

_NUMBER_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_WORD_RE = re.compile(r"[A-Za-z][A-Za-z0-9-]*")
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "'": "'", "\\": "\\"}


def lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    line = 1
    line_start = 0
    i = 0
    n = len(text)

    def col(pos: int) -> int:
        return pos - line_start + 1

    while i < n:
        ch = text[i]
        if ch == "\n":
            tokens.append(Token("newline", "\n", line, col(i)))
            line += 1
            i += 1
            line_start = i
            continue
        if ch in " \t\r":
            i += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col(i)
        if ch in "\"'":
            quote = ch
            i += 1
            parts: list[str] = []
            while True:
                if i >= n or text[i] == "\n":
                    raise LexError(line, start_col, "unterminated string")
                c = text[i]
                if c == "\\":
                    if i + 1 >= n:
                        raise LexError(line, start_col, "unterminated string")
                    esc = text[i + 1]
                    parts.append(_ESCAPES.get(esc, esc))
                    i += 2
                elif c == quote:
                    i += 1
                    break
                else:
                    parts.append(c)
                    i += 1
            tokens.append(Token("string", "".join(parts), line, start_col))
            continue
        if ch == "#":
            j = i + 1
            while j < n and text[j] in "0123456789abcdefABCDEF":
                j += 1
            digits = j - i - 1
            if digits != 6:
                raise LexError(line, start_col, f"HEX color needs 6 digits, got {digits}")
            tokens.append(Token("color", ColorRGBA.from_hex(text[i:j]), line, start_col))
            i = j
            continue
        if ch == "(":
            close = text.find(")", i)
            newline = text.find("\n", i)
            if close == -1 or (newline != -1 and newline < close):
                raise LexError(line, start_col, "unterminated vector")
            body = text[i + 1 : close]
            parts = body.split(",")
            if len(parts) != 3:
                raise LexError(line, start_col, f"vector needs 3 components, got {len(parts)}")
            comps = []
            for part in parts:
                cleaned = part.strip()
                if not _NUMBER_RE.fullmatch(cleaned):
                    raise LexError(line, start_col, f"bad vector component {cleaned!r}")
                comps.append(float(cleaned))
            tokens.append(Token("vector", Vec3(*comps), line, start_col))
            i = close + 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(Token("number", float(m.group(0)), line, start_col))
            i = m.end()
            continue
        m = _WORD_RE.match(text, i)
        if m:
            tokens.append(Token("word", m.group(0), line, start_col))
            i = m.end()
            continue
        raise LexError(line, start_col, f"unexpected character {ch!r}")
    return tokens
