"""Tokenizer for the controlled-English proof language.

Unicode math operators are first-class symbol tokens; multi-character ASCII
operators (`||`, `|-|`) lex under maximal munch. The lexer is notation
agnostic: `-` in `a-b-c` is the plain hyphen token, and deciding whether a
hyphen run is a betweenness or equidistance application happens later during
notation matching.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from .errors import InvalidCharacter, Loc

WORD = "word"
SYMBOL = "symbol"
PERIOD = "period"
COLON = "colon"
COMMA = "comma"
UNICODE_OP = "unicode-op"

# Maximal munch: longer operators first.
_ASCII_OPS = ("|-|", "||", "|", "-", "=", "(", ")")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int = field(compare=False, default=1)
    column: int = field(compare=False, default=1)

    @property
    def loc(self) -> Loc:
        return Loc(self.line, self.column)

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.column})"


def _is_math_symbol(ch: str) -> bool:
    return unicodedata.category(ch) in ("Sm", "So")


def tokenize(source: str) -> list[Token]:
    """Tokenize UTF-8 text; raises InvalidCharacter on unrecognized codepoints."""
    if source.startswith("﻿"):
        source = source[1:]
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch.isalpha() and ch.isascii():
            start = i
            while i < n and (source[i].isascii() and (source[i].isalnum() or source[i] in "_'")):
                i += 1
            text = source[start:i]
            tokens.append(Token(WORD, text, line, col))
            col += i - start
            continue
        if ch == ".":
            tokens.append(Token(PERIOD, ".", line, col))
            i += 1
            col += 1
            continue
        if ch == ":":
            tokens.append(Token(COLON, ":", line, col))
            i += 1
            col += 1
            continue
        if ch == ",":
            tokens.append(Token(COMMA, ",", line, col))
            i += 1
            col += 1
            continue
        matched = False
        for op in _ASCII_OPS:
            if source.startswith(op, i):
                tokens.append(Token(SYMBOL, op, line, col))
                i += len(op)
                col += len(op)
                matched = True
                break
        if matched:
            continue
        if _is_math_symbol(ch):
            tokens.append(Token(UNICODE_OP, ch, line, col))
            i += 1
            col += 1
            continue
        raise InvalidCharacter(f"invalid character {ch!r}", Loc(line, col))
    return tokens
