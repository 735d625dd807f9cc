"""Tokenizer for COP source text."""

from __future__ import annotations

from dataclasses import dataclass

from copri.errors import LexError

BUILTIN_TYPES = frozenset(
    ["double", "int", "boolean", "String", "char", "Object", "Map", "void"]
)

KEYWORDS = frozenset(
    [
        "concept", "reference", "object", "in", "super", "sub", "this", "new",
        "continue", "create", "delete", "if", "else", "while", "return",
        "null", "true", "false", "static",
    ]
) | BUILTIN_TYPES

# longest first so that "==" wins over "="
PUNCTUATION = (
    "...", "==", "!=", "<=", ">=", "&&", "||",
    "{", "}", "(", ")", "[", "]", ";", ",", ".", ":",
    "=", "<", ">", "+", "-", "*", "/", "!",
)

KEYWORD = "keyword"
IDENTIFIER = "identifier"
LITERAL = "literal"
PUNCT = "punctuation"
EOF = "eof"

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\", "'": "'", "0": "\0"}


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    line: int
    column: int
    value: object = None

    def is_(self, lexeme: str) -> bool:
        return self.kind in (KEYWORD, PUNCT) and self.lexeme == lexeme

    def describe(self) -> str:
        if self.kind == EOF:
            return "end of input"
        return repr(self.lexeme)


def tokenize(source: str) -> list[Token]:
    """Split *source* into tokens, ending with an end-of-input marker.

    ``//`` comments and whitespace are dropped.  Literal tokens carry their
    decoded value: ``int`` for integer literals, ``float`` for literals with a
    fractional part, ``str`` for string literals.
    """
    tokens: list[Token] = []
    i, n = 0, len(source)
    line, col = 1, 1

    def advance(count: int) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n\f﻿":
            advance(1)
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                advance(1)
            continue
        start_line, start_col, start = line, col, i
        if ch.isalpha() or ch == "_":
            while i < n and (source[i].isalnum() or source[i] == "_"):
                advance(1)
            word = source[start:i]
            kind = KEYWORD if word in KEYWORDS else IDENTIFIER
            tokens.append(Token(kind, word, start_line, start_col))
            continue
        if ch.isdigit():
            while i < n and source[i].isdigit():
                advance(1)
            is_float = False
            if i + 1 < n and source[i] == "." and source[i + 1].isdigit():
                is_float = True
                advance(1)
                while i < n and source[i].isdigit():
                    advance(1)
            text = source[start:i]
            value = float(text) if is_float else int(text)
            tokens.append(Token(LITERAL, text, start_line, start_col, value))
            continue
        if ch == '"' or ch == "'":
            quote = ch
            advance(1)
            chars = []
            while True:
                if i >= n or source[i] == "\n":
                    raise LexError("unterminated string literal", start_line, start_col)
                c = source[i]
                if c == quote:
                    advance(1)
                    break
                if c == "\\":
                    if i + 1 >= n or source[i + 1] not in _ESCAPES:
                        raise LexError("invalid escape sequence", line, col)
                    chars.append(_ESCAPES[source[i + 1]])
                    advance(2)
                    continue
                chars.append(c)
                advance(1)
            tokens.append(
                Token(LITERAL, source[start:i], start_line, start_col, "".join(chars))
            )
            continue
        for punct in PUNCTUATION:
            if source.startswith(punct, i):
                advance(len(punct))
                tokens.append(Token(PUNCT, punct, start_line, start_col))
                break
        else:
            raise LexError(f"illegal character {ch!r}", start_line, start_col)

    tokens.append(Token(EOF, "", line, col))
    return tokens
