"""Tokenizer shared by the Turtle and query parsers."""
from __future__ import annotations

import re
from dataclasses import dataclass


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    value: str
    line: int
    column: int


_PN_CHARS = r"[A-Za-z0-9_\-·À-￿]"
_PREFIX = rf"(?:[A-Za-zÀ-￿](?:(?:{_PN_CHARS}|\.)*{_PN_CHARS})?)?"
_LOCAL = rf"(?:(?:{_PN_CHARS}|:|%[0-9A-Fa-f]{{2}})(?:(?:{_PN_CHARS}|[.:]|%[0-9A-Fa-f]{{2}})*(?:{_PN_CHARS}|:|%[0-9A-Fa-f]{{2}}))?)?"

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\n]*"),
    ("IRI", r"<[^<>\"{}|^`\\\x00-\x20]*>"),
    ("STRING", r'"(?:[^"\\\n\r]|\\.)*"' + r"|'(?:[^'\\\n\r]|\\.)*'"),
    ("BNODE", rf"_:{_PN_CHARS}(?:(?:{_PN_CHARS}|\.)*{_PN_CHARS})?"),
    ("VAR", r"[?$][A-Za-z0-9_·À-￿]+"),
    ("LANG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("NUMBER", r"[+-]?(?:\d*\.\d+|\d+)"),
    ("PNAME", rf"{_PREFIX}:{_LOCAL}"),
    ("DTYPE", r"\^\^"),
    ("WORD", r"[A-Za-z][A-Za-z0-9_]*"),
    ("PUNCT", r"[.;,\[\]{}()|*]"),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_SPEC))

_STRING_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def tokenize(text: str, *, allow_vars: bool = False) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    end = len(text)
    while pos < end:
        match = _MASTER.match(text, pos)
        column = pos - line_start + 1
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column)
        kind = match.lastgroup
        value = match.group()
        if kind == "VAR" and not allow_vars:
            raise ParseError(f"unexpected variable {value}", line, column)
        if kind == "NUMBER" and match.end() < end and text[match.end()] in "eE":
            raise ParseError("numeric exponents are not supported", line, column)
        if kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, value, line, column))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = match.end()
    return tokens


def unescape_string(token: Token) -> str:
    body = token.value[1:-1]
    if "\\" not in body:
        return body
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1]
        if nxt in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[nxt])
            i += 2
        elif nxt in "uU":
            width = 4 if nxt == "u" else 8
            digits = body[i + 2:i + 2 + width]
            if len(digits) != width or not all(c in "0123456789abcdefABCDEF" for c in digits):
                raise ParseError("bad unicode escape", token.line, token.column + i + 1)
            out.append(chr(int(digits, 16)))
            i += 2 + width
        else:
            raise ParseError(f"bad escape \\{nxt}", token.line, token.column + i + 1)
    return "".join(out)


class TokenStream:
    def __init__(self, tokens: list[Token], text: str):
        self.tokens = tokens
        self.pos = 0
        lines = text.split("\n")
        self._eof = Token("EOF", "", len(lines), len(lines[-1]) + 1)

    def peek(self, offset: int = 0) -> Token:
        index = self.pos + offset
        return self.tokens[index] if index < len(self.tokens) else self._eof

    def next(self) -> Token:
        token = self.peek()
        if token.kind != "EOF":
            self.pos += 1
        return token

    def at(self, kind: str, value: str | None = None) -> bool:
        token = self.peek()
        return token.kind == kind and (value is None or token.value == value)

    def at_keyword(self, word: str) -> bool:
        token = self.peek()
        return token.kind == "WORD" and token.value.upper() == word

    def accept(self, kind: str, value: str | None = None) -> Token | None:
        if self.at(kind, value):
            return self.next()
        return None

    def expect(self, kind: str, value: str | None = None) -> Token:
        token = self.peek()
        if token.kind != kind or (value is not None and token.value != value):
            wanted = value or kind
            got = token.value or token.kind
            raise ParseError(f"expected {wanted!r}, found {got!r}", token.line, token.column)
        return self.next()

    def error(self, message: str, token: Token | None = None) -> ParseError:
        token = token or self.peek()
        return ParseError(message, token.line, token.column)
