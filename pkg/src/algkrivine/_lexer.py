from __future__ import annotations

import itertools
import re
from dataclasses import dataclass


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'id', 'sym' or 'eof'
    text: str
    pos: int


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(->|[\\λ.()+*/^<>{},\[\];]))")


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(Token("num", m.group(1), start))
        elif m.group(2):
            tokens.append(Token("id", m.group(2), start))
        else:
            sym = m.group(3)
            tokens.append(Token("sym", "\\" if sym == "λ" else sym, start))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class TokenStream:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def at(self, text: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind == "sym" and tok.text == text

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.kind != "sym" or tok.text != text:
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def expect_id(self) -> str:
        tok = self.next()
        if tok.kind != "id" or tok.text == "c0":
            self.error(f"expected an identifier, found {tok.text or 'end of input'!r}", tok)
        return tok.text

    def expect_eof(self):
        tok = self.peek()
        if tok.kind != "eof":
            self.error(f"unexpected {tok.text!r}", tok)

    def matching_paren(self, k: int = 0) -> int:
        """Offset of the ')' closing the '(' at offset ``k``, or -1."""
        depth = 0
        j = k
        while True:
            tok = self.peek(j)
            if tok.kind == "eof":
                return -1
            if tok.kind == "sym" and tok.text == "(":
                depth += 1
            elif tok.kind == "sym" and tok.text == ")":
                depth -= 1
                if depth == 0:
                    return j
            j += 1

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.pos, self.text)


_fresh_counter = itertools.count(1)


def fresh_name(base: str, avoid=frozenset()) -> str:
    """A variable name not in ``avoid``, derived from ``base``."""
    stem = base.split("_")[0] or "v"
    while True:
        name = f"{stem}_{next(_fresh_counter)}"
        if name not in avoid:
            return name
