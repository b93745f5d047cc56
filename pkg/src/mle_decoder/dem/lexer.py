"""
Tokenizer for the DEM text format.
"""

import re
from dataclasses import dataclass
from enum import Enum
from typing import List

from mle_decoder.exceptions import DemSyntaxError


class TokenType(str, Enum):
    WORD = "word"
    NUMBER = "number"
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","
    CARET = "^"
    LBRACE = "{"
    RBRACE = "}"
    NEWLINE = "newline"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    type: TokenType
    text: str
    line: int
    column: int


_TOKEN_PATTERN = re.compile(
    r"""
    (?P<COMMENT>\#[^\n]*)
  | (?P<NEWLINE>\n)
  | (?P<SKIP>[ \t\r\f\v]+)
  | (?P<NUMBER>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<WORD>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<LPAREN>\()
  | (?P<RPAREN>\))
  | (?P<COMMA>,)
  | (?P<CARET>\^)
  | (?P<LBRACE>\{)
  | (?P<RBRACE>\})
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> List[Token]:
    """
    Split DEM text into tokens, dropping whitespace and comments.

    Raises:
        DemSyntaxError: On a character that starts no token.
    """
    tokens: List[Token] = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        match = _TOKEN_PATTERN.match(text, pos)
        column = pos - line_start + 1
        if match is None:
            raise DemSyntaxError(f"Unexpected character {text[pos]!r}", line, column)
        kind = match.lastgroup
        if kind == "NEWLINE":
            tokens.append(Token(TokenType.NEWLINE, "\n", line, column))
            line += 1
            line_start = match.end()
        elif kind not in ("SKIP", "COMMENT"):
            tokens.append(Token(TokenType[kind], match.group(), line, column))
        pos = match.end()
    tokens.append(Token(TokenType.EOF, "", line, pos - line_start + 1))
    return tokens
