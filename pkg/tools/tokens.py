from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, List, Optional, Sequence

from state.span import Span


class TokenKind(Enum):
    IDENTIFIER = "IDENTIFIER"
    INT_LITERAL = "INT_LITERAL"
    CHAR_LITERAL = "CHAR_LITERAL"
    STRING_LITERAL = "STRING_LITERAL"
    PUNCTUATOR = "PUNCTUATOR"
    KEYWORD = "KEYWORD"
    HASH_DIRECTIVE = "HASH_DIRECTIVE"
    COMMENT = "COMMENT"
    WHITESPACE = "WHITESPACE"
    INVALID = "INVALID"
    EOF = "EOF"


TRIVIA_KINDS = frozenset({TokenKind.COMMENT, TokenKind.WHITESPACE})

# C keyword set, nothing added: `length` and the preprocessor predicates stay identifiers.
KEYWORDS = frozenset({
    "auto", "break", "case", "char", "const", "continue", "default", "do",
    "double", "else", "enum", "extern", "float", "for", "goto", "if",
    "inline", "int", "long", "register", "restrict", "return", "short",
    "signed", "sizeof", "static", "struct", "switch", "typedef", "union",
    "unsigned", "void", "volatile", "while", "_Alignas", "_Alignof",
    "_Atomic", "_Bool", "_Complex", "_Generic", "_Imaginary", "_Noreturn",
    "_Static_assert", "_Thread_local",
})

# Longest first so a prefix scan implements maximal munch.
PUNCTUATORS = sorted([
    "...", "<<=", ">>=",
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "*=", "/=", "%=", "+=", "-=", "&=", "^=", "|=", "##",
    "[", "]", "(", ")", "{", "}", ".", "&", "*", "+", "-", "~", "!",
    "/", "%", "<", ">", "^", "|", "?", ":", ";", "=", ",", "#",
], key=len, reverse=True)

PUNCT_CHARS = frozenset("".join(PUNCTUATORS))


@dataclass(frozen=True)
class Token:
    """
    One lexeme with its kind and span.

    `value` carries the payload: identifier name, integer value, char byte,
    decoded string bytes, punctuator symbol, keyword, directive name, or the
    comment flavour ("block" / "line"). Whitespace tokens carry "newline",
    "splice" or "space".
    """
    kind: TokenKind
    lexeme: bytes
    span: Span
    value: Any = None
    base: Optional[int] = None

    @property
    def text(self) -> str:
        return self.lexeme.decode("utf-8", "surrogateescape")

    @property
    def is_trivia(self) -> bool:
        return self.kind in TRIVIA_KINDS

    @property
    def is_newline(self) -> bool:
        return self.kind == TokenKind.WHITESPACE and self.value == "newline"

    def is_punct(self, symbol: str) -> bool:
        return self.kind == TokenKind.PUNCTUATOR and self.value == symbol

    def is_keyword(self, word: str) -> bool:
        return self.kind == TokenKind.KEYWORD and self.value == word

    def is_ident(self, name: Optional[str] = None) -> bool:
        return self.kind == TokenKind.IDENTIFIER and (name is None or self.value == name)

    def at(self, span: Span) -> "Token":
        """Copy relocated to another span (macro expansion sites)."""
        return replace(self, span=span)


class TokenCursor:
    """Read cursor over a token list that skips trivia."""

    def __init__(self, tokens: Sequence[Token]):
        self.tokens = [t for t in tokens if not t.is_trivia]
        if not self.tokens or self.tokens[-1].kind != TokenKind.EOF:
            last = self.tokens[-1].span if self.tokens else Span.unknown()
            eof_span = Span(last.file_id, last.byte_end, last.byte_end, last.line, last.column)
            self.tokens.append(Token(TokenKind.EOF, b"", eof_span))
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        index = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def advance(self) -> Token:
        token = self.peek()
        if token.kind != TokenKind.EOF:
            self.pos += 1
        return token

    def previous(self) -> Token:
        return self.tokens[max(self.pos - 1, 0)]

    def at_end(self) -> bool:
        return self.peek().kind == TokenKind.EOF

    def check_punct(self, symbol: str, offset: int = 0) -> bool:
        return self.peek(offset).is_punct(symbol)

    def check_keyword(self, word: str, offset: int = 0) -> bool:
        return self.peek(offset).is_keyword(word)

    def match_punct(self, symbol: str) -> Optional[Token]:
        if self.check_punct(symbol):
            return self.advance()
        return None

    def match_keyword(self, word: str) -> Optional[Token]:
        if self.check_keyword(word):
            return self.advance()
        return None


def significant(tokens: Sequence[Token]) -> List[Token]:
    return [t for t in tokens if not t.is_trivia and t.kind != TokenKind.EOF]
