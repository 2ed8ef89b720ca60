import logging
from typing import Any, Dict, List, Optional, Tuple

import regex

from state.diagnostics import Diagnostic, DiagnosticCode, Severity
from state.span import Span
from state.state import LexConfig
from .base_tool import BaseTool, ToolResult
from .tokens import KEYWORDS, PUNCT_CHARS, PUNCTUATORS, Token, TokenKind

logger = logging.getLogger(__name__)

IDENT_RE = regex.compile(r"[\p{XID_Start}_]\p{XID_Continue}*")
NUMBER_BODY_RE = regex.compile(r"[0-9A-Za-z_]*")
INT_SUFFIX_RE = regex.compile(r"(?:[uU](?:ll|LL|[lL])?|(?:ll|LL|[lL])[uU]?)$")
RAW_BYTE_MIN, RAW_BYTE_MAX = 0xDC80, 0xDCFF
HSPACE = " \t\f\v"

SIMPLE_ESCAPES = {
    "n": 10, "t": 9, "r": 13, "a": 7, "b": 8, "f": 12, "v": 11,
    "\\": 92, '"': 34, "'": 39, "?": 63,
}
DIGITS = {2: "01", 8: "01234567", 10: "0123456789", 16: "0123456789abcdefABCDEF"}
MAX_U64 = (1 << 64) - 1


def is_raw_byte(ch: str) -> bool:
    """True for a surrogate standing in for an undecodable byte."""
    return RAW_BYTE_MIN <= ord(ch) <= RAW_BYTE_MAX


def check_punct_ambiguity(run: str, span: Span, severity: str = "error") -> Optional[Diagnostic]:
    """A run of three or more `+` or `-` has no single obvious reading."""
    if len(run) < 3 or run[0] not in "+-" or run.count(run[0]) != len(run):
        return None
    return Diagnostic(
        code=DiagnosticCode.E_AMBIGUOUS_PUNCT,
        severity=Severity.WARNING if severity == "warning" else Severity.ERROR,
        span=span,
        message=f"ambiguous operator sequence '{run}'; separate the operators with a space",
    )


class Lexer:
    """
    Lossless scanner: every byte of the input lands in exactly one token.

    The source is decoded with `surrogateescape`, so invalid UTF-8 bytes
    survive as lone surrogates and re-encode to the original bytes.
    """

    def __init__(self, source: bytes, file_id: str = "<input>", config: Optional[LexConfig] = None):
        self.text = source.decode("utf-8", "surrogateescape")
        self.file_id = file_id
        self.config = config or LexConfig()
        self.pos = 0
        self.byte_pos = 0
        self.line = 1
        self.line_start = 0
        self.line_has_code = False
        self.tokens: List[Token] = []
        self.diagnostics: List[Diagnostic] = []
        # anchor of the token being scanned
        self.tok_start = 0
        self.tok_byte = 0
        self.tok_line = 1
        self.tok_col = 1

    # -- position bookkeeping -------------------------------------------------

    def _begin(self) -> None:
        self.tok_start = self.pos
        self.tok_byte = self.byte_pos
        self.tok_line = self.line
        self.tok_col = self.pos - self.line_start + 1

    def _locate(self, index: int) -> Tuple[int, int, int]:
        """Byte offset, line and column of a char index inside the current token."""
        seg = self.text[self.tok_start:index]
        byte = self.tok_byte + len(seg.encode("utf-8", "surrogateescape"))
        newlines = seg.count("\n")
        if newlines:
            line = self.tok_line + newlines
            column = index - (self.tok_start + seg.rfind("\n") + 1) + 1
        else:
            line, column = self.tok_line, self.tok_col + (index - self.tok_start)
        return byte, line, column

    def _span(self, start: int, end: int) -> Span:
        byte_start, line, column = self._locate(start)
        byte_end, _, _ = self._locate(end)
        return Span(self.file_id, byte_start, byte_end, line, column)

    def _emit(self, kind: TokenKind, value: Any = None, base: Optional[int] = None) -> Token:
        lexeme = self.text[self.tok_start:self.pos].encode("utf-8", "surrogateescape")
        span = Span(self.file_id, self.tok_byte, self.tok_byte + len(lexeme), self.tok_line, self.tok_col)
        token = Token(kind, lexeme, span, value, base)
        self.tokens.append(token)
        self.byte_pos = span.byte_end
        newlines = self.text.count("\n", self.tok_start, self.pos)
        if newlines:
            self.line += newlines
            self.line_start = self.text.rfind("\n", self.tok_start, self.pos) + 1
        if kind not in (TokenKind.WHITESPACE, TokenKind.COMMENT):
            self.line_has_code = True
        return token

    def _diag(self, code: DiagnosticCode, span: Span, message: str, severity: Severity = Severity.ERROR) -> None:
        self.diagnostics.append(Diagnostic(code=code, severity=severity, span=span, message=message))

    def _char(self, offset: int = 0) -> str:
        index = self.pos + offset
        return self.text[index] if index < len(self.text) else ""

    # -- driver ---------------------------------------------------------------

    def run(self) -> Tuple[List[Token], List[Diagnostic]]:
        text = self.text
        while self.pos < len(text):
            self._begin()
            c = text[self.pos]
            nxt = self._char(1)
            if c == "\n" or (c == "\r" and nxt == "\n"):
                self.pos += 1 if c == "\n" else 2
                self._emit(TokenKind.WHITESPACE, "newline")
                self.line_has_code = False
            elif c in HSPACE or c == "\r":
                while self.pos < len(text) and (text[self.pos] in HSPACE or
                                                 (text[self.pos] == "\r" and self._char(1) != "\n")):
                    self.pos += 1
                self._emit(TokenKind.WHITESPACE, "space")
            elif c == "\\" and (nxt == "\n" or (nxt == "\r" and self._char(2) == "\n")):
                self.pos += 2 if nxt == "\n" else 3
                self._emit(TokenKind.WHITESPACE, "splice")
            elif c == "/" and nxt == "*":
                self.scan_block_comment()
            elif c == "/" and nxt == "/":
                self.scan_line_comment()
            elif c == "#" and not self.line_has_code:
                self._scan_directive()
            elif "0" <= c <= "9":
                self.scan_number()
            elif c == '"':
                self.scan_string()
            elif c == "'":
                self._scan_char()
            elif c in PUNCT_CHARS:
                self._scan_punct()
            else:
                match = IDENT_RE.match(text, self.pos)
                if match:
                    self.pos = match.end()
                    name = match.group()
                    if name in KEYWORDS:
                        self._emit(TokenKind.KEYWORD, name)
                    else:
                        self._emit(TokenKind.IDENTIFIER, name)
                elif is_raw_byte(c):
                    while self.pos < len(text) and is_raw_byte(text[self.pos]):
                        self.pos += 1
                    token = self._emit(TokenKind.INVALID)
                    self._diag(DiagnosticCode.E_BAD_ENCODING, token.span, "invalid UTF-8 byte sequence")
                else:
                    self.pos += 1
                    token = self._emit(TokenKind.INVALID)
                    self._diag(DiagnosticCode.E_STRAY_CHAR, token.span,
                               f"stray character {c!r} in program")
        self._begin()
        self._emit(TokenKind.EOF)
        logger.debug(f"Lexed {len(self.tokens)} tokens from {self.file_id}")
        return self.tokens, self.diagnostics

    # -- comments -------------------------------------------------------------

    def scan_block_comment(self) -> Token:
        """Consume up to the first `*/`, blind to quotes and nested `/*`."""
        end = self.text.find("*/", self.pos + 2)
        if end < 0:
            self.pos = len(self.text)
            token = self._emit(TokenKind.COMMENT, "block")
            self._diag(DiagnosticCode.E_UNTERMINATED_BLOCK_COMMENT, token.span,
                       "block comment reaches end of file without '*/'")
        else:
            self.pos = end + 2
            token = self._emit(TokenKind.COMMENT, "block")
        self._check_encoding(token)
        return token

    def scan_line_comment(self) -> Token:
        """Consume to end of line; a trailing backslash does not continue the comment."""
        end = self.text.find("\n", self.pos)
        if end < 0:
            end = len(self.text)
        elif end > self.pos and self.text[end - 1] == "\r":
            end -= 1
        self.pos = end
        token = self._emit(TokenKind.COMMENT, "line")
        self._check_encoding(token)
        return token

    def _check_encoding(self, token: Token) -> None:
        if any(is_raw_byte(ch) for ch in token.text):
            self._diag(DiagnosticCode.E_BAD_ENCODING, token.span, "invalid UTF-8 inside comment")

    # -- directives -----------------------------------------------------------

    def _scan_directive(self) -> Token:
        index = self.pos + 1
        while index < len(self.text) and self.text[index] in HSPACE:
            index += 1
        match = IDENT_RE.match(self.text, index)
        if match:
            self.pos = match.end()
            return self._emit(TokenKind.HASH_DIRECTIVE, match.group())
        self.pos += 1
        return self._emit(TokenKind.HASH_DIRECTIVE, "")

    # -- literals -------------------------------------------------------------

    def scan_number(self) -> Token:
        text = self.text
        start = self.pos
        prefix = ""
        base = 10
        if text[start] == "0" and self._char(1) in ("b", "B"):
            base, prefix = 2, text[start:start + 2]
        elif text[start] == "0" and self._char(1) in ("x", "X"):
            base, prefix = 16, text[start:start + 2]
        elif text[start] == "0" and (self._char(1).isdigit() or self._char(1) == "_"):
            base, prefix = 8, "0"
        body_start = start + len(prefix)
        self.pos = NUMBER_BODY_RE.match(text, body_start).end()
        body = text[body_start:self.pos]

        suffix = INT_SUFFIX_RE.search(body)
        digits = body[:suffix.start()] if suffix else body
        problem = self._check_digits(digits, base)
        value = 0
        if problem is None:
            value = int(digits.replace("_", ""), base)
            if value > MAX_U64:
                problem = "integer literal does not fit in 64 bits"
                value = 0
        token = self._emit(TokenKind.INT_LITERAL, value, base)
        if problem is not None:
            self._diag(DiagnosticCode.E_BAD_LITERAL, token.span, problem)
        return token

    @staticmethod
    def _check_digits(digits: str, base: int) -> Optional[str]:
        if not digits or digits.replace("_", "") == "":
            return "integer literal has no digits"
        if digits.startswith("_") or digits.endswith("_") or "__" in digits:
            return "misplaced '_' in integer literal"
        allowed = DIGITS[base]
        for ch in digits:
            if ch != "_" and ch not in allowed:
                return f"digit '{ch}' is not valid in base {base}"
        return None

    def _scan_quoted(self, quote: str) -> Tuple[bytearray, bool]:
        """Decode a quoted literal body; returns (bytes, terminated)."""
        text = self.text
        decoded = bytearray()
        index = self.pos + 1
        while True:
            if index >= len(text):
                self.pos = index
                return decoded, False
            c = text[index]
            if c == quote:
                self.pos = index + 1
                return decoded, True
            if c == "\n":
                self.pos = index
                return decoded, False
            if c != "\\":
                decoded += c.encode("utf-8", "surrogateescape")
                index += 1
                continue
            nxt = text[index + 1] if index + 1 < len(text) else ""
            if nxt == "\n":
                index += 2
            elif nxt == "\r" and text[index + 2:index + 3] == "\n":
                index += 3
            elif nxt == "":
                index += 1
            else:
                index = self._decode_escape(index, decoded)

    def _decode_escape(self, index: int, out: bytearray) -> int:
        text = self.text
        esc = text[index + 1]
        if esc in SIMPLE_ESCAPES:
            out.append(SIMPLE_ESCAPES[esc])
            return index + 2
        if esc == "x":
            end = index + 2
            while end < len(text) and end < index + 4 and text[end] in DIGITS[16]:
                end += 1
            if end == index + 2:
                self._diag(DiagnosticCode.E_BAD_ESCAPE, self._span(index, end), "'\\x' needs hex digits")
                return end
            out.append(int(text[index + 2:end], 16))
            return end
        if esc in DIGITS[8]:
            end = index + 1
            while end < len(text) and end < index + 4 and text[end] in DIGITS[8]:
                end += 1
            value = int(text[index + 1:end], 8)
            if value > 0xFF:
                self._diag(DiagnosticCode.E_BAD_ESCAPE, self._span(index, end), "octal escape out of range")
            out.append(value & 0xFF)
            return end
        self._diag(DiagnosticCode.E_BAD_ESCAPE, self._span(index, index + 2),
                   f"unknown escape sequence '\\{esc}'")
        out += esc.encode("utf-8", "surrogateescape")
        return index + 2

    def scan_string(self) -> Token:
        """String literal; the decoded bytes may contain zero bytes."""
        decoded, terminated = self._scan_quoted('"')
        token = self._emit(TokenKind.STRING_LITERAL, bytes(decoded))
        if not terminated:
            self._diag(DiagnosticCode.E_UNTERMINATED_STRING, token.span, "missing closing '\"'")
        return token

    def _scan_char(self) -> Token:
        decoded, terminated = self._scan_quoted("'")
        token = self._emit(TokenKind.CHAR_LITERAL, decoded[0] if len(decoded) == 1 else 0)
        if not terminated:
            self._diag(DiagnosticCode.E_UNTERMINATED_STRING, token.span, "missing closing \"'\"")
        elif len(decoded) != 1:
            self._diag(DiagnosticCode.E_BAD_LITERAL, token.span,
                       "character literal must hold exactly one byte")
        return token

    # -- punctuators ----------------------------------------------------------

    def _scan_punct(self) -> Token:
        text = self.text
        c = text[self.pos]
        if c in "+-" and (self.pos == 0 or text[self.pos - 1] != c):
            end = self.pos
            while end < len(text) and text[end] == c:
                end += 1
            found = check_punct_ambiguity(text[self.pos:end], self._span(self.pos, end),
                                          self.config.ambiguous_severity)
            if found is not None:
                self.diagnostics.append(found)
        for symbol in PUNCTUATORS:
            if text.startswith(symbol, self.pos):
                self.pos += len(symbol)
                return self._emit(TokenKind.PUNCTUATOR, symbol)
        self.pos += 1
        return self._emit(TokenKind.PUNCTUATOR, c)


def lex(source: bytes, config: Optional[LexConfig] = None, file_id: str = "<input>") -> Tuple[List[Token], List[Diagnostic]]:
    """Tokenize raw bytes; the result always ends with an EOF token."""
    return Lexer(source, file_id, config).run()


def relex(data: bytes, span: Span) -> List[Token]:
    """Lex synthesized text and relocate its non-trivia tokens to `span`."""
    tokens, _ = Lexer(data, span.file_id).run()
    return [t.at(span) for t in tokens if not t.is_trivia and t.kind != TokenKind.EOF]


def escape_lexeme(lexeme: bytes) -> str:
    out = []
    for ch in lexeme.decode("utf-8", "surrogateescape"):
        code = ord(ch)
        if ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif RAW_BYTE_MIN <= code <= RAW_BYTE_MAX:
            out.append(f"\\x{code - 0xDC00:02x}")
        elif code < 0x20 or code == 0x7F:
            out.append(f"\\x{code:02x}")
        else:
            out.append(ch)
    return "".join(out)


def format_token_dump(tokens: List[Token]) -> str:
    """One token per line: KIND, span, escaped lexeme."""
    lines = []
    for token in tokens:
        span = token.span
        lines.append(f"{token.kind.value}\t{span.line}:{span.column}@{span.byte_start}-{span.byte_end}"
                     f"\t{escape_lexeme(token.lexeme)}")
    return "\n".join(lines) + "\n"


class LexerTool(BaseTool):
    """
    Converts raw source bytes into a lossless token stream, applying the
    comment, identifier, literal and operator-ambiguity rules.
    """

    def __init__(self):
        super().__init__()
        logger.debug("Initializing LexerTool")

    def validate_params(self, source: Any = None, **kwargs) -> bool:
        return isinstance(source, (bytes, bytearray))

    def execute(self, source: bytes, file_id: str = "<input>", config: Optional[LexConfig] = None) -> ToolResult:
        if not self.validate_params(source=source):
            return ToolResult(success=False, error=f"source must be bytes, got {type(source).__name__}")
        try:
            tokens, diagnostics = lex(source, config, file_id)
            return ToolResult.from_diagnostics({"tokens": tokens, "file_id": file_id}, diagnostics)
        except Exception as e:
            logger.error(f"Error lexing {file_id}: {str(e)}", exc_info=True)
            return ToolResult(success=False, error=str(e))

    def format_result(self, data: Dict[str, Any]) -> str:
        return format_token_dump(data["tokens"])


# Create singleton instance
lexer_tool = LexerTool()
