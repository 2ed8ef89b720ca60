import pytest
from hypothesis import given, settings, strategies as st

from state.diagnostics import codes
from state.state import LexConfig
from tools.lexer import format_token_dump, lex, lexer_tool
from tools.tokens import TokenKind, significant


def kinds(source: bytes):
    tokens, _ = lex(source)
    return [(t.kind, t.value) for t in significant(tokens)]


def test_minimal_declaration():
    tokens, diags = lex(b"int x;")
    assert [(t.kind, t.value) for t in tokens if not t.is_trivia] == [
        (TokenKind.KEYWORD, "int"),
        (TokenKind.IDENTIFIER, "x"),
        (TokenKind.PUNCTUATOR, ";"),
        (TokenKind.EOF, None),
    ]
    assert diags == []


def test_unicode_identifiers():
    source = "int Number, Număr, 数字, संख्या, Число;".encode()
    idents = [v for k, v in kinds(source) if k == TokenKind.IDENTIFIER]
    assert idents == ["Number", "Număr", "数字", "संख्या", "Число"]


def test_length_and_predicates_are_identifiers():
    assert kinds(b"length used declared coded") == [
        (TokenKind.IDENTIFIER, "length"),
        (TokenKind.IDENTIFIER, "used"),
        (TokenKind.IDENTIFIER, "declared"),
        (TokenKind.IDENTIFIER, "coded"),
    ]


@pytest.mark.parametrize("text, value, base", [
    ("0b1_0000_0000", 256, 2),
    ("1_000_000", 1000000, 10),
    ("0xFF_FF", 65535, 16),
    ("017", 15, 8),
    ("42u", 42, 10),
])
def test_integer_literals(text, value, base):
    tokens, diags = lex(text.encode())
    first = tokens[0]
    assert first.kind == TokenKind.INT_LITERAL
    assert (first.value, first.base) == (value, base)
    assert diags == []


@pytest.mark.parametrize("text", ["0b102", "1__0", "0x", "100_", "09"])
def test_bad_literals(text):
    _, diags = lex(text.encode())
    assert codes(diags) == ["E_BAD_LITERAL"]


def test_ambiguous_plus_run():
    _, diags = lex(b"i+++j")
    assert codes(diags) == ["E_AMBIGUOUS_PUNCT"]


def test_ambiguous_run_can_be_a_warning():
    _, diags = lex(b"i+++j", LexConfig(ambiguous_severity="warning"))
    assert codes(diags) == ["E_AMBIGUOUS_PUNCT"]
    assert not diags[0].is_error


@pytest.mark.parametrize("source", [b"i++ +j", b"i+ ++j", b"i++", b"a-- - b"])
def test_spaced_runs_are_not_ambiguous(source):
    _, diags = lex(source)
    assert diags == []


def test_line_comment_ignores_trailing_backslash():
    source = b'//Single-line comment ended with \\\nprintf("Line also commented?\\n");\n'
    values = [v for _, v in kinds(source)]
    assert values[0] == "printf"
    assert b"Line also commented?\n" in values


def test_block_comment_ends_inside_quotes():
    source = b'/* "quoted */ x'
    assert kinds(source) == [(TokenKind.IDENTIFIER, "x")]


def test_unterminated_block_comment():
    _, diags = lex(b"int /* never closed")
    assert codes(diags) == ["E_UNTERMINATED_BLOCK_COMMENT"]


def test_string_keeps_zero_bytes():
    tokens, _ = lex(b'"Binary-safe\\0 @C String!\\n"')
    assert tokens[0].value == b"Binary-safe\x00 @C String!\n"


@pytest.mark.parametrize("source, code", [
    (b'"open', "E_UNTERMINATED_STRING"),
    (b'"\\q"', "E_BAD_ESCAPE"),
    (b"int @x;", "E_STRAY_CHAR"),
    (b"int \xff;", "E_BAD_ENCODING"),
])
def test_lexer_errors(source, code):
    _, diags = lex(source)
    assert codes(diags) == [code]


def test_directive_only_at_line_start():
    tokens, _ = lex(b"#define A 1\nx # y\n")
    sig = significant(tokens)
    assert sig[0].kind == TokenKind.HASH_DIRECTIVE and sig[0].value == "define"
    assert (sig[-2].kind, sig[-2].value) == (TokenKind.PUNCTUATOR, "#")


def test_whitespace_flavours():
    tokens, _ = lex(b"a \\\nb\n")
    flavours = [t.value for t in tokens if t.kind == TokenKind.WHITESPACE]
    assert flavours == ["space", "splice", "newline"]


def test_token_dump_format():
    dump = format_token_dump(lex(b"x\n")[0])
    assert dump.splitlines() == [
        "IDENTIFIER\t1:1@0-1\tx",
        "WHITESPACE\t1:2@1-2\t\\n",
        "EOF\t2:1@2-2\t",
    ]


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=200))
def test_lexing_is_lossless(source):
    tokens, _ = lex(source)
    assert b"".join(t.lexeme for t in tokens) == source
    offsets = [(t.span.byte_start, t.span.byte_end) for t in tokens]
    assert all(start <= end for start, end in offsets)
    assert all(a[1] == b[0] for a, b in zip(offsets, offsets[1:]))


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="ab01x_+-*/\"'\\\n #()", max_size=80))
def test_rescanning_is_idempotent(text):
    source = text.encode()
    tokens, diags = lex(source)
    again, again_diags = lex(b"".join(t.lexeme for t in tokens))
    assert [(t.kind, t.lexeme, t.value) for t in again] == [(t.kind, t.lexeme, t.value) for t in tokens]
    assert codes(again_diags) == codes(diags)


def test_lexer_tool_result():
    result = lexer_tool.execute(b"int i+++j;")
    assert not result.success
    assert codes(result.diagnostics) == ["E_AMBIGUOUS_PUNCT"]
    assert lexer_tool.format_result(result.data).startswith("KEYWORD\t1:1@0-3\tint\n")


def test_lexer_tool_rejects_text():
    result = lexer_tool.execute("int")
    assert not result.success
    assert result.error == "source must be bytes, got str"
