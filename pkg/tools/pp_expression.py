import logging
from typing import Callable, Dict, List, Optional

from state.span import Span
from state.state import PREDICATES, CodeFacts, PredicateRecord
from .operators import (BINARY_PRECEDENCE, COMMA_PRECEDENCE, TERNARY_PRECEDENCE,
                        trunc_div, trunc_mod, wrap_signed)
from .tokens import Token, TokenKind, significant

logger = logging.getLogger(__name__)


class PpExprError(Exception):
    """Malformed or undefined `#if` / `#while` / `#defeval` expression."""

    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span


def _int_token(value: int, span: Span) -> Token:
    return Token(TokenKind.INT_LITERAL, str(value).encode(), span, value, 10)


def replace_predicates(
    tokens: List[Token],
    macros: Dict[str, object],
    facts: CodeFacts,
    trace: Optional[List[PredicateRecord]] = None,
) -> List[Token]:
    """
    Resolve `defined X`, `declared X`, `coded X`, `used X` (with or without
    parentheses) into 0/1 literals. `defined` asks the macro table, the
    others ask the coding-stage facts and are recorded in `trace`.
    """
    out: List[Token] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.kind == TokenKind.IDENTIFIER and (tok.value == "defined" or tok.value in PREDICATES):
            j = i + 1
            parens = j < len(tokens) and tokens[j].is_punct("(")
            if parens:
                j += 1
            if j >= len(tokens) or tokens[j].kind not in (TokenKind.IDENTIFIER, TokenKind.KEYWORD):
                raise PpExprError(f"'{tok.value}' needs an identifier operand", tok.span)
            name = tokens[j].value
            j += 1
            if parens:
                if j >= len(tokens) or not tokens[j].is_punct(")"):
                    raise PpExprError(f"missing ')' after '{tok.value}({name}'", tok.span)
                j += 1
            if tok.value == "defined":
                value = name in macros
            else:
                value = facts.query(tok.value, name)
                if trace is not None:
                    trace.append(PredicateRecord(predicate=tok.value, name=name, value=value))
                logger.debug(f"Predicate {tok.value} {name} -> {value}")
            out.append(_int_token(int(value), tok.span))
            i = j
            continue
        out.append(tok)
        i += 1
    return out


class _ExprEvaluator:
    """Precedence climbing over 64-bit signed values with C short-circuiting."""

    def __init__(self, tokens: List[Token], span: Span):
        self.tokens = tokens
        self.pos = 0
        self.span = span

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise PpExprError("unexpected end of expression", self.span)
        self.pos += 1
        return tok

    def expect(self, symbol: str) -> None:
        tok = self.peek()
        if tok is None or not tok.is_punct(symbol):
            raise PpExprError(f"expected '{symbol}'", tok.span if tok else self.span)
        self.pos += 1

    def evaluate(self) -> int:
        value = self.expression(COMMA_PRECEDENCE, True)
        tok = self.peek()
        if tok is not None:
            raise PpExprError(f"unexpected token '{tok.text}'", tok.span)
        return value

    def expression(self, min_prec: int, live: bool) -> int:
        left = self.unary(live)
        while True:
            tok = self.peek()
            if tok is None or tok.kind != TokenKind.PUNCTUATOR:
                return left
            op = tok.value
            if op == "?" and min_prec <= TERNARY_PRECEDENCE:
                self.advance()
                chosen = left != 0
                then_value = self.expression(COMMA_PRECEDENCE, live and chosen)
                self.expect(":")
                else_value = self.expression(TERNARY_PRECEDENCE, live and not chosen)
                left = then_value if chosen else else_value
                continue
            if op == "," and min_prec <= COMMA_PRECEDENCE:
                self.advance()
                left = self.expression(COMMA_PRECEDENCE + 1, live)
                continue
            prec = BINARY_PRECEDENCE.get(op)
            if prec is None or prec < min_prec:
                return left
            self.advance()
            if op == "&&":
                right = self.expression(prec + 1, live and left != 0)
                left = int(left != 0 and right != 0)
            elif op == "||":
                right = self.expression(prec + 1, live and left == 0)
                left = int(left != 0 or right != 0)
            else:
                right = self.expression(prec + 1, live)
                left = self.apply(op, left, right, live, tok)

    def apply(self, op: str, a: int, b: int, live: bool, tok: Token) -> int:
        if op in ("/", "%"):
            if b == 0:
                if live:
                    raise PpExprError("division by zero in preprocessor expression", tok.span)
                return 0
            result = trunc_div(a, b) if op == "/" else trunc_mod(a, b)
        elif op == "+":
            result = a + b
        elif op == "-":
            result = a - b
        elif op == "*":
            result = a * b
        elif op == "<<":
            result = a << (b & 63)
        elif op == ">>":
            result = a >> (b & 63)
        elif op == "&":
            result = a & b
        elif op == "|":
            result = a | b
        elif op == "^":
            result = a ^ b
        else:
            result = int({
                "==": a == b, "!=": a != b, "<": a < b,
                ">": a > b, "<=": a <= b, ">=": a >= b,
            }[op])
        return wrap_signed(result, 64)

    def unary(self, live: bool) -> int:
        tok = self.advance()
        if tok.kind == TokenKind.INT_LITERAL:
            return wrap_signed(tok.value, 64)
        if tok.kind == TokenKind.CHAR_LITERAL:
            return tok.value
        if tok.kind == TokenKind.PUNCTUATOR:
            if tok.value == "(":
                value = self.expression(COMMA_PRECEDENCE, live)
                self.expect(")")
                return value
            if tok.value in ("+", "-", "!", "~"):
                operand = self.unary(live)
                if tok.value == "-":
                    return wrap_signed(-operand, 64)
                if tok.value == "!":
                    return int(operand == 0)
                if tok.value == "~":
                    return wrap_signed(~operand, 64)
                return operand
        raise PpExprError(f"unexpected token '{tok.text}' in preprocessor expression", tok.span)


def eval_pp_expr(
    tokens: List[Token],
    macros: Dict[str, object],
    facts: CodeFacts,
    trace: Optional[List[PredicateRecord]] = None,
    expand: Optional[Callable[[List[Token]], List[Token]]] = None,
    span: Optional[Span] = None,
) -> int:
    """
    Evaluate a constant expression as `#if` does.

    Predicates are resolved before macro expansion so their operands are
    never expanded; identifiers that survive expansion count as 0.
    """
    where = span or (tokens[0].span if tokens else Span.unknown())
    resolved = replace_predicates(significant(tokens), macros, facts, trace)
    if expand is not None:
        resolved = significant(expand(resolved))
    if not resolved:
        raise PpExprError("empty preprocessor expression", where)
    final: List[Token] = []
    for tok in resolved:
        if tok.kind == TokenKind.IDENTIFIER:
            final.append(_int_token(0, tok.span))
        elif tok.kind in (TokenKind.KEYWORD, TokenKind.STRING_LITERAL, TokenKind.INVALID):
            raise PpExprError(f"'{tok.text}' is not allowed in a preprocessor expression", tok.span)
        else:
            final.append(tok)
    return _ExprEvaluator(final, where).evaluate()
