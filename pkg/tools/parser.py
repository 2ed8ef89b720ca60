import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from state.diagnostics import Diagnostic, DiagnosticCode, Severity
from state.span import Span
from .ast_nodes import (
    INT, CHAR, VOID, ArrayKind, ArraySpec, Assign, Binary, Block, Break, Call, Case, Cast, CharLit,
    Comma, Continue, CType, DeclStmt, Default, DoWhile, Empty, Expr, ExprStmt, For, Goto, Ident, If,
    Index, InitList, IntLit, Labeled, LengthOf, Member, Param, Placement, ProcDef, Return, SizeofExpr,
    SizeofType, Stmt, StrLit, StructDecl, StructMember, Switch, Ternary, TranslationUnit, Unary,
    VarDecl, While, array_of, proc_of, struct_type,
)
from .ast_printer import to_sexpr
from .base_tool import BaseTool, ToolResult
from .operators import (ASSIGN_OPS, ASSIGN_PRECEDENCE, BINARY_PRECEDENCE, COMMA_PRECEDENCE,
                        TERNARY_PRECEDENCE, apply_int_op, wrap_signed)
from .tokens import Token, TokenCursor, TokenKind

logger = logging.getLogger(__name__)

TYPE_KEYWORDS = frozenset({"int", "char", "void", "struct"})
STATEMENT_KEYWORDS = frozenset({
    "if", "while", "do", "for", "switch", "case", "default",
    "break", "continue", "return", "goto",
})


class ParseError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span


def fold_constant(expr: Expr) -> Optional[int]:
    """Value of an integer constant expression, or None if it is not one."""
    if isinstance(expr, (IntLit, CharLit)):
        return wrap_signed(expr.value, 32)
    if isinstance(expr, Unary) and expr.op in ("+", "-", "!", "~"):
        value = fold_constant(expr.operand)
        if value is None:
            return None
        return wrap_signed({"+": value, "-": -value, "!": int(value == 0), "~": ~value}[expr.op], 32)
    if isinstance(expr, Ternary):
        cond = fold_constant(expr.cond)
        if cond is None:
            return None
        return fold_constant(expr.then if cond else expr.other)
    if isinstance(expr, Binary):
        left, right = fold_constant(expr.left), fold_constant(expr.right)
        if left is None or right is None:
            return None
        return apply_int_op(expr.op, left, right)
    return None


class Parser:
    """
    Recursive descent over declarations and statements, precedence climbing
    for expressions. Errors are collected; parsing resumes at the next `;`
    or `}`.
    """

    def __init__(self, cursor: TokenCursor):
        self.cursor = cursor
        self.diagnostics: List[Diagnostic] = []

    # -- helpers --------------------------------------------------------------

    def _error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.cursor.peek()
        return ParseError(message, tok.span)

    def _describe(self, tok: Token) -> str:
        return "end of file" if tok.kind == TokenKind.EOF else f"'{tok.text}'"

    def expect_punct(self, symbol: str, context: str = "") -> Token:
        tok = self.cursor.match_punct(symbol)
        if tok is None:
            where = f" {context}" if context else ""
            raise self._error(f"expected '{symbol}'{where}, found {self._describe(self.cursor.peek())}")
        return tok

    def expect_ident(self, what: str) -> Token:
        tok = self.cursor.peek()
        if tok.kind != TokenKind.IDENTIFIER:
            raise self._error(f"expected {what}, found {self._describe(tok)}")
        return self.cursor.advance()

    def _span(self, start: Token) -> Span:
        return start.span.merge(self.cursor.previous().span)

    def _report(self, error: ParseError) -> None:
        self.diagnostics.append(Diagnostic(code=DiagnosticCode.E_PARSE, severity=Severity.ERROR,
                                           span=error.span, message=error.message))

    def _diag(self, code: DiagnosticCode, span: Span, message: str, severity: Severity = Severity.ERROR) -> None:
        self.diagnostics.append(Diagnostic(code=code, severity=severity, span=span, message=message))

    def _synchronize(self, top_level: bool) -> None:
        start = self.cursor.pos
        depth = 0
        while not self.cursor.at_end():
            tok = self.cursor.peek()
            if tok.is_punct("{"):
                depth += 1
            elif tok.is_punct("}"):
                if depth == 0:
                    if top_level:
                        self.cursor.advance()
                    break
                depth -= 1
                if depth == 0 and top_level:
                    self.cursor.advance()
                    break
            elif tok.is_punct(";") and depth == 0:
                self.cursor.advance()
                break
            self.cursor.advance()
        if self.cursor.pos == start and not self.cursor.at_end():
            self.cursor.advance()

    # -- translation unit -----------------------------------------------------

    def parse_unit(self) -> TranslationUnit:
        start = self.cursor.peek()
        decls = []
        while not self.cursor.at_end():
            try:
                decls.extend(self.parse_declaration(Placement.TOP_LEVEL))
            except ParseError as e:
                self._report(e)
                self._synchronize(top_level=True)
        return TranslationUnit(decls, span=self._span(start))

    def _starts_declaration(self) -> bool:
        tok = self.cursor.peek()
        return tok.kind == TokenKind.KEYWORD and (tok.value in TYPE_KEYWORDS or tok.value == "volatile")

    def parse_declaration(self, placement: Placement) -> List[Any]:
        """One declaration: a struct definition, variables, or a procedure."""
        start = self.cursor.peek()
        volatile = False
        while self.cursor.match_keyword("volatile"):
            volatile = True
        base, struct_decl = self.parse_type_specifier(allow_definition=True)
        decls: List[Any] = [struct_decl] if struct_decl is not None else []
        if self.cursor.match_punct(";"):
            return decls

        proc_placement = placement
        if placement != Placement.TOP_LEVEL:
            proc_placement = Placement.NESTED if volatile else Placement.CLOSURE
        first = True
        while True:
            decl = self.parse_declarator(base, proc_placement, start)
            if isinstance(decl, ProcDef):
                if volatile and placement == Placement.TOP_LEVEL:
                    self._diag(DiagnosticCode.N_VOLATILE_IGNORED, decl.span,
                               f"'volatile' on top-level procedure '{decl.name}' ignored", Severity.NOTE)
                if decl.body is not None:
                    if not first:
                        raise self._error("procedure body not allowed here", start)
                    decls.append(decl)
                    return decls
            elif volatile:
                self._diag(DiagnosticCode.N_VOLATILE_IGNORED, decl.span,
                           f"'volatile' on data declaration '{decl.name}' ignored", Severity.NOTE)
                decl.volatile = True
            decls.append(decl)
            first = False
            if not self.cursor.match_punct(","):
                break
        self.expect_punct(";", "after declaration")
        return decls

    def parse_type_specifier(self, allow_definition: bool = False) -> Tuple[CType, Optional[StructDecl]]:
        tok = self.cursor.peek()
        if tok.kind != TokenKind.KEYWORD or tok.value not in TYPE_KEYWORDS:
            raise self._error(f"expected a type, found {self._describe(tok)}")
        self.cursor.advance()
        if tok.value == "int":
            return INT, None
        if tok.value == "char":
            return CHAR, None
        if tok.value == "void":
            return VOID, None
        if self.cursor.check_punct("{"):
            raise self._error("anonymous structs are not supported")
        tag = self.expect_ident("struct tag")
        if self.cursor.check_punct("{"):
            if not allow_definition:
                raise self._error("struct definition not allowed here")
            members = self.parse_struct_body()
            return struct_type(tag.value), StructDecl(tag.value, members, span=self._span(tok))
        if self.cursor.check_punct(";") and allow_definition:
            return struct_type(tag.value), StructDecl(tag.value, None, span=self._span(tok))
        return struct_type(tag.value), None

    def parse_struct_body(self) -> List[StructMember]:
        self.expect_punct("{")
        members: List[StructMember] = []
        while not self.cursor.check_punct("}") and not self.cursor.at_end():
            base, _ = self.parse_type_specifier()
            while True:
                start = self.cursor.peek()
                name, ctype = self.parse_data_declarator(base)
                members.append(StructMember(name, ctype, span=self._span(start)))
                if not self.cursor.match_punct(","):
                    break
            self.expect_punct(";", "after struct member")
        self.expect_punct("}", "at end of struct")
        for index, member in enumerate(members):
            if _is_flex(member.ctype) and index != len(members) - 1:
                self._diag(DiagnosticCode.E_FLEX_NOT_LAST, member.span,
                           f"zero-length array '{member.name}' must be the last struct member")
        return members

    def parse_data_declarator(self, base: CType) -> Tuple[str, CType]:
        """`name`, `name[...]` or `(*name)(types)`."""
        if self.cursor.match_punct("("):
            self.expect_punct("*", "in procedure declarator")
            name = self.expect_ident("declarator name")
            self.expect_punct(")")
            self.expect_punct("(")
            params = self.parse_params()
            return name.value, proc_of(base, [p.ctype for p in params])
        name = self.expect_ident("declarator name")
        if self.cursor.match_punct("["):
            return name.value, array_of(base, self.parse_array_spec())
        return name.value, base

    def parse_declarator(self, base: CType, placement: Placement, start: Token) -> Any:
        if self.cursor.check_punct("(") and self.cursor.check_punct("*", 1) and self.cursor.check_punct("(", 3):
            # T (*Name(params))(types) { ... }: a procedure returning a procedure
            self.cursor.advance()
            self.cursor.advance()
            name = self.expect_ident("procedure name")
            self.expect_punct("(")
            params = self.parse_params()
            self.expect_punct(")")
            self.expect_punct("(")
            ret_params = self.parse_params()
            return self._finish_proc(name, proc_of(base, [p.ctype for p in ret_params]), params, placement, start)
        if self.cursor.peek().kind == TokenKind.IDENTIFIER and self.cursor.check_punct("(", 1):
            name = self.cursor.advance()
            self.cursor.advance()
            params = self.parse_params()
            return self._finish_proc(name, base, params, placement, start)

        decl_start = self.cursor.peek()
        name, ctype = self.parse_data_declarator(base)
        if _is_flex(ctype):
            self._diag(DiagnosticCode.E_FLEX_NOT_LAST, self._span(decl_start),
                       f"zero-length array '{name}' is only allowed as the last struct member")
        init = None
        if self.cursor.match_punct("="):
            init = self.parse_initializer()
        return VarDecl(name, ctype, init, span=self._span(decl_start))

    def _finish_proc(self, name: Token, ret: CType, params: List[Param], placement: Placement, start: Token) -> ProcDef:
        body = None
        if self.cursor.check_punct("{"):
            body = self.parse_block()
        return ProcDef(name.value, ret, params, body, placement, span=self._span(start))

    def parse_params(self) -> List[Param]:
        """Parameter list after the opening `(`; consumes the closing `)`."""
        params: List[Param] = []
        if self.cursor.match_punct(")"):
            return params
        if self.cursor.check_keyword("void") and self.cursor.check_punct(")", 1):
            self.cursor.advance()
            self.cursor.advance()
            return params
        while True:
            start = self.cursor.peek()
            base, _ = self.parse_type_specifier()
            if self.cursor.check_punct("("):
                name, ctype = self.parse_data_declarator(base)
                params.append(Param(name, ctype, span=self._span(start)))
            else:
                name_tok = None
                if self.cursor.peek().kind == TokenKind.IDENTIFIER:
                    name_tok = self.cursor.advance()
                ctype = base
                if self.cursor.match_punct("["):
                    ctype = array_of(base, self.parse_array_spec())
                params.append(Param(name_tok.value if name_tok else None, ctype, span=self._span(start)))
            if not self.cursor.match_punct(","):
                break
        self.expect_punct(")", "after parameters")
        return params

    def parse_array_spec(self) -> ArraySpec:
        """Array suffix after `[`; consumes the closing `]`."""
        if self.cursor.match_punct("]"):
            return ArraySpec(ArrayKind.DYNAMIC)
        start = self.cursor.peek()
        size = fold_constant(self.parse_expression(TERNARY_PRECEDENCE))
        if size is None or size < 0:
            raise self._error("array size must be a non-negative integer constant", start)
        self.expect_punct("]", "after array size")
        if size == 0:
            return ArraySpec(ArrayKind.FLEX_ZERO)
        return ArraySpec(ArrayKind.FIXED, size)

    def parse_initializer(self) -> Expr:
        start = self.cursor.peek()
        if self.cursor.match_punct("{"):
            items: List[Expr] = []
            while not self.cursor.check_punct("}"):
                items.append(self.parse_initializer())
                if not self.cursor.match_punct(","):
                    break
            self.expect_punct("}", "at end of initializer list")
            return InitList(items, span=self._span(start))
        return self.parse_expression(ASSIGN_PRECEDENCE)

    def parse_type_name(self) -> CType:
        """Abstract type for casts and `sizeof`: `int`, `char[4]`, `int (*)(int)`."""
        base, _ = self.parse_type_specifier()
        if self.cursor.check_punct("(") and self.cursor.check_punct("*", 1):
            self.cursor.advance()
            self.cursor.advance()
            self.expect_punct(")")
            self.expect_punct("(")
            return proc_of(base, [p.ctype for p in self.parse_params()])
        if self.cursor.match_punct("["):
            return array_of(base, self.parse_array_spec())
        return base

    # -- statements -----------------------------------------------------------

    def parse_block(self) -> Block:
        start = self.expect_punct("{")
        stmts: List[Stmt] = []
        while not self.cursor.check_punct("}") and not self.cursor.at_end():
            try:
                stmts.append(self.parse_statement())
            except ParseError as e:
                self._report(e)
                self._synchronize(top_level=False)
        self.expect_punct("}", "at end of block")
        return Block(stmts, span=self._span(start))

    def parse_statement(self) -> Stmt:
        tok = self.cursor.peek()
        if tok.is_punct("{"):
            return self.parse_block()
        if tok.is_punct(";"):
            self.cursor.advance()
            return Empty(span=tok.span)
        if tok.kind == TokenKind.KEYWORD and tok.value in STATEMENT_KEYWORDS:
            return getattr(self, f"_parse_{tok.value}")()
        if tok.kind == TokenKind.IDENTIFIER and self.cursor.check_punct(":", 1):
            self.cursor.advance()
            self.cursor.advance()
            if self.cursor.check_punct("}"):
                inner: Stmt = Empty(span=tok.span)
            else:
                inner = self.parse_statement()
            return Labeled(tok.value, inner, span=self._span(tok))
        if self._starts_declaration():
            decls = self.parse_declaration(Placement.CLOSURE)
            return DeclStmt(decls, span=self._span(tok))
        expr = self.parse_expression()
        self.expect_punct(";", "after expression")
        return ExprStmt(expr, span=self._span(tok))

    def _parenthesized(self, keyword: str) -> Expr:
        self.expect_punct("(", f"after '{keyword}'")
        expr = self.parse_expression()
        self.expect_punct(")", f"after '{keyword}' condition")
        return expr

    def _parse_if(self) -> Stmt:
        start = self.cursor.advance()
        cond = self._parenthesized("if")
        then = self.parse_statement()
        other = self.parse_statement() if self.cursor.match_keyword("else") else None
        return If(cond, then, other, span=self._span(start))

    def _parse_while(self) -> Stmt:
        start = self.cursor.advance()
        cond = self._parenthesized("while")
        return While(cond, self.parse_statement(), span=self._span(start))

    def _parse_do(self) -> Stmt:
        start = self.cursor.advance()
        body = self.parse_statement()
        if not self.cursor.match_keyword("while"):
            raise self._error("expected 'while' after 'do' body")
        cond = self._parenthesized("while")
        self.expect_punct(";", "after 'do ... while'")
        return DoWhile(body, cond, span=self._span(start))

    def _parse_for(self) -> Stmt:
        start = self.cursor.advance()
        self.expect_punct("(", "after 'for'")
        init: Optional[Stmt] = None
        first = self.cursor.peek()
        if self.cursor.match_punct(";"):
            init = None
        elif self._starts_declaration():
            init = DeclStmt(self.parse_declaration(Placement.CLOSURE), span=self._span(first))
        else:
            init = ExprStmt(self.parse_expression(), span=self._span(first))
            self.expect_punct(";", "after 'for' initializer")
        cond = None if self.cursor.check_punct(";") else self.parse_expression()
        self.expect_punct(";", "after 'for' condition")
        step = None if self.cursor.check_punct(")") else self.parse_expression()
        self.expect_punct(")", "after 'for' clauses")
        return For(init, cond, step, self.parse_statement(), span=self._span(start))

    def _parse_switch(self) -> Stmt:
        start = self.cursor.advance()
        expr = self._parenthesized("switch")
        return Switch(expr, self.parse_statement(), span=self._span(start))

    def _parse_case(self) -> Stmt:
        start = self.cursor.advance()
        value = self.parse_expression(TERNARY_PRECEDENCE)
        self.expect_punct(":", "after 'case' value")
        inner = Empty(span=start.span) if self.cursor.check_punct("}") else self.parse_statement()
        return Case(value, inner, span=self._span(start))

    def _parse_default(self) -> Stmt:
        start = self.cursor.advance()
        self.expect_punct(":", "after 'default'")
        inner = Empty(span=start.span) if self.cursor.check_punct("}") else self.parse_statement()
        return Default(inner, span=self._span(start))

    def _parse_break(self) -> Stmt:
        start = self.cursor.advance()
        self.expect_punct(";", "after 'break'")
        return Break(span=self._span(start))

    def _parse_continue(self) -> Stmt:
        start = self.cursor.advance()
        self.expect_punct(";", "after 'continue'")
        return Continue(span=self._span(start))

    def _parse_return(self) -> Stmt:
        start = self.cursor.advance()
        value = None if self.cursor.check_punct(";") else self.parse_expression()
        self.expect_punct(";", "after 'return'")
        return Return(value, span=self._span(start))

    def _parse_goto(self) -> Stmt:
        start = self.cursor.advance()
        label = self.expect_ident("label after 'goto'")
        self.expect_punct(";", "after 'goto' label")
        return Goto(label.value, span=self._span(start))

    # -- expressions ----------------------------------------------------------

    def parse_expression(self, min_prec: int = COMMA_PRECEDENCE) -> Expr:
        start = self.cursor.peek()
        left = self.parse_unary()
        while True:
            tok = self.cursor.peek()
            if tok.kind != TokenKind.PUNCTUATOR:
                return left
            op = tok.value
            if op in ASSIGN_OPS and min_prec <= ASSIGN_PRECEDENCE:
                self.cursor.advance()
                value = self.parse_expression(ASSIGN_PRECEDENCE)
                left = Assign(op, left, value, span=self._span(start))
            elif op == "?" and min_prec <= TERNARY_PRECEDENCE:
                self.cursor.advance()
                then = self.parse_expression(COMMA_PRECEDENCE)
                self.expect_punct(":", "in conditional expression")
                other = self.parse_expression(TERNARY_PRECEDENCE)
                left = Ternary(left, then, other, span=self._span(start))
            elif op == "," and min_prec <= COMMA_PRECEDENCE:
                self.cursor.advance()
                right = self.parse_expression(COMMA_PRECEDENCE + 1)
                left = Comma(left, right, span=self._span(start))
            elif op in BINARY_PRECEDENCE and BINARY_PRECEDENCE[op] >= min_prec:
                self.cursor.advance()
                right = self.parse_expression(BINARY_PRECEDENCE[op] + 1)
                left = Binary(op, left, right, span=self._span(start))
            else:
                return left

    def _starts_type_name(self, offset: int = 0) -> bool:
        tok = self.cursor.peek(offset)
        return tok.kind == TokenKind.KEYWORD and tok.value in TYPE_KEYWORDS

    def parse_unary(self) -> Expr:
        tok = self.cursor.peek()
        if tok.is_punct("++") or tok.is_punct("--"):
            self.cursor.advance()
            operand = self.parse_unary()
            return Unary("pre" + tok.value, operand, span=self._span(tok))
        if tok.kind == TokenKind.PUNCTUATOR and tok.value in ("+", "-", "!", "~"):
            self.cursor.advance()
            operand = self.parse_unary()
            return Unary(tok.value, operand, span=self._span(tok))
        if tok.is_punct("&") or tok.is_punct("*"):
            raise self._error(f"pointer operator '{tok.value}' is not supported")
        if tok.is_keyword("sizeof"):
            self.cursor.advance()
            if self.cursor.check_punct("(") and self._starts_type_name(1):
                self.cursor.advance()
                target = self.parse_type_name()
                self.expect_punct(")", "after type in 'sizeof'")
                return SizeofType(target, span=self._span(tok))
            operand = self.parse_unary()
            return SizeofExpr(operand, span=self._span(tok))
        if tok.is_punct("(") and self._starts_type_name(1):
            self.cursor.advance()
            target = self.parse_type_name()
            self.expect_punct(")", "after cast type")
            operand = self.parse_unary()
            return Cast(target, operand, span=self._span(tok))
        if tok.is_ident("length") and self.cursor.check_punct("(", 1):
            self.cursor.advance()
            self.cursor.advance()
            operand = self.parse_expression(ASSIGN_PRECEDENCE)
            self.expect_punct(")", "after 'length' operand")
            return self.parse_postfix(LengthOf(operand, span=self._span(tok)), tok)
        return self.parse_postfix(self.parse_primary(), tok)

    def parse_postfix(self, expr: Expr, start: Token) -> Expr:
        while True:
            tok = self.cursor.peek()
            if tok.is_punct("["):
                self.cursor.advance()
                index = self.parse_expression()
                self.expect_punct("]", "after index")
                expr = Index(expr, index, span=self._span(start))
            elif tok.is_punct("("):
                self.cursor.advance()
                args: List[Expr] = []
                if not self.cursor.check_punct(")"):
                    while True:
                        args.append(self.parse_expression(ASSIGN_PRECEDENCE))
                        if not self.cursor.match_punct(","):
                            break
                self.expect_punct(")", "after call arguments")
                expr = Call(expr, args, span=self._span(start))
            elif tok.is_punct(".") or tok.is_punct("->"):
                self.cursor.advance()
                name = self.expect_ident("member name")
                expr = Member(expr, name.value, tok.value == "->", span=self._span(start))
            elif tok.is_punct("++") or tok.is_punct("--"):
                self.cursor.advance()
                expr = Unary("post" + tok.value, expr, span=self._span(start))
            else:
                return expr

    def parse_primary(self) -> Expr:
        tok = self.cursor.peek()
        if tok.kind == TokenKind.INT_LITERAL:
            self.cursor.advance()
            return IntLit(tok.value, span=tok.span)
        if tok.kind == TokenKind.CHAR_LITERAL:
            self.cursor.advance()
            return CharLit(tok.value, span=tok.span)
        if tok.kind == TokenKind.STRING_LITERAL:
            data = bytearray()
            while self.cursor.peek().kind == TokenKind.STRING_LITERAL:
                data += self.cursor.advance().value
            return StrLit(bytes(data), span=self._span(tok))
        if tok.kind == TokenKind.IDENTIFIER:
            self.cursor.advance()
            return Ident(tok.value, span=tok.span)
        if tok.is_punct("("):
            self.cursor.advance()
            expr = self.parse_expression()
            self.expect_punct(")", "to close '('")
            return expr
        raise self._error(f"expected an expression, found {self._describe(tok)}")

    def parse_local_procedure(self) -> ProcDef:
        start = self.cursor.peek()
        decls = self.parse_declaration(Placement.CLOSURE)
        procs = [d for d in decls if isinstance(d, ProcDef) and d.body is not None]
        if not procs:
            raise self._error("expected a local procedure definition", start)
        return procs[0]


def _is_flex(ctype: CType) -> bool:
    return ctype.is_array and ctype.array.kind == ArrayKind.FLEX_ZERO


def parse(tokens: Sequence[Token]) -> Tuple[TranslationUnit, List[Diagnostic]]:
    """Parse a whole translation unit from a (trivia-bearing) token stream."""
    parser = Parser(TokenCursor(tokens))
    unit = parser.parse_unit()
    logger.info(f"Parsed {len(unit.decls)} top-level declarations "
                f"with {len(parser.diagnostics)} diagnostics")
    return unit, parser.diagnostics


def parse_expression(cursor: TokenCursor, min_precedence: int = COMMA_PRECEDENCE) -> Expr:
    """Parse one expression at `cursor`; raises ParseError on malformed input."""
    return Parser(cursor).parse_expression(min_precedence)


def parse_local_procedure(cursor: TokenCursor) -> ProcDef:
    """Parse a procedure definition found inside a procedure body."""
    return Parser(cursor).parse_local_procedure()


class ParserTool(BaseTool):
    """Builds the syntax tree, recovering at statement boundaries."""

    def validate_params(self, tokens: Any = None, **kwargs) -> bool:
        return isinstance(tokens, (list, tuple)) and all(isinstance(t, Token) for t in tokens)

    def execute(self, tokens: Sequence[Token]) -> ToolResult:
        if not self.validate_params(tokens=tokens):
            return ToolResult(success=False, error="tokens must be a sequence of Token")
        try:
            unit, diagnostics = parse(tokens)
            return ToolResult.from_diagnostics({"unit": unit}, diagnostics)
        except Exception as e:
            logger.error(f"Error parsing: {str(e)}", exc_info=True)
            return ToolResult(success=False, error=str(e))

    def format_result(self, data: Dict[str, Any]) -> str:
        return to_sexpr(data["unit"])


# Create singleton instance
parser_tool = ParserTool()
