import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from state.diagnostics import Diagnostic, DiagnosticCode, Severity
from state.span import Span
from state.state import CodeFacts, LexConfig, PpConfig, PredicateRecord
from .base_tool import BaseTool, ToolResult
from .lexer import lex, relex
from .pp_expression import PpExprError, eval_pp_expr
from .tokens import PUNCTUATORS, Token, TokenKind, significant

logger = logging.getLogger(__name__)

CONDITIONALS = frozenset({"if", "ifdef", "ifndef", "elif", "else", "endif"})
VA_ARGS = "__VA_ARGS__"
TWO_CHAR_PREFIXES = frozenset(p[:2] for p in PUNCTUATORS if len(p) >= 2) | {"//", "/*"}


@dataclass
class MacroDef:
    """A macro: object-like, function-like, or evaluated (`#defeval`)."""
    name: str
    kind: str
    body: List[Token]
    params: List[str] = field(default_factory=list)
    variadic: bool = False
    span: Span = field(default_factory=Span.unknown)

    def same_as(self, other: "MacroDef") -> bool:
        return (
            self.kind == other.kind
            and self.params == other.params
            and self.variadic == other.variadic
            and [t.lexeme for t in self.body] == [t.lexeme for t in other.body]
        )


def split_lines(tokens: List[Token]) -> List[List[Token]]:
    """Group tokens into logical lines; each line keeps its terminating newline."""
    lines: List[List[Token]] = []
    current: List[Token] = []
    for tok in tokens:
        if tok.kind == TokenKind.EOF:
            break
        current.append(tok)
        if tok.is_newline:
            lines.append(current)
            current = []
    if current:
        lines.append(current)
    return lines


def _directive_of(line: List[Token]) -> Optional[Token]:
    for tok in line:
        if tok.is_trivia:
            continue
        return tok if tok.kind == TokenKind.HASH_DIRECTIVE else None
    return None


def _strip(tokens: List[Token]) -> List[Token]:
    start, end = 0, len(tokens)
    while start < end and tokens[start].is_trivia:
        start += 1
    while end > start and tokens[end - 1].is_trivia:
        end -= 1
    return tokens[start:end]


def _escape_for_string(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def make_string_token(content: str, span: Span) -> Token:
    lexeme = ('"' + _escape_for_string(content) + '"').encode("utf-8", "surrogateescape")
    return Token(TokenKind.STRING_LITERAL, lexeme, span, content.encode("utf-8", "surrogateescape"))


def make_int_token(value: int, span: Span) -> Token:
    return Token(TokenKind.INT_LITERAL, str(value).encode(), span, value, 10)


class Preprocessor:
    """
    Line-oriented preprocessor over lexer tokens.

    Text lines accumulate into a chunk that is macro-expanded whenever a
    directive is reached, so a `#defeval` inside a `#while` body affects
    only the lines after it.
    """

    def __init__(
        self,
        facts: CodeFacts,
        config: Optional[PpConfig] = None,
        lex_config: Optional[LexConfig] = None,
        source_path: Optional[Path] = None,
        macros: Optional[Dict[str, MacroDef]] = None,
    ):
        self.facts = facts
        self.config = config or PpConfig()
        self.lex_config = lex_config or LexConfig()
        self.macros: Dict[str, MacroDef] = dict(macros or {})
        self.trace: List[PredicateRecord] = []
        self.diagnostics: List[Diagnostic] = []
        self.file_stack: List[Optional[Path]] = [source_path]
        self.file_ids: List[str] = [str(source_path) if source_path else "<input>"]

    # -- diagnostics ----------------------------------------------------------

    def _diag(self, code: DiagnosticCode, span: Span, message: str, severity: Severity = Severity.ERROR) -> None:
        self.diagnostics.append(Diagnostic(code=code, severity=severity, span=span, message=message))

    # -- entry points ---------------------------------------------------------

    def run(self, tokens: List[Token]) -> List[Token]:
        if tokens and tokens[0].span.file_id != "<unknown>":
            self.file_ids[0] = tokens[0].span.file_id
        out: List[Token] = []
        self.process_lines(split_lines(tokens), out)
        eof = tokens[-1] if tokens and tokens[-1].kind == TokenKind.EOF else None
        if eof is not None:
            out.append(eof)
        return out

    def process_lines(self, lines: List[List[Token]], out: List[Token]) -> None:
        chunk: List[Token] = []
        enable = True
        triggered = False
        ifstack: List[Tuple[bool, bool, Token]] = []
        i = 0
        while i < len(lines):
            line = lines[i]
            directive = _directive_of(line)
            newlines = [t for t in line if t.is_newline]
            if directive is None:
                chunk.extend(line if enable else newlines)
                i += 1
                continue

            name = directive.value
            args = _strip([t for t in line[line.index(directive) + 1:] if not t.is_newline])

            if name == "while":
                end = self._find_endwhile(lines, i)
                if end is None:
                    self._diag(DiagnosticCode.E_PP_UNTERMINATED_COND, directive.span, "'#while' without '#endwhile'")
                    end = len(lines)
                if enable:
                    out.extend(self.expand(chunk))
                    chunk = []
                    self.run_while(directive, args, lines[i + 1:end], out)
                i = end + 1
                continue

            if name in CONDITIONALS:
                if name in ("if", "ifdef", "ifndef"):
                    ifstack.append((enable, triggered, directive))
                    if enable:
                        if name == "if":
                            taken = self._eval(args, directive.span) != 0
                        else:
                            taken = self._macro_name(args, directive) in self.macros
                            if name == "ifndef":
                                taken = not taken
                        enable, triggered = taken, taken
                elif not ifstack:
                    self._diag(DiagnosticCode.E_PP_STRAY_ELSE_ENDIF, directive.span, f"'#{name}' without '#if'")
                elif name == "elif":
                    if ifstack[-1][0]:
                        if enable:
                            enable = False
                        elif not triggered and self._eval(args, directive.span) != 0:
                            enable, triggered = True, True
                elif name == "else":
                    if ifstack[-1][0]:
                        if enable:
                            enable = False
                        elif not triggered:
                            enable, triggered = True, True
                else:
                    enable, triggered, _ = ifstack.pop()
            elif name == "endwhile":
                if enable:
                    self._diag(DiagnosticCode.E_PP_STRAY_ELSE_ENDIF, directive.span, "'#endwhile' without '#while'")
            elif enable:
                out.extend(self.expand(chunk))
                chunk = []
                self._directive(name, directive, args, out)
            chunk.extend(newlines)
            i += 1

        for _, _, opener in ifstack:
            self._diag(DiagnosticCode.E_PP_UNTERMINATED_COND, opener.span, f"'#{opener.value}' without '#endif'")
        out.extend(self.expand(chunk))

    def _find_endwhile(self, lines: List[List[Token]], start: int) -> Optional[int]:
        depth = 0
        for index in range(start, len(lines)):
            directive = _directive_of(lines[index])
            if directive is None:
                continue
            if directive.value == "while":
                depth += 1
            elif directive.value == "endwhile":
                depth -= 1
                if depth == 0:
                    return index
        return None

    def run_while(self, directive: Token, condition: List[Token], body: List[List[Token]], out: List[Token]) -> None:
        """Re-scan and emit `body` while `condition` is nonzero."""
        iterations = 0
        while True:
            if self._eval(condition, directive.span) == 0:
                break
            if iterations >= self.config.max_while_iters:
                self._diag(DiagnosticCode.E_PP_WHILE_LIMIT, directive.span,
                           f"'#while' exceeded {self.config.max_while_iters} iterations")
                break
            iterations += 1
            self.process_lines(body, out)
        logger.debug(f"#while at {directive.span.location()} ran {iterations} iterations")

    # -- directives -----------------------------------------------------------

    def _directive(self, name: str, directive: Token, args: List[Token], out: List[Token]) -> None:
        if name == "define":
            self._define(directive, args)
        elif name == "defeval":
            self._defeval(directive, args)
        elif name == "undef":
            macro = self._macro_name(args, directive)
            if macro is not None:
                self.macros.pop(macro, None)
        elif name == "include":
            self._include(directive, args, out)
        elif name == "error":
            self._diag(DiagnosticCode.E_PP_ERROR, directive.span, "#error " + self._text_of(args))
        elif name == "warning":
            self._diag(DiagnosticCode.W_PP_WARNING, directive.span, "#warning " + self._text_of(args),
                       Severity.WARNING)
        elif name == "pragma":
            self._diag(DiagnosticCode.N_PRAGMA_IGNORED, directive.span, "#pragma ignored", Severity.NOTE)
        elif name == "":
            pass
        else:
            self._diag(DiagnosticCode.E_PP_UNKNOWN_DIRECTIVE, directive.span, f"unknown directive '#{name}'")

    @staticmethod
    def _text_of(tokens: List[Token]) -> str:
        return "".join(t.text for t in tokens)

    def _macro_name(self, args: List[Token], directive: Token) -> Optional[str]:
        sig = significant(args)
        if not sig or sig[0].kind not in (TokenKind.IDENTIFIER, TokenKind.KEYWORD):
            self._diag(DiagnosticCode.E_PP_BAD_EXPR, directive.span, f"'#{directive.value}' needs a macro name")
            return None
        return sig[0].value

    def _install(self, macro: MacroDef) -> None:
        previous = self.macros.get(macro.name)
        if previous is not None and not previous.same_as(macro):
            evaluated_update = previous.kind == "evaluated" and macro.kind == "evaluated"
            if not evaluated_update:
                self._diag(DiagnosticCode.E_PP_REDEFINED, macro.span,
                           f"macro '{macro.name}' redefined without '#undef'")
        self.macros[macro.name] = macro
        logger.debug(f"Defined {macro.kind} macro {macro.name}")

    def _define(self, directive: Token, args: List[Token]) -> None:
        name = self._macro_name(args, directive)
        if name is None:
            return
        sig = significant(args)
        head = sig[0]
        rest = sig[1:]
        params: List[str] = []
        variadic = False
        kind = "object"
        if rest and rest[0].is_punct("(") and rest[0].span.byte_start == head.span.byte_end:
            kind = "function"
            k = 1
            while k < len(rest) and not rest[k].is_punct(")"):
                tok = rest[k]
                if tok.is_punct("..."):
                    params.append(VA_ARGS)
                    variadic = True
                elif tok.kind in (TokenKind.IDENTIFIER, TokenKind.KEYWORD):
                    params.append(tok.value)
                elif not tok.is_punct(","):
                    self._diag(DiagnosticCode.E_PP_BAD_EXPR, tok.span, f"bad parameter list for macro '{name}'")
                    return
                k += 1
            if k >= len(rest):
                self._diag(DiagnosticCode.E_PP_BAD_EXPR, head.span, f"missing ')' in macro '{name}' parameters")
                return
            rest = rest[k + 1:]
        self._install(MacroDef(name=name, kind=kind, body=rest, params=params,
                               variadic=variadic, span=directive.span.merge(head.span)))

    def _defeval(self, directive: Token, args: List[Token]) -> None:
        name = self._macro_name(args, directive)
        if name is None:
            return
        expr = significant(args)[1:]
        try:
            value = eval_pp_expr(expr, self.macros, self.facts, self.trace, self.expand, directive.span)
        except PpExprError as e:
            self._diag(DiagnosticCode.E_PP_BAD_EXPR, e.span, e.message)
            return
        body = relex(str(value).encode(), directive.span)
        self._install(MacroDef(name=name, kind="evaluated", body=body, span=directive.span))

    def _eval(self, tokens: List[Token], span: Span) -> int:
        try:
            return eval_pp_expr(tokens, self.macros, self.facts, self.trace, self.expand, span)
        except PpExprError as e:
            self._diag(DiagnosticCode.E_PP_BAD_EXPR, e.span, e.message)
            return 0

    # -- include --------------------------------------------------------------

    def _include(self, directive: Token, args: List[Token], out: List[Token]) -> None:
        sig = significant(args)
        if sig and sig[0].kind not in (TokenKind.STRING_LITERAL,) and not sig[0].is_punct("<"):
            sig = significant(self.expand(sig))
        if not sig:
            self._diag(DiagnosticCode.E_PP_INCLUDE, directive.span, "'#include' needs a file name")
            return
        system = sig[0].is_punct("<")
        if system:
            closing = next((k for k, t in enumerate(sig) if t.is_punct(">")), None)
            if closing is None:
                self._diag(DiagnosticCode.E_PP_INCLUDE, directive.span, "malformed '#include <...>'")
                return
            name = "".join(t.text for t in sig[1:closing])
        elif sig[0].kind == TokenKind.STRING_LITERAL:
            name = sig[0].value.decode("utf-8", "surrogateescape")
        else:
            self._diag(DiagnosticCode.E_PP_INCLUDE, directive.span, "malformed '#include'")
            return

        if len(self.file_stack) > self.config.max_include_depth:
            self._diag(DiagnosticCode.E_PP_INCLUDE, directive.span,
                       f"'#include' nested deeper than {self.config.max_include_depth}")
            return
        path = self._resolve_include(name, system)
        if path is None:
            if system:
                self._diag(DiagnosticCode.N_SYSTEM_INCLUDE, directive.span,
                           f"system header <{name}> ignored; the runtime provides the library", Severity.NOTE)
            else:
                self._diag(DiagnosticCode.E_PP_INCLUDE, directive.span, f"include file '{name}' not found")
            return

        logger.info(f"Including {path}")
        data = path.read_bytes()
        tokens, lex_diags = lex(data, self.lex_config, str(path))
        self.diagnostics.extend(lex_diags)
        self.file_stack.append(path)
        self.file_ids.append(str(path))
        try:
            self.process_lines(split_lines(tokens), out)
        finally:
            self.file_stack.pop()
            self.file_ids.pop()

    def _resolve_include(self, name: str, system: bool) -> Optional[Path]:
        candidates: List[Path] = []
        current = self.file_stack[-1]
        if not system:
            candidates.append((current.parent if current else Path.cwd()) / name)
        candidates.extend(Path(p) / name for p in self.config.include_paths)
        for candidate in candidates:
            if candidate.is_file():
                return candidate
        return None

    # -- macro expansion ------------------------------------------------------

    def expand(self, tokens: List[Token], hide: FrozenSet[str] = frozenset()) -> List[Token]:
        """
        Expand macros. A replacement goes back in front of the remaining input
        and is rescanned with it; each pending token carries the names it may
        no longer expand (painted blue).
        """
        pending: List[Token] = list(tokens)
        hides: List[FrozenSet[str]] = [hide] * len(pending)
        out: List[Token] = []
        i = 0
        while i < len(pending):
            tok = pending[i]
            painted = hides[i]
            if tok.kind != TokenKind.IDENTIFIER:
                out.append(tok)
                i += 1
                continue
            name = tok.value
            if name == "__LINE__":
                out.append(make_int_token(tok.span.line, tok.span))
                i += 1
                continue
            if name == "__FILE__":
                out.append(make_string_token(self.file_ids[-1], tok.span))
                i += 1
                continue
            macro = self.macros.get(name)
            if macro is None or name in painted:
                out.append(tok)
                i += 1
                continue
            if macro.kind != "function":
                body = [b.at(tok.span) for b in macro.body]
                pending[i:i + 1] = body
                hides[i:i + 1] = [painted | {name}] * len(body)
                continue
            j = i + 1
            while j < len(pending) and pending[j].is_trivia:
                j += 1
            if j >= len(pending) or not pending[j].is_punct("("):
                out.append(tok)
                i += 1
                continue
            collected = self._collect_args(pending, j)
            if collected is None:
                self._diag(DiagnosticCode.E_PP_MACRO_ARGS, tok.span, f"unterminated invocation of macro '{name}'")
                out.append(tok)
                i += 1
                continue
            args, end = collected
            args = self._fit_args(macro, args, tok)
            if args is None:
                out.append(tok)
                i = end
                continue
            replacement = self._substitute(macro, args, tok, painted)
            pending[i:end] = replacement
            hides[i:end] = [painted | {name}] * len(replacement)
        return out

    def _collect_args(self, tokens: List[Token], open_index: int) -> Optional[Tuple[List[List[Token]], int]]:
        args: List[List[Token]] = []
        current: List[Token] = []
        depth = 1
        i = open_index + 1
        while i < len(tokens):
            tok = tokens[i]
            if tok.is_punct("("):
                depth += 1
            elif tok.is_punct(")"):
                depth -= 1
                if depth == 0:
                    args.append(_strip(current))
                    return args, i + 1
            elif tok.is_punct(",") and depth == 1:
                args.append(_strip(current))
                current = []
                i += 1
                continue
            current.append(tok)
            i += 1
        return None

    def _fit_args(self, macro: MacroDef, args: List[List[Token]], site: Token) -> Optional[List[List[Token]]]:
        if not macro.params and len(args) == 1 and not args[0]:
            return []
        if macro.variadic:
            fixed = len(macro.params) - 1
            if len(args) < fixed:
                self._diag(DiagnosticCode.E_PP_MACRO_ARGS, site.span,
                           f"macro '{macro.name}' needs at least {fixed} arguments")
                return None
            rest: List[Token] = []
            for k, arg in enumerate(args[fixed:]):
                if k:
                    rest.extend(relex(b",", site.span))
                rest.extend(arg)
            return args[:fixed] + [rest]
        if len(args) != len(macro.params):
            self._diag(DiagnosticCode.E_PP_MACRO_ARGS, site.span,
                       f"macro '{macro.name}' takes {len(macro.params)} arguments, got {len(args)}")
            return None
        return args

    def _substitute(self, macro: MacroDef, args: List[List[Token]], site: Token, hide: FrozenSet[str]) -> List[Token]:
        body = macro.body
        result: List[Token] = []
        expanded: Dict[int, List[Token]] = {}
        k = 0
        while k < len(body):
            tok = body[k]
            if (tok.is_punct("#") and k + 1 < len(body) and body[k + 1].kind == TokenKind.IDENTIFIER
                    and body[k + 1].value in macro.params):
                index = macro.params.index(body[k + 1].value)
                result.append(self._stringize(args[index], site.span))
                k += 2
                continue
            if tok.kind == TokenKind.IDENTIFIER and tok.value in macro.params:
                index = macro.params.index(tok.value)
                pasted = (k > 0 and body[k - 1].is_punct("##")) or (k + 1 < len(body) and body[k + 1].is_punct("##"))
                if pasted:
                    result.extend(significant(args[index]))
                else:
                    if index not in expanded:
                        expanded[index] = significant(self.expand(args[index], hide))
                    result.extend(expanded[index])
                k += 1
                continue
            result.append(tok)
            k += 1
        return [t.at(site.span) for t in self._paste(result, site)]

    def _paste(self, tokens: List[Token], site: Token) -> List[Token]:
        out: List[Token] = []
        k = 0
        while k < len(tokens):
            tok = tokens[k]
            if tok.is_punct("##"):
                if not out or k + 1 >= len(tokens):
                    k += 1
                    continue
                left = out.pop()
                right = tokens[k + 1]
                fused = relex(left.lexeme + right.lexeme, site.span)
                if len(fused) == 1:
                    out.append(fused[0])
                else:
                    self._diag(DiagnosticCode.E_PP_BAD_PASTE, site.span,
                               f"pasting '{left.text}' and '{right.text}' does not give one token")
                    out.extend([left, right])
                k += 2
                continue
            out.append(tok)
            k += 1
        return out

    @staticmethod
    def _stringize(arg: List[Token], span: Span) -> Token:
        parts: List[str] = []
        pending_space = False
        for tok in _strip(arg):
            if tok.is_trivia:
                pending_space = True
                continue
            if pending_space and parts:
                parts.append(" ")
            pending_space = False
            text = tok.text
            if tok.kind in (TokenKind.STRING_LITERAL, TokenKind.CHAR_LITERAL):
                text = _escape_for_string(text)
            parts.append(text)
        content = "".join(parts)
        lexeme = ('"' + content + '"').encode("utf-8", "surrogateescape")
        decoded_tokens = relex(lexeme, span)
        value = decoded_tokens[0].value if len(decoded_tokens) == 1 else content.encode()
        return Token(TokenKind.STRING_LITERAL, lexeme, span, value)


def preprocess(
    tokens: List[Token],
    facts: CodeFacts,
    config: Optional[PpConfig] = None,
    lex_config: Optional[LexConfig] = None,
    source_path: Optional[Path] = None,
) -> Tuple[List[Token], List[PredicateRecord], List[Diagnostic]]:
    """Run every directive, expand macros, and drop excluded regions."""
    pp = Preprocessor(facts, config, lex_config, source_path)
    output = pp.run(tokens)
    logger.info(f"Preprocessed {len(tokens)} tokens into {len(output)} "
                f"({len(pp.trace)} predicate consultations)")
    return output, pp.trace, pp.diagnostics


def run_while(
    block: List[Token],
    macros: Dict[str, MacroDef],
    facts: CodeFacts,
    config: Optional[PpConfig] = None,
) -> Tuple[List[Token], List[Diagnostic]]:
    """
    Execute one `#while ... #endwhile` block against a macro table.

    `block` starts at the `#while` line and ends with the `#endwhile` line.
    """
    pp = Preprocessor(facts, config, macros=macros)
    out: List[Token] = []
    pp.process_lines(split_lines(block), out)
    macros.clear()
    macros.update(pp.macros)
    return out, pp.diagnostics


def _needs_space(prev: Token, cur: Token) -> bool:
    a, b = prev.text[-1:], cur.text[:1]
    if not a or not b:
        return False
    if (a.isalnum() or a == "_" or ord(a) > 127) and (b.isalnum() or b == "_" or ord(b) > 127):
        return True
    if prev.kind == TokenKind.PUNCTUATOR and cur.kind == TokenKind.PUNCTUATOR:
        return (a + b) in TWO_CHAR_PREFIXES or (a == b and a in "+-")
    return False


def format_source(tokens: List[Token]) -> str:
    """Render a token stream as re-lexable source text."""
    parts: List[str] = []
    prev: Optional[Token] = None
    for tok in tokens:
        if tok.kind == TokenKind.EOF:
            break
        if tok.is_trivia:
            parts.append(tok.text)
            prev = None
            continue
        if prev is not None and _needs_space(prev, tok):
            parts.append(" ")
        parts.append(tok.text)
        prev = tok
    return "".join(parts)


class PreprocessorTool(BaseTool):
    """
    Runs the directive language, including `#while` / `#defeval` and the
    `declared` / `coded` / `used` predicates, against a set of code facts.
    """

    def validate_params(self, tokens: Any = None, **kwargs) -> bool:
        return isinstance(tokens, (list, tuple)) and all(isinstance(t, Token) for t in tokens)

    def execute(self, tokens: List[Token], facts: Optional[CodeFacts] = None,
                config: Optional[PpConfig] = None, lex_config: Optional[LexConfig] = None,
                source_path: Optional[Path] = None) -> ToolResult:
        if not self.validate_params(tokens=tokens):
            return ToolResult(success=False, error="tokens must be a sequence of Token")
        try:
            output, trace, diagnostics = preprocess(tokens, facts or CodeFacts.assume_all(),
                                                    config, lex_config, source_path)
            return ToolResult.from_diagnostics({"tokens": output, "trace": trace}, diagnostics)
        except Exception as e:
            logger.error(f"Error in preprocessor: {str(e)}", exc_info=True)
            return ToolResult(success=False, error=str(e))

    def format_result(self, data: Dict[str, Any]) -> str:
        return format_source(data["tokens"])


# Create singleton instance
preprocessor_tool = PreprocessorTool()
