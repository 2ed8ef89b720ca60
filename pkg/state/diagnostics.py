from enum import Enum
from typing import List, Optional
from pydantic import BaseModel, ConfigDict

from state.span import Span


class Severity(str, Enum):
    """Diagnostic severity."""
    ERROR = "error"
    WARNING = "warning"
    NOTE = "note"


class DiagnosticCode(str, Enum):
    """
    Closed set of diagnostic codes.

    Tests and the golden corpus assert on these codes, never on message text.
    """
    # lexer
    E_UNTERMINATED_BLOCK_COMMENT = "E_UNTERMINATED_BLOCK_COMMENT"
    E_UNTERMINATED_STRING = "E_UNTERMINATED_STRING"
    E_AMBIGUOUS_PUNCT = "E_AMBIGUOUS_PUNCT"
    E_BAD_LITERAL = "E_BAD_LITERAL"
    E_BAD_ENCODING = "E_BAD_ENCODING"
    E_BAD_ESCAPE = "E_BAD_ESCAPE"
    E_STRAY_CHAR = "E_STRAY_CHAR"

    # preprocessor
    E_PP_UNTERMINATED_COND = "E_PP_UNTERMINATED_COND"
    E_PP_STRAY_ELSE_ENDIF = "E_PP_STRAY_ELSE_ENDIF"
    E_PP_REDEFINED = "E_PP_REDEFINED"
    E_PP_WHILE_LIMIT = "E_PP_WHILE_LIMIT"
    E_PP_BAD_EXPR = "E_PP_BAD_EXPR"
    E_PP_FIXPOINT_DIVERGE = "E_PP_FIXPOINT_DIVERGE"
    E_PP_MACRO_ARGS = "E_PP_MACRO_ARGS"
    E_PP_BAD_PASTE = "E_PP_BAD_PASTE"
    E_PP_INCLUDE = "E_PP_INCLUDE"
    E_PP_UNKNOWN_DIRECTIVE = "E_PP_UNKNOWN_DIRECTIVE"
    E_PP_ERROR = "E_PP_ERROR"
    W_PP_WARNING = "W_PP_WARNING"
    N_PRAGMA_IGNORED = "N_PRAGMA_IGNORED"
    N_SYSTEM_INCLUDE = "N_SYSTEM_INCLUDE"

    # parser / binder
    E_PARSE = "E_PARSE"
    E_FLEX_NOT_LAST = "E_FLEX_NOT_LAST"
    E_UNDECLARED = "E_UNDECLARED"
    E_REDEFINITION = "E_REDEFINITION"
    E_UNRESOLVED_LABEL = "E_UNRESOLVED_LABEL"
    E_GOTO_INTO_SCOPE = "E_GOTO_INTO_SCOPE"
    E_TYPE = "E_TYPE"
    N_VOLATILE_IGNORED = "N_VOLATILE_IGNORED"

    # evaluator
    E_ESCAPED_NESTED = "E_ESCAPED_NESTED"
    E_OOB_INDEX = "E_OOB_INDEX"
    E_DIV_ZERO = "E_DIV_ZERO"
    E_SIZEOF_UNSIZED = "E_SIZEOF_UNSIZED"
    E_STEP_LIMIT = "E_STEP_LIMIT"
    E_NO_MAIN = "E_NO_MAIN"
    E_BAD_FORMAT = "E_BAD_FORMAT"

    E_INTERNAL = "E_INTERNAL"


RUNTIME_CODES = frozenset({
    DiagnosticCode.E_ESCAPED_NESTED,
    DiagnosticCode.E_OOB_INDEX,
    DiagnosticCode.E_DIV_ZERO,
    DiagnosticCode.E_SIZEOF_UNSIZED,
    DiagnosticCode.E_STEP_LIMIT,
    DiagnosticCode.E_NO_MAIN,
    DiagnosticCode.E_BAD_FORMAT,
    DiagnosticCode.E_TYPE,
})


class Diagnostic(BaseModel):
    """A coded message attached to a source span."""
    model_config = ConfigDict(frozen=True)

    code: DiagnosticCode
    severity: Severity
    span: Span
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity == Severity.ERROR

    def render(self) -> str:
        """Render as `CODE: message @ file:line:col`."""
        text = f"{self.code.value}: {self.message} @ {self.span.location()}"
        if self.severity != Severity.ERROR:
            return f"{self.severity.value}: {text}"
        return text


def error(code: DiagnosticCode, span: Span, message: str) -> Diagnostic:
    return Diagnostic(code=code, severity=Severity.ERROR, span=span, message=message)


def has_errors(diagnostics: List[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


def codes(diagnostics: List[Diagnostic], include_notes: bool = False) -> List[str]:
    """Codes in emission order, notes excluded unless asked for."""
    return [
        d.code.value for d in diagnostics
        if include_notes or d.severity != Severity.NOTE
    ]


class AtcRuntimeError(Exception):
    """Aborts evaluation; rendered by the workflow as `CODE: message @ file:line:col`."""

    def __init__(self, code: DiagnosticCode, span: Optional[Span], message: str):
        super().__init__(message)
        self.code = code
        self.span = span
        self.message = message

    def to_diagnostic(self) -> Diagnostic:
        return error(self.code, self.span or Span.unknown(), self.message)
