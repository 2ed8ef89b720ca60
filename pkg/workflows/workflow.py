import io
import logging
from pathlib import Path
from typing import BinaryIO, List, Optional, Tuple

from state.diagnostics import (
    AtcRuntimeError, Diagnostic, DiagnosticCode, error, has_errors,
)
from state.span import Span
from state.state import AtcConfig, CodeFacts, CompileState, PredicateRecord, load_config
from tools.binder import bind
from tools.lexer import lex, lexer_tool
from tools.parser import parse, parser_tool
from tools.preprocessor import preprocess, preprocessor_tool
from runtime.evaluator import run as evaluate

logger = logging.getLogger(__name__)


def _consistent(trace: List[PredicateRecord], facts: CodeFacts) -> bool:
    return all(facts.query(record.predicate, record.name) == record.value for record in trace)


def fixpoint_compile(
    source: bytes,
    config: Optional[AtcConfig] = None,
    file_name: str = "<input>",
) -> CompileState:
    """
    Alternate preprocessing and parse/bind until every consulted predicate
    agrees with the facts of the program it produced.

    The first iteration assumes every predicate true. Diagnostics of the
    preprocessor, parser and binder come from the last iteration only.
    """
    config = config or load_config()
    source_path = Path(file_name) if file_name not in ("<input>", "<stdin>") else None
    tokens, lex_diags = lex(source, config.lexer, file_name)

    facts = CodeFacts.assume_all()
    traces: List[List[PredicateRecord]] = []
    state: CompileState = {"file_name": file_name, "source": source, "trace": []}
    for iteration in range(1, config.preprocessor.max_fixpoint_iters + 1):
        output, trace, pp_diags = preprocess(tokens, facts, config.preprocessor, config.lexer, source_path)
        unit, parse_diags = parse(output)
        table, actual, bind_diags = bind(unit)
        traces.append(trace)
        state.update({
            "tokens": output, "unit": unit, "symbols": table, "facts": actual, "iterations": iteration,
            "diagnostics": lex_diags + pp_diags + parse_diags + bind_diags,
        })
        if _consistent(trace, actual):
            logger.info(f"Fixpoint reached after {iteration} iteration(s) for {file_name}")
            break
        logger.info(f"Iteration {iteration}: predicate assumptions disagree with the program, retrying")
        facts = actual
    else:
        limit = config.preprocessor.max_fixpoint_iters
        span = tokens[0].span if tokens else Span.unknown()
        state["diagnostics"] = state["diagnostics"] + [
            error(DiagnosticCode.E_PP_FIXPOINT_DIVERGE, span,
                  f"predicate facts did not settle within {limit} iterations")
        ]
    state["trace"] = traces
    return state


class CompileWorkflow:
    """Runs the stages for one source and converts failures into diagnostics."""

    def __init__(self, config: Optional[AtcConfig] = None):
        self.config = config or load_config()

    def _internal(self, file_name: str, exc: Exception) -> Diagnostic:
        logger.error(f"Internal error compiling {file_name}: {str(exc)}", exc_info=True)
        return error(DiagnosticCode.E_INTERNAL, Span.unknown(file_name), f"internal error: {exc}")

    def compile(self, source: bytes, file_name: str = "<input>") -> CompileState:
        try:
            return fixpoint_compile(source, self.config, file_name)
        except Exception as e:
            return {"file_name": file_name, "source": source, "trace": [], "iterations": 0,
                    "diagnostics": [self._internal(file_name, e)], "error": str(e)}

    def check(self, source: bytes, file_name: str = "<input>") -> List[Diagnostic]:
        return self.compile(source, file_name)["diagnostics"]

    def run(self, source: bytes, file_name: str = "<input>",
            output: Optional[BinaryIO] = None) -> Tuple[int, List[Diagnostic], CompileState]:
        """Compile and execute; the status is main's value, or the compile/runtime error status."""
        state = self.compile(source, file_name)
        diagnostics = list(state["diagnostics"])
        if has_errors(diagnostics):
            return self.config.cli.compile_error_status, diagnostics, state
        sink = output if output is not None else io.BytesIO()
        try:
            status = evaluate(state["unit"], state["symbols"], self.config.evaluator, sink)
        except AtcRuntimeError as e:
            logger.info(f"Runtime error {e.code.value} in {file_name}")
            diagnostics.append(e.to_diagnostic())
            return self.config.cli.runtime_error_status, diagnostics, state
        except Exception as e:
            diagnostics.append(self._internal(file_name, e))
            return self.config.cli.runtime_error_status, diagnostics, state
        return status, diagnostics, state

    # -- stage dumps ----------------------------------------------------------

    def lex_dump(self, source: bytes, file_name: str = "<input>") -> Tuple[str, List[Diagnostic]]:
        result = lexer_tool.execute(source, file_name, self.config.lexer)
        if result.data is None:
            return "", [self._internal(file_name, RuntimeError(result.error))]
        return lexer_tool.format_result(result.data), result.diagnostics

    def pp_dump(self, source: bytes, file_name: str = "<input>") -> Tuple[str, CompileState]:
        state = self.compile(source, file_name)
        return preprocessor_tool.format_result({"tokens": state.get("tokens", [])}), state

    def ast_dump(self, source: bytes, file_name: str = "<input>") -> Tuple[str, CompileState]:
        state = self.compile(source, file_name)
        unit = state.get("unit")
        return (parser_tool.format_result({"unit": unit}) if unit is not None else ""), state


def run_source(source: bytes, config: Optional[AtcConfig] = None,
               file_name: str = "<input>") -> Tuple[int, bytes, List[Diagnostic]]:
    """Compile and run one program into a private buffer."""
    buffer = io.BytesIO()
    status, diagnostics, _ = CompileWorkflow(config).run(source, file_name, buffer)
    return status, buffer.getvalue(), diagnostics
