import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Tuple

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from services.console_service import console_service, display_name
from state.diagnostics import has_errors
from state.state import AtcConfig, load_config
from workflows.corpus_runner import run_corpus
from workflows.workflow import CompileWorkflow

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

LOG_LEVELS = {0: None, 1: logging.INFO, 2: logging.DEBUG}


def stage_options(fn: Callable) -> Callable:
    """Flags shared by every command."""
    options = [
        click.option("--argeval", type=click.Choice(["left", "right"]), default=None,
                     help="Argument evaluation order (left = ccall, right = cdecl)."),
        click.option("--ambiguous", type=click.Choice(["error", "warn"]), default=None,
                     help="Severity of ambiguous +/- runs such as i+++j."),
        click.option("--max-pp-iters", type=int, default=None, help="Fixpoint iteration cap."),
        click.option("--max-while-iters", type=int, default=None, help="#while iteration cap."),
        click.option("--step-limit", type=int, default=None, help="Evaluator step cap."),
        click.option("-I", "include", multiple=True, help="Include search directory (repeatable)."),
        click.option("--pp-trace", is_flag=True, help="Print predicate consultations to stderr."),
        click.option("-v", "--verbose", count=True, help="Log progress (-vv for debug)."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def build_config(params: Dict[str, Any]) -> AtcConfig:
    try:
        config = load_config().with_overrides(
            arg_order=params.get("argeval"),
            ambiguous=params.get("ambiguous"),
            max_pp_iters=params.get("max_pp_iters"),
            max_while_iters=params.get("max_while_iters"),
            step_limit=params.get("step_limit"),
            include_paths=list(params.get("include") or ()),
        )
    except (ValidationError, ValueError) as e:
        raise click.UsageError(f"invalid option value: {e}")
    level = LOG_LEVELS.get(min(params.get("verbose") or 0, 2)) or config.logging.level
    logging.basicConfig(level=level, format=config.logging.format, force=True)
    return config


def _inputs(paths: Tuple[str, ...]) -> Tuple[str, ...]:
    if not paths:
        raise click.UsageError("at least one input file (or '-') is required")
    return paths


def _error_status(config: AtcConfig, failed: bool) -> int:
    return config.cli.compile_error_status if failed else 0


@click.group()
def cli() -> None:
    """The @C dialect toolchain: lexer, fixpoint preprocessor, parser and interpreter."""


@cli.command()
@stage_options
@click.argument("inputs", nargs=-1, type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.pass_context
def run(ctx: click.Context, inputs: Tuple[str, ...], **params: Any) -> None:
    """Compile and execute programs; the exit status is main's return value."""
    config = build_config(params)
    workflow = CompileWorkflow(config)
    for path in _inputs(inputs):
        stream = console_service.output_stream()
        status, diagnostics, state = workflow.run(console_service.read_source(path), display_name(path), stream)
        stream.flush()
        if params["pp_trace"]:
            console_service.report_trace(state.get("trace", []))
        console_service.report(diagnostics)
        if status != 0:
            ctx.exit(status & 0xFF)


@cli.command()
@stage_options
@click.argument("inputs", nargs=-1, type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.pass_context
def check(ctx: click.Context, inputs: Tuple[str, ...], **params: Any) -> None:
    """Report diagnostics only."""
    config = build_config(params)
    workflow = CompileWorkflow(config)
    failed = False
    for path in _inputs(inputs):
        state = workflow.compile(console_service.read_source(path), display_name(path))
        if params["pp_trace"]:
            console_service.report_trace(state.get("trace", []))
        console_service.report(state["diagnostics"])
        failed = failed or has_errors(state["diagnostics"])
    ctx.exit(_error_status(config, failed))


@cli.command()
@stage_options
@click.argument("source", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.pass_context
def lex(ctx: click.Context, source: str, **params: Any) -> None:
    """Dump the token stream, trivia included."""
    config = build_config(params)
    dump, diagnostics = CompileWorkflow(config).lex_dump(console_service.read_source(source), display_name(source))
    click.echo(dump, nl=False)
    console_service.report(diagnostics)
    ctx.exit(_error_status(config, has_errors(diagnostics)))


@cli.command()
@stage_options
@click.argument("source", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.pass_context
def pp(ctx: click.Context, source: str, **params: Any) -> None:
    """Print the converged preprocessor output as source text."""
    config = build_config(params)
    text, state = CompileWorkflow(config).pp_dump(console_service.read_source(source), display_name(source))
    console_service.write_output(text.encode("utf-8", "surrogateescape"))
    if params["pp_trace"]:
        console_service.report_trace(state.get("trace", []))
    console_service.report(state["diagnostics"])
    ctx.exit(_error_status(config, has_errors(state["diagnostics"])))


@cli.command()
@stage_options
@click.argument("source", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.pass_context
def ast(ctx: click.Context, source: str, **params: Any) -> None:
    """Print the syntax tree as S-expressions."""
    config = build_config(params)
    dump, state = CompileWorkflow(config).ast_dump(console_service.read_source(source), display_name(source))
    click.echo(dump, nl=False)
    if params["pp_trace"]:
        console_service.report_trace(state.get("trace", []))
    console_service.report(state["diagnostics"])
    ctx.exit(_error_status(config, has_errors(state["diagnostics"])))


@cli.command()
@stage_options
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--accept", is_flag=True, help="Rewrite .expect files from actual output.")
@click.option("-j", "--jobs", type=int, default=1, show_default=True, help="Cases run in parallel.")
@click.pass_context
def test(ctx: click.Context, directory: str, accept: bool, jobs: int, **params: Any) -> None:
    """Run a golden corpus directory."""
    config = build_config(params)
    summary = run_corpus(Path(directory), config, accept=accept, jobs=max(jobs, 1))
    click.echo(summary.render(), nl=False)
    ctx.exit(0 if summary.ok else 1)


def main(argv=None) -> int:
    try:
        result = cli.main(args=argv, prog_name="atc", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
