import logging
import os
from typing import BinaryIO, Iterable, List, Optional

import click
from dotenv import load_dotenv

from state.diagnostics import Diagnostic, Severity
from state.state import PredicateRecord

logger = logging.getLogger(__name__)

SEVERITY_COLORS = {
    Severity.ERROR: "red",
    Severity.WARNING: "yellow",
    Severity.NOTE: "cyan",
}


class ConsoleService:
    """Diagnostic rendering on the error stream and raw program output."""

    def __init__(self):
        load_dotenv()

    @property
    def color(self) -> Optional[bool]:
        """`ATC_COLOR=1` forces color, `0` disables it; unset colors only a terminal."""
        setting = os.getenv("ATC_COLOR")
        if setting is None:
            return None
        return setting.strip() == "1"

    def render(self, diagnostic: Diagnostic) -> str:
        text = diagnostic.render()
        if self.color is False:
            return text
        code = diagnostic.code.value
        return text.replace(code, click.style(code, fg=SEVERITY_COLORS[diagnostic.severity], bold=True), 1)

    def report(self, diagnostics: Iterable[Diagnostic]) -> None:
        for diagnostic in diagnostics:
            click.echo(self.render(diagnostic), err=True, color=self.color)

    def report_trace(self, traces: List[List[PredicateRecord]]) -> None:
        """`ITER<TAB>PREDICATE<TAB>IDENT<TAB>VALUE`, iterations numbered from 1."""
        for iteration, trace in enumerate(traces, start=1):
            for record in trace:
                click.echo(f"{iteration}\t{record.predicate}\t{record.name}\t{int(record.value)}", err=True)

    @staticmethod
    def output_stream() -> BinaryIO:
        return click.get_binary_stream("stdout")

    def write_output(self, data: bytes) -> None:
        stream = self.output_stream()
        stream.write(data)
        stream.flush()

    @staticmethod
    def read_source(path: str) -> bytes:
        """Source bytes of `path`, or standard input for `-`."""
        if path == "-":
            return click.get_binary_stream("stdin").read()
        with open(path, "rb") as f:
            return f.read()


def display_name(path: str) -> str:
    return "<stdin>" if path == "-" else path


# Create singleton instance
console_service = ConsoleService()
