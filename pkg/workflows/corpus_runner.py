"""
Golden corpus runner.

A case is `name.atc` (or any configured source extension) plus optional siblings:

  name.expect   expected standard output, compared byte for byte
  name.diag     expected error and warning codes, one per line, in order
  name.flags    command-line flags for this case only
  name.status   expected exit status

Without `.status`, the status is derived from `.diag`: 1 when a compile
error is listed, 101 when only runtime errors are listed, 0 otherwise.
"""
import logging
import shlex
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import click
from pydantic import BaseModel, Field

from state.diagnostics import RUNTIME_CODES, DiagnosticCode, codes
from state.state import AtcConfig, load_config
from workflows.workflow import run_source

logger = logging.getLogger(__name__)

RUNTIME_ONLY = frozenset(code.value for code in RUNTIME_CODES) - {DiagnosticCode.E_TYPE.value}


class CaseVerdict(BaseModel):
    name: str
    verdict: Literal["PASS", "FAIL", "ERROR"]
    detail: str

    def line(self) -> str:
        return f"{self.verdict}\t{self.name}\t{self.detail}"


class CorpusSummary(BaseModel):
    verdicts: List[CaseVerdict] = Field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for v in self.verdicts if v.verdict == "PASS")

    @property
    def failed(self) -> int:
        return len(self.verdicts) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def render(self) -> str:
        lines = [v.line() for v in self.verdicts]
        lines.append(f"{self.passed} passed, {self.failed} failed")
        return "\n".join(lines) + "\n"


@click.command(name="case-flags", add_help_option=False)
@click.option("--argeval", type=click.Choice(["left", "right"]))
@click.option("--ambiguous", type=click.Choice(["error", "warn"]))
@click.option("--max-pp-iters", type=int)
@click.option("--max-while-iters", type=int)
@click.option("--step-limit", type=int)
@click.option("-I", "include", multiple=True)
@click.option("--pp-trace", is_flag=True)
def case_flags(**params: Any) -> Dict[str, Any]:
    return params


def parse_case_flags(text: str) -> Dict[str, Any]:
    """Parse a `.flags` file; unknown or malformed flags raise click.UsageError."""
    ctx = case_flags.make_context("case-flags", shlex.split(text))
    return dict(ctx.params)


def case_config(base: AtcConfig, flags: Dict[str, Any], directory: Path) -> AtcConfig:
    includes = [str(directory / path) for path in flags.get("include") or ()]
    return base.with_overrides(
        arg_order=flags.get("argeval"),
        ambiguous=flags.get("ambiguous"),
        max_pp_iters=flags.get("max_pp_iters"),
        max_while_iters=flags.get("max_while_iters"),
        step_limit=flags.get("step_limit"),
        include_paths=includes,
    )


def expected_status(expected_codes: List[str]) -> int:
    errors = [c for c in expected_codes if c.startswith("E_")]
    if any(c not in RUNTIME_ONLY for c in errors):
        return 1
    if errors:
        return 101
    return 0


def first_difference(expected: bytes, actual: bytes) -> int:
    for offset, (a, b) in enumerate(zip(expected, actual)):
        if a != b:
            return offset
    return min(len(expected), len(actual))


def run_case(source_path: Path, base: AtcConfig, accept: bool = False) -> CaseVerdict:
    name = source_path.stem
    sibling = source_path.with_suffix

    try:
        flags_path = sibling(".flags")
        flags = parse_case_flags(flags_path.read_text()) if flags_path.exists() else {}
        config = case_config(base, flags, source_path.parent)
    except (click.UsageError, ValueError) as e:
        return CaseVerdict(name=name, verdict="ERROR", detail=f"bad flags: {e}")

    diag_path = sibling(".diag")
    expected_codes = diag_path.read_text().split() if diag_path.exists() else []
    status_path = sibling(".status")
    try:
        want_status = int(status_path.read_text().strip()) if status_path.exists() else expected_status(expected_codes)
    except ValueError:
        return CaseVerdict(name=name, verdict="ERROR", detail="unreadable .status")

    status, output, diagnostics = run_source(source_path.read_bytes(), config, str(source_path))

    expect_path = sibling(".expect")
    if accept:
        expect_path.write_bytes(output)
        logger.info(f"Accepted output of {name} ({len(output)} bytes)")
    if expect_path.exists():
        want_output: Optional[bytes] = expect_path.read_bytes()
    elif want_status == 1:
        want_output = b""
    else:
        return CaseVerdict(name=name, verdict="ERROR", detail="missing .expect")

    got_codes = codes(diagnostics)
    if got_codes != expected_codes:
        return CaseVerdict(name=name, verdict="FAIL",
                           detail=f"diagnostics {' '.join(got_codes) or '-'} != {' '.join(expected_codes) or '-'}")
    if output != want_output:
        offset = first_difference(want_output, output)
        return CaseVerdict(name=name, verdict="FAIL",
                           detail=f"stdout differs at byte {offset} "
                                  f"(expected {len(want_output)} bytes, got {len(output)})")
    if status != want_status:
        return CaseVerdict(name=name, verdict="FAIL", detail=f"exit status {status} != {want_status}")
    return CaseVerdict(name=name, verdict="PASS", detail=f"status {status}, {len(output)} bytes")


def run_corpus(directory: Path, config: Optional[AtcConfig] = None, accept: bool = False,
               jobs: int = 1) -> CorpusSummary:
    """Run every case of a corpus directory; verdicts are ordered by case name."""
    base = config or load_config()
    extensions = tuple(base.cli.source_extensions)
    sources = sorted((p for p in Path(directory).iterdir() if p.is_file() and p.suffix in extensions),
                     key=lambda p: p.name)
    logger.info(f"Running {len(sources)} corpus cases from {directory}")

    def verdict_of(path: Path) -> CaseVerdict:
        try:
            return run_case(path, base, accept)
        except Exception as e:
            logger.error(f"Error running case {path.name}: {str(e)}", exc_info=True)
            return CaseVerdict(name=path.stem, verdict="ERROR", detail=str(e))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(verdict_of, sources))
    else:
        verdicts = [verdict_of(path) for path in sources]
    return CorpusSummary(verdicts=verdicts)
