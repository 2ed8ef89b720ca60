from enum import Enum
from pathlib import Path
from typing import Any, FrozenSet, List, Literal, Optional, TypedDict

import yaml
from pydantic import BaseModel, Field

from state.diagnostics import Diagnostic

CONFIG_PATH = Path(__file__).resolve().parent.parent / "configs" / "config.yaml"


class ArgOrder(str, Enum):
    """Argument evaluation order for calls."""
    LEFT_TO_RIGHT = "left"
    RIGHT_TO_LEFT = "right"


class LexConfig(BaseModel):
    """Lexer settings."""
    ambiguous_severity: Literal["error", "warning"] = "error"


class PpConfig(BaseModel):
    """Preprocessor and fixpoint driver settings."""
    max_fixpoint_iters: int = Field(default=8, ge=1)
    max_while_iters: int = Field(default=10000, ge=1)
    max_include_depth: int = Field(default=64, ge=1)
    include_paths: List[str] = Field(default_factory=list)


class EvalConfig(BaseModel):
    """Evaluator settings; the output sink is supplied per run."""
    arg_order: ArgOrder = ArgOrder.LEFT_TO_RIGHT
    step_limit: int = Field(default=50_000_000, ge=1)
    max_call_depth: int = Field(default=100_000, ge=1)


class CliConfig(BaseModel):
    source_extensions: List[str] = Field(default_factory=lambda: [".atc", ".c"])
    runtime_error_status: int = 101
    compile_error_status: int = 1


class LoggingConfig(BaseModel):
    level: str = "WARNING"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class AtcConfig(BaseModel):
    """All settings, as loaded from configs/config.yaml."""
    lexer: LexConfig = Field(default_factory=LexConfig)
    preprocessor: PpConfig = Field(default_factory=PpConfig)
    evaluator: EvalConfig = Field(default_factory=EvalConfig)
    cli: CliConfig = Field(default_factory=CliConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    def with_overrides(
        self,
        arg_order: Optional[str] = None,
        ambiguous: Optional[str] = None,
        max_pp_iters: Optional[int] = None,
        max_while_iters: Optional[int] = None,
        step_limit: Optional[int] = None,
        include_paths: Optional[List[str]] = None,
    ) -> "AtcConfig":
        """Copy with command-line overrides applied; validation errors raise ValueError."""
        lexer = self.lexer.model_dump()
        pp = self.preprocessor.model_dump()
        ev = self.evaluator.model_dump()
        if ambiguous is not None:
            lexer["ambiguous_severity"] = "warning" if ambiguous in ("warn", "warning") else ambiguous
        if max_pp_iters is not None:
            pp["max_fixpoint_iters"] = max_pp_iters
        if max_while_iters is not None:
            pp["max_while_iters"] = max_while_iters
        if include_paths:
            pp["include_paths"] = list(pp["include_paths"]) + list(include_paths)
        if arg_order is not None:
            ev["arg_order"] = arg_order
        if step_limit is not None:
            ev["step_limit"] = step_limit
        return self.model_copy(update={
            "lexer": LexConfig.model_validate(lexer),
            "preprocessor": PpConfig.model_validate(pp),
            "evaluator": EvalConfig.model_validate(ev),
        })


def load_config(path: Optional[Path] = None) -> AtcConfig:
    """Load and validate the YAML configuration."""
    with open(path or CONFIG_PATH, "r") as f:
        raw = yaml.safe_load(f) or {}
    return AtcConfig.model_validate(raw)


PREDICATES = ("declared", "coded", "used")


class CodeFacts(BaseModel):
    """
    Coding-stage facts consulted by the `declared` / `coded` / `used`
    preprocessor predicates.

    An optimistic instance answers true to every query; it is the fixpoint
    driver's starting assumption.
    """
    declared: FrozenSet[str] = frozenset()
    coded: FrozenSet[str] = frozenset()
    used: FrozenSet[str] = frozenset()
    optimistic: bool = False

    @classmethod
    def assume_all(cls) -> "CodeFacts":
        return cls(optimistic=True)

    def query(self, predicate: str, name: str) -> bool:
        if self.optimistic:
            return True
        if predicate == "declared":
            return name in self.declared
        if predicate == "coded":
            return name in self.coded
        if predicate == "used":
            return name in self.used
        raise ValueError(f"Unknown predicate: {predicate}")


class PredicateRecord(BaseModel):
    """One consultation of a code predicate during preprocessing."""
    predicate: str
    name: str
    value: bool


class CompileState(TypedDict, total=False):
    """State threaded through the compile workflow."""
    file_name: str
    source: bytes
    tokens: List[Any]
    facts: CodeFacts
    trace: List[List[PredicateRecord]]
    iterations: int
    unit: Any
    symbols: Any
    diagnostics: List[Diagnostic]
    error: Optional[str]
