from typing import Any, Dict, List, Optional
from pydantic import BaseModel, ConfigDict, Field

from state.diagnostics import Diagnostic, has_errors


class ToolResult(BaseModel):
    """Outcome of one compiler stage: its products plus what it reported."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    success: bool
    data: Optional[Dict[str, Any]] = None
    diagnostics: List[Diagnostic] = Field(default_factory=list)
    error: Optional[str] = None

    @classmethod
    def from_diagnostics(cls, data: Dict[str, Any], diagnostics: List[Diagnostic]) -> "ToolResult":
        return cls(success=not has_errors(diagnostics), data=data, diagnostics=diagnostics)


class BaseTool:
    """A front-end stage wrapped for uniform invocation and dumping."""
    name: str
    description: str

    def __init__(self):
        self.name = self.__class__.__name__
        self.description = self.__class__.__doc__ or ""

    def execute(self, **kwargs) -> ToolResult:
        """Run the stage; failures come back in the result, never as exceptions."""
        raise NotImplementedError("Subclasses must implement execute method")

    def validate_params(self, **kwargs) -> bool:
        """Checked by `execute` before the stage runs."""
        return True

    def format_result(self, data: Dict[str, Any]) -> str:
        """Text form of the stage's products, as printed by the CLI dumps."""
        return str(data)
