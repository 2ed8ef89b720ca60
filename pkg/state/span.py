from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    """Source range: byte offsets plus the 1-based line/column of the start."""
    file_id: str
    byte_start: int
    byte_end: int
    line: int
    column: int

    def location(self) -> str:
        return f"{self.file_id}:{self.line}:{self.column}"

    def merge(self, other: "Span") -> "Span":
        """Smallest span covering both; the start position comes from the earlier one."""
        if other.file_id != self.file_id:
            return self
        first = self if self.byte_start <= other.byte_start else other
        return Span(
            file_id=self.file_id,
            byte_start=first.byte_start,
            byte_end=max(self.byte_end, other.byte_end),
            line=first.line,
            column=first.column,
        )

    def contains(self, other: "Span") -> bool:
        return (
            self.file_id == other.file_id
            and self.byte_start <= other.byte_start
            and other.byte_end <= self.byte_end
        )

    @classmethod
    def unknown(cls, file_id: str = "<unknown>") -> "Span":
        return cls(file_id=file_id, byte_start=0, byte_end=0, line=0, column=0)
