"""Runtime values: cells, array storage and descriptors, structs, callables."""
from dataclasses import dataclass, field
from typing import Any, Callable as PyCallable, Dict, List, Optional

from state.diagnostics import AtcRuntimeError, DiagnosticCode
from state.span import Span
from tools.ast_nodes import ArrayKind, CType, Placement, ProcDef
from tools.binder import StructInfo, SymbolTable
from tools.operators import wrap_signed


class Unit:
    """Result of a void call."""

    def __repr__(self) -> str:
        return "Unit"


UNIT = Unit()


@dataclass
class Cell:
    """A storage slot holding one value of a fixed type."""
    ctype: CType
    value: Any = 0

    def get(self) -> Any:
        return self.value

    def set(self, value: Any) -> None:
        self.value = value


@dataclass(eq=False)
class ArrayStorage:
    elements: List[Any]


@dataclass(eq=False)
class ArrayDesc:
    """A view of `length` elements of `storage` starting at `offset`."""
    elem: CType
    storage: ArrayStorage
    offset: int
    length: int

    def check(self, index: int, span: Optional[Span]) -> int:
        if not 0 <= index < self.length:
            raise AtcRuntimeError(DiagnosticCode.E_OOB_INDEX, span,
                                  f"index {index} outside [0, {self.length})")
        return self.offset + index

    def read(self, index: int, span: Optional[Span] = None) -> Any:
        return self.storage.elements[self.check(index, span)]

    def write(self, index: int, value: Any, span: Optional[Span] = None) -> None:
        self.storage.elements[self.check(index, span)] = value

    def to_bytes(self, count: Optional[int] = None) -> bytes:
        count = self.length if count is None else count
        start = self.offset
        return bytes(e & 0xFF for e in self.storage.elements[start:start + count])


@dataclass
class ElementRef:
    """Assignable array element."""
    desc: ArrayDesc
    index: int
    span: Optional[Span] = None

    @property
    def ctype(self) -> CType:
        return self.desc.elem

    def get(self) -> Any:
        return self.desc.read(self.index, self.span)

    def set(self, value: Any) -> None:
        self.desc.write(self.index, value, self.span)


@dataclass(eq=False)
class StructVal:
    info: StructInfo
    fields: Dict[str, Cell]


@dataclass(eq=False)
class Activation:
    """One procedure call; nested procedures defined in it die when it returns."""
    name: str
    alive: bool = True


@dataclass(eq=False)
class Callable:
    proc: ProcDef
    env: Any
    kind: Placement
    owner: Optional[Activation] = None

    @property
    def alive(self) -> bool:
        if self.kind == Placement.NESTED and self.owner is not None:
            return self.owner.alive
        return True


@dataclass(eq=False)
class Builtin:
    name: str
    fn: PyCallable[..., Any] = field(repr=False)


def is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def new_array(elem: CType, elements: List[Any]) -> ArrayDesc:
    return ArrayDesc(elem, ArrayStorage(elements), 0, len(elements))


def default_value(ctype: CType, table: SymbolTable) -> Any:
    """Zero value of a type; uninitialized storage reads as this."""
    if ctype.kind in ("int", "char"):
        return 0
    if ctype.kind == "array":
        spec = ctype.array
        count = spec.size if spec.kind == ArrayKind.FIXED else 0
        return new_array(ctype.elem, [default_value(ctype.elem, table) for _ in range(count)])
    if ctype.kind == "struct":
        info = table.structs[ctype.tag]
        return StructVal(info, {m.name: Cell(m.ctype, default_value(m.ctype, table)) for m in info.members})
    return None


def copy_value(ctype: CType, value: Any, table: SymbolTable) -> Any:
    """Value-semantics copy used by initialization and assignment."""
    if isinstance(value, ArrayDesc):
        elem = ctype.elem if ctype.is_array else value.elem
        elements = [copy_value(elem, value.read(i), table) for i in range(value.length)]
        spec = ctype.array if ctype.is_array else None
        if spec is not None and spec.kind == ArrayKind.FIXED:
            elements = elements[:spec.size]
            elements += [default_value(elem, table) for _ in range(spec.size - len(elements))]
        return new_array(elem, elements)
    if isinstance(value, StructVal):
        return StructVal(value.info, {name: Cell(cell.ctype, copy_value(cell.ctype, cell.value, table))
                                      for name, cell in value.fields.items()})
    return coerce(ctype, value)


def coerce(ctype: CType, value: Any) -> Any:
    """Fit an integer into `int` (32-bit wrap) or `char` (0..255)."""
    if not is_int(value):
        return value
    if ctype.kind == "char":
        return value & 0xFF
    if ctype.kind == "int":
        return wrap_signed(value, 32)
    return value


def describe(value: Any) -> str:
    if is_int(value):
        return "int"
    if isinstance(value, ArrayDesc):
        return "array"
    if isinstance(value, StructVal):
        return f"struct {value.info.tag}"
    if isinstance(value, (Callable, Builtin)):
        return "procedure"
    if value is None:
        return "unset procedure"
    return "void"
