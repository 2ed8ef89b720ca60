"""
Syntax tree for the dialect.

Spans, binder annotations and label sets are excluded from equality, so two
trees compare equal when they have the same shape and payloads.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, FrozenSet, List, Optional, Tuple, Union

from state.span import Span


# -- types --------------------------------------------------------------------

class ArrayKind(str, Enum):
    FIXED = "fixed"
    DYNAMIC = "dynamic"
    FLEX_ZERO = "flex"


@dataclass(frozen=True)
class ArraySpec:
    kind: ArrayKind
    size: int = 0


@dataclass(frozen=True)
class CType:
    """
    A type of the subset: void, char, int, struct, array or procedure.

    Arrays keep their element type in `elem`; procedure types keep the return
    type in `elem` and the parameter types in `params`.
    """
    kind: str
    tag: Optional[str] = None
    elem: Optional["CType"] = None
    array: Optional[ArraySpec] = None
    params: Tuple["CType", ...] = ()

    @property
    def is_scalar(self) -> bool:
        return self.kind in ("int", "char")

    @property
    def is_array(self) -> bool:
        return self.kind == "array"

    @property
    def is_proc(self) -> bool:
        return self.kind == "proc"

    @property
    def is_struct(self) -> bool:
        return self.kind == "struct"

    def describe(self) -> str:
        if self.kind == "struct":
            return f"struct {self.tag}"
        if self.kind == "array":
            spec = self.array
            inner = "" if spec.kind == ArrayKind.DYNAMIC else str(spec.size)
            return f"{self.elem.describe()}[{inner}]"
        if self.kind == "proc":
            params = ", ".join(p.describe() for p in self.params) or "void"
            return f"{self.elem.describe()} (*)({params})"
        return self.kind


VOID = CType("void")
CHAR = CType("char")
INT = CType("int")


def array_of(elem: CType, spec: ArraySpec) -> CType:
    return CType("array", elem=elem, array=spec)


def proc_of(ret: CType, params: List[CType]) -> CType:
    return CType("proc", elem=ret, params=tuple(params))


def struct_type(tag: str) -> CType:
    return CType("struct", tag=tag)


class Placement(str, Enum):
    TOP_LEVEL = "toplevel"
    NESTED = "nested"
    CLOSURE = "closure"


# -- base classes -------------------------------------------------------------

@dataclass
class Node:
    span: Span = field(default_factory=Span.unknown, kw_only=True, compare=False, repr=False)


@dataclass
class Expr(Node):
    ctype: Optional[CType] = field(default=None, kw_only=True, compare=False, repr=False)


@dataclass
class Stmt(Node):
    # goto labels and switch case keys reachable inside this statement
    labels: FrozenSet[Any] = field(default=frozenset(), kw_only=True, compare=False, repr=False)


# -- expressions --------------------------------------------------------------

@dataclass
class IntLit(Expr):
    value: int


@dataclass
class CharLit(Expr):
    value: int


@dataclass
class StrLit(Expr):
    value: bytes


@dataclass
class Ident(Expr):
    name: str
    symbol: Any = field(default=None, kw_only=True, compare=False, repr=False)


@dataclass
class Unary(Expr):
    """`op` is one of + - ! ~ pre++ pre-- post++ post--."""
    op: str
    operand: Expr


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class Assign(Expr):
    op: str
    target: Expr
    value: Expr


@dataclass
class Ternary(Expr):
    cond: Expr
    then: Expr
    other: Expr


@dataclass
class Comma(Expr):
    left: Expr
    right: Expr


@dataclass
class Call(Expr):
    callee: Expr
    args: List[Expr]


@dataclass
class Index(Expr):
    base: Expr
    index: Expr


@dataclass
class Member(Expr):
    base: Expr
    name: str
    arrow: bool = False


@dataclass
class SizeofExpr(Expr):
    operand: Expr


@dataclass
class SizeofType(Expr):
    target: CType


@dataclass
class LengthOf(Expr):
    operand: Expr


@dataclass
class Cast(Expr):
    target: CType
    operand: Expr


@dataclass
class InitList(Expr):
    items: List[Expr]


# -- declarations -------------------------------------------------------------

@dataclass
class VarDecl(Node):
    name: str
    ctype: CType
    init: Optional[Expr] = None
    volatile: bool = False


@dataclass
class Param(Node):
    name: Optional[str]
    ctype: CType


@dataclass
class StructMember(Node):
    name: str
    ctype: CType


@dataclass
class StructDecl(Node):
    """`members` is None for a forward reference `struct S;`."""
    tag: str
    members: Optional[List[StructMember]] = None


@dataclass
class ProcDef(Node):
    """A procedure definition, or a prototype when `body` is None."""
    name: str
    return_type: CType
    params: List[Param]
    body: Optional["Block"] = None
    placement: Placement = Placement.TOP_LEVEL

    @property
    def ctype(self) -> CType:
        return proc_of(self.return_type, [p.ctype for p in self.params])


Declaration = Union[VarDecl, StructDecl, ProcDef]


@dataclass
class TranslationUnit(Node):
    decls: List[Declaration]


# -- statements ---------------------------------------------------------------

@dataclass
class ExprStmt(Stmt):
    expr: Expr


@dataclass
class DeclStmt(Stmt):
    decls: List[Declaration]


@dataclass
class Block(Stmt):
    stmts: List[Stmt]


@dataclass
class If(Stmt):
    cond: Expr
    then: Stmt
    other: Optional[Stmt] = None


@dataclass
class While(Stmt):
    cond: Expr
    body: Stmt


@dataclass
class DoWhile(Stmt):
    body: Stmt
    cond: Expr


@dataclass
class For(Stmt):
    init: Optional[Stmt]
    cond: Optional[Expr]
    step: Optional[Expr]
    body: Stmt


@dataclass
class Switch(Stmt):
    expr: Expr
    body: Stmt
    cases: FrozenSet[Any] = field(default=frozenset(), kw_only=True, compare=False, repr=False)


@dataclass
class Case(Stmt):
    value: Expr
    stmt: Stmt
    const: Optional[int] = field(default=None, kw_only=True, compare=False, repr=False)

    @property
    def key(self) -> Tuple[str, Optional[int]]:
        return ("case", self.const)


@dataclass
class Default(Stmt):
    stmt: Stmt

    key = ("default",)


@dataclass
class Break(Stmt):
    pass


@dataclass
class Continue(Stmt):
    pass


@dataclass
class Return(Stmt):
    value: Optional[Expr] = None


@dataclass
class Goto(Stmt):
    label: str


@dataclass
class Labeled(Stmt):
    label: str
    stmt: Stmt


@dataclass
class Empty(Stmt):
    pass


def children(node: Node) -> List[Node]:
    """Direct child nodes in source order."""
    out: List[Node] = []
    for name in node.__dataclass_fields__:
        if name in ("span", "ctype", "labels", "symbol", "cases", "const"):
            continue
        value = getattr(node, name)
        if isinstance(value, Node):
            out.append(value)
        elif isinstance(value, list):
            out.extend(v for v in value if isinstance(v, Node))
    return out
