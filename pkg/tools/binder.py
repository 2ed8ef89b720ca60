import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Set, Tuple

from state.diagnostics import Diagnostic, DiagnosticCode, Severity
from state.span import Span
from state.state import CodeFacts
from .ast_nodes import (
    CHAR, INT, ArrayKind, ArraySpec, Assign, Binary, Block, Break, Call, Case, Cast, CharLit,
    Comma, Continue, CType, DeclStmt, Default, DoWhile, Empty, Expr, ExprStmt, For, Goto, Ident, If,
    Index, InitList, IntLit, Labeled, LengthOf, Member, ProcDef, Return, SizeofExpr, SizeofType, Stmt,
    StrLit, StructDecl, StructMember, Switch, Ternary, TranslationUnit, Unary, VarDecl, While,
    array_of, proc_of,
)
from .base_tool import BaseTool, ToolResult
from .parser import fold_constant

logger = logging.getLogger(__name__)

PROC_VALUE_SIZE = 8

# name -> (type, minimum argument count, variadic)
BUILTINS: Dict[str, Tuple[CType, int, bool]] = {
    "printf": (proc_of(INT, [array_of(CHAR, ArraySpec(ArrayKind.DYNAMIC))]), 1, True),
    "putchar": (proc_of(INT, [INT]), 1, False),
    "puts": (proc_of(INT, [array_of(CHAR, ArraySpec(ArrayKind.DYNAMIC))]), 1, False),
}


@dataclass
class Symbol:
    """A resolved name. `decl` is the VarDecl, Param or ProcDef that introduced it."""
    name: str
    kind: str
    ctype: Optional[CType]
    decl: Any = None
    is_global: bool = False


@dataclass
class StructInfo:
    tag: str
    members: List[StructMember]
    span: Span

    def member(self, name: str) -> Optional[StructMember]:
        for member in self.members:
            if member.name == name:
                return member
        return None


@dataclass
class SymbolTable:
    globals: Dict[str, Symbol] = field(default_factory=dict)
    structs: Dict[str, StructInfo] = field(default_factory=dict)

    def size_of(self, ctype: CType) -> Optional[int]:
        """Byte size, or None for types with no static size."""
        if ctype.kind == "int":
            return 4
        if ctype.kind == "char":
            return 1
        if ctype.kind == "proc":
            return PROC_VALUE_SIZE
        if ctype.kind == "array":
            if ctype.array.kind == ArrayKind.FLEX_ZERO:
                return 0
            if ctype.array.kind == ArrayKind.DYNAMIC:
                return None
            elem = self.size_of(ctype.elem)
            return None if elem is None else elem * ctype.array.size
        if ctype.kind == "struct":
            info = self.structs.get(ctype.tag)
            if info is None:
                return None
            total = 0
            for member in info.members:
                size = self.size_of(member.ctype)
                if size is None:
                    return None
                total += size
            return total
        return None


class Scope:
    def __init__(self, parent: Optional["Scope"] = None):
        self.parent = parent
        self.symbols: Dict[str, Symbol] = {}

    def lookup(self, name: str) -> Optional[Symbol]:
        scope = self
        while scope is not None:
            if name in scope.symbols:
                return scope.symbols[name]
            scope = scope.parent
        return None


@dataclass
class _ProcContext:
    proc: ProcDef
    labels: Dict[str, Tuple[Tuple[Tuple[Block, int], ...], Span]] = field(default_factory=dict)
    gotos: List[Tuple[Goto, Tuple[Tuple[Block, int], ...]]] = field(default_factory=list)
    path: List[List[Any]] = field(default_factory=list)
    loops: int = 0
    breakable: int = 0
    switches: List[Set[Any]] = field(default_factory=list)


class Binder:
    """
    Resolves names with block scoping, checks labels and types, and
    computes the declared / coded / used facts of the program.
    """

    def __init__(self):
        self.table = SymbolTable()
        self.diagnostics: List[Diagnostic] = []
        self.declared: Set[str] = set()
        self.coded: Set[str] = set()
        self.used: Set[str] = set()
        self.defining: List[str] = []
        self.contexts: List[_ProcContext] = []
        self.builtin_scope = Scope()
        for name, (ctype, _, _) in BUILTINS.items():
            self.builtin_scope.symbols[name] = Symbol(name, "builtin", ctype, is_global=True)

    def _diag(self, code: DiagnosticCode, span: Span, message: str, severity: Severity = Severity.ERROR) -> None:
        self.diagnostics.append(Diagnostic(code=code, severity=severity, span=span, message=message))

    def _use(self, name: str) -> None:
        if name not in self.defining:
            self.used.add(name)

    @property
    def ctx(self) -> Optional[_ProcContext]:
        return self.contexts[-1] if self.contexts else None

    # -- facts ----------------------------------------------------------------

    def facts(self) -> CodeFacts:
        return CodeFacts(declared=frozenset(self.declared | self.coded), coded=frozenset(self.coded),
                         used=frozenset(self.used))

    # -- unit -----------------------------------------------------------------

    def bind_unit(self, unit: TranslationUnit) -> None:
        scope = Scope(self.builtin_scope)
        for decl in unit.decls:
            if isinstance(decl, ProcDef):
                self._declare_proc(decl, scope, is_global=True)
        for decl in unit.decls:
            if isinstance(decl, StructDecl):
                self._bind_struct(decl)
            elif isinstance(decl, VarDecl):
                self._bind_var(decl, scope, is_global=True)
            elif isinstance(decl, ProcDef):
                self._bind_proc_body(decl, scope)
        self.table.globals = scope.symbols

    # -- declarations ---------------------------------------------------------

    def _check_type(self, ctype: CType, span: Span, owner: Optional[str] = None) -> None:
        if ctype.kind == "struct":
            if ctype.tag != owner:
                self._use(ctype.tag)
            if ctype.tag not in self.table.structs and ctype.tag not in self.declared:
                self._diag(DiagnosticCode.E_TYPE, span, f"unknown type 'struct {ctype.tag}'")
        elif ctype.kind in ("array", "proc"):
            self._check_type(ctype.elem, span, owner)
            for param in ctype.params:
                self._check_type(param, span, owner)

    def _bind_struct(self, decl: StructDecl) -> None:
        self.declared.add(decl.tag)
        if decl.members is None:
            return
        existing = self.table.structs.get(decl.tag)
        if existing is not None and existing.members != decl.members:
            self._diag(DiagnosticCode.E_REDEFINITION, decl.span, f"redefinition of 'struct {decl.tag}'")
            return
        seen: Set[str] = set()
        self.defining.append(decl.tag)
        for member in decl.members:
            if member.name in seen:
                self._diag(DiagnosticCode.E_REDEFINITION, member.span, f"duplicate member '{member.name}'")
            seen.add(member.name)
            if member.ctype.kind == "void":
                self._diag(DiagnosticCode.E_TYPE, member.span, f"member '{member.name}' declared void")
            elif member.ctype.is_struct and member.ctype.tag == decl.tag:
                self._diag(DiagnosticCode.E_TYPE, member.span, f"'struct {decl.tag}' contains itself")
            else:
                self._check_type(member.ctype, member.span, decl.tag)
        self.defining.pop()
        self.table.structs[decl.tag] = StructInfo(decl.tag, decl.members, decl.span)
        self.coded.add(decl.tag)

    def _declare_proc(self, proc: ProcDef, scope: Scope, is_global: bool = False) -> None:
        self.declared.add(proc.name)
        if proc.body is not None:
            self.coded.add(proc.name)
        existing = scope.symbols.get(proc.name)
        if existing is None:
            scope.symbols[proc.name] = Symbol(proc.name, "proc", proc.ctype, proc, is_global)
            return
        if existing.kind != "proc":
            self._diag(DiagnosticCode.E_REDEFINITION, proc.span, f"'{proc.name}' redeclared as a procedure")
            return
        if existing.ctype != proc.ctype:
            self._diag(DiagnosticCode.E_TYPE, proc.span, f"conflicting types for '{proc.name}'")
        if existing.decl.body is not None and proc.body is not None:
            self._diag(DiagnosticCode.E_REDEFINITION, proc.span, f"redefinition of procedure '{proc.name}'")
        elif proc.body is not None:
            existing.decl = proc

    def _bind_var(self, decl: VarDecl, scope: Scope, is_global: bool = False) -> None:
        if decl.ctype.kind == "void" or (decl.ctype.is_array and decl.ctype.elem.kind == "void"):
            self._diag(DiagnosticCode.E_TYPE, decl.span, f"variable '{decl.name}' declared void")
        self._check_type(decl.ctype, decl.span)
        if decl.init is not None:
            self.defining.append(decl.name)
            self._bind_init(decl.ctype, decl.init, scope)
            self.defining.pop()
            self.coded.add(decl.name)
        self.declared.add(decl.name)

        existing = scope.symbols.get(decl.name)
        if existing is not None:
            previous = existing.decl
            compatible = (is_global and existing.kind == "var" and existing.ctype == decl.ctype
                          and (previous.init is None or decl.init is None))
            if not compatible:
                self._diag(DiagnosticCode.E_REDEFINITION, decl.span, f"redefinition of '{decl.name}'")
                return
            if decl.init is not None:
                existing.decl = decl
            return
        scope.symbols[decl.name] = Symbol(decl.name, "var", decl.ctype, decl, is_global)

    def _bind_init(self, ctype: CType, init: Expr, scope: Scope) -> None:
        if isinstance(init, InitList):
            init.ctype = ctype
            if ctype.is_array:
                spec = ctype.array
                if spec.kind == ArrayKind.FIXED and len(init.items) > spec.size:
                    self._diag(DiagnosticCode.E_TYPE, init.span, "too many initializers for array")
                if spec.kind == ArrayKind.FLEX_ZERO and init.items:
                    self._diag(DiagnosticCode.E_TYPE, init.span, "zero-length array cannot be initialized")
                for item in init.items:
                    self._bind_init(ctype.elem, item, scope)
            elif ctype.is_struct:
                info = self.table.structs.get(ctype.tag)
                members = info.members if info else []
                if len(init.items) > len(members):
                    self._diag(DiagnosticCode.E_TYPE, init.span, f"too many initializers for 'struct {ctype.tag}'")
                for member, item in zip(members, init.items):
                    self._bind_init(member.ctype, item, scope)
            else:
                self._diag(DiagnosticCode.E_TYPE, init.span, f"braced initializer for '{ctype.describe()}'")
            return
        value_type = self._bind_expr(init, scope)
        if (ctype.is_array and isinstance(init, StrLit) and ctype.array.kind == ArrayKind.FIXED
                and len(init.value) > ctype.array.size):
            self._diag(DiagnosticCode.E_TYPE, init.span, "string literal longer than the array")
        self._check_assignable(ctype, value_type, init.span)

    def _bind_proc_body(self, proc: ProcDef, scope: Scope) -> None:
        self._check_type(proc.return_type, proc.span)
        if proc.body is None:
            return
        self.defining.append(proc.name)
        ctx = _ProcContext(proc)
        self.contexts.append(ctx)
        proc_scope = Scope(scope)
        for param in proc.params:
            self._check_type(param.ctype, param.span)
            if param.ctype.kind == "void":
                self._diag(DiagnosticCode.E_TYPE, param.span, "parameter declared void")
            if param.name is None:
                continue
            if param.name in proc_scope.symbols:
                self._diag(DiagnosticCode.E_REDEFINITION, param.span, f"duplicate parameter '{param.name}'")
                continue
            self.declared.add(param.name)
            proc_scope.symbols[param.name] = Symbol(param.name, "param", param.ctype, param)
        self._bind_block(proc.body, proc_scope, new_scope=False)
        self._check_gotos(ctx)
        self.contexts.pop()
        self.defining.pop()

    def _check_gotos(self, ctx: _ProcContext) -> None:
        for goto, goto_path in ctx.gotos:
            target = ctx.labels.get(goto.label)
            if target is None:
                self._diag(DiagnosticCode.E_UNRESOLVED_LABEL, goto.span,
                           f"label '{goto.label}' not found in '{ctx.proc.name}'")
                continue
            label_path, _ = target
            enclosing = {id(block) for block, _ in goto_path}
            for block, index in label_path:
                if id(block) in enclosing:
                    continue
                skipped = [d for s in block.stmts[:index] if isinstance(s, DeclStmt)
                           for d in s.decls if isinstance(d, VarDecl) and d.init is not None]
                if skipped:
                    self._diag(DiagnosticCode.E_GOTO_INTO_SCOPE, goto.span,
                               f"'goto {goto.label}' jumps past the initialization of '{skipped[0].name}'")
                    break

    # -- statements -----------------------------------------------------------

    def _bind_block(self, block: Block, scope: Scope, new_scope: bool = True) -> None:
        inner = Scope(scope) if new_scope else scope
        ctx = self.ctx
        ctx.path.append([block, 0])
        labels: Set[Any] = set()
        for index, stmt in enumerate(block.stmts):
            ctx.path[-1][1] = index
            self._bind_stmt(stmt, inner)
            labels |= stmt.labels
        ctx.path.pop()
        block.labels = frozenset(labels)

    def _bind_cond(self, expr: Expr, scope: Scope) -> None:
        ctype = self._bind_expr(expr, scope)
        if ctype is not None and not ctype.is_scalar:
            self._diag(DiagnosticCode.E_TYPE, expr.span, f"condition has type '{ctype.describe()}'")

    def _bind_loop_body(self, body: Stmt, scope: Scope) -> None:
        ctx = self.ctx
        ctx.loops += 1
        ctx.breakable += 1
        self._bind_stmt(body, scope)
        ctx.loops -= 1
        ctx.breakable -= 1

    def _bind_stmt(self, stmt: Stmt, scope: Scope) -> None:
        ctx = self.ctx
        if isinstance(stmt, Block):
            self._bind_block(stmt, scope)
            return
        if isinstance(stmt, ExprStmt):
            self._bind_expr(stmt.expr, scope)
        elif isinstance(stmt, DeclStmt):
            for decl in stmt.decls:
                if isinstance(decl, VarDecl):
                    self._bind_var(decl, scope)
                elif isinstance(decl, StructDecl):
                    self._bind_struct(decl)
                else:
                    self._declare_proc(decl, scope)
                    self._bind_proc_body(decl, scope)
        elif isinstance(stmt, If):
            self._bind_cond(stmt.cond, scope)
            self._bind_stmt(stmt.then, scope)
            if stmt.other is not None:
                self._bind_stmt(stmt.other, scope)
            stmt.labels = stmt.then.labels | (stmt.other.labels if stmt.other else frozenset())
        elif isinstance(stmt, (While, DoWhile)):
            self._bind_cond(stmt.cond, scope)
            self._bind_loop_body(stmt.body, scope)
            stmt.labels = stmt.body.labels
        elif isinstance(stmt, For):
            inner = Scope(scope)
            if stmt.init is not None:
                self._bind_stmt(stmt.init, inner)
            if stmt.cond is not None:
                self._bind_cond(stmt.cond, inner)
            if stmt.step is not None:
                self._bind_expr(stmt.step, inner)
            self._bind_loop_body(stmt.body, inner)
            stmt.labels = stmt.body.labels
        elif isinstance(stmt, Switch):
            self._bind_cond(stmt.expr, scope)
            ctx.switches.append(set())
            ctx.breakable += 1
            self._bind_stmt(stmt.body, scope)
            ctx.breakable -= 1
            stmt.cases = frozenset(ctx.switches.pop())
            stmt.labels = frozenset(k for k in stmt.body.labels if isinstance(k, str))
        elif isinstance(stmt, (Case, Default)):
            self._bind_case(stmt, scope)
        elif isinstance(stmt, Break):
            if ctx.breakable == 0:
                self._diag(DiagnosticCode.E_PARSE, stmt.span, "'break' outside a loop or switch")
        elif isinstance(stmt, Continue):
            if ctx.loops == 0:
                self._diag(DiagnosticCode.E_PARSE, stmt.span, "'continue' outside a loop")
        elif isinstance(stmt, Return):
            ret = ctx.proc.return_type
            if stmt.value is not None:
                value_type = self._bind_expr(stmt.value, scope)
                if ret.kind == "void":
                    self._diag(DiagnosticCode.E_TYPE, stmt.span, f"'{ctx.proc.name}' returns void")
                else:
                    self._check_assignable(ret, value_type, stmt.span)
        elif isinstance(stmt, Goto):
            ctx.gotos.append((stmt, tuple((b, i) for b, i in ctx.path)))
        elif isinstance(stmt, Labeled):
            if stmt.label in ctx.labels:
                self._diag(DiagnosticCode.E_REDEFINITION, stmt.span, f"duplicate label '{stmt.label}'")
            else:
                ctx.labels[stmt.label] = (tuple((b, i) for b, i in ctx.path), stmt.span)
            self._bind_stmt(stmt.stmt, scope)
            stmt.labels = stmt.stmt.labels | {stmt.label}
        elif not isinstance(stmt, Empty):
            self._diag(DiagnosticCode.E_INTERNAL, stmt.span, f"unhandled statement {type(stmt).__name__}")

    def _bind_case(self, stmt: Stmt, scope: Scope) -> None:
        ctx = self.ctx
        if isinstance(stmt, Case):
            self._bind_expr(stmt.value, scope)
            stmt.const = fold_constant(stmt.value)
            if stmt.const is None:
                self._diag(DiagnosticCode.E_TYPE, stmt.value.span, "case label is not an integer constant")
        if not ctx.switches:
            self._diag(DiagnosticCode.E_PARSE, stmt.span, "case label outside a switch")
            self._bind_stmt(stmt.stmt, scope)
            stmt.labels = stmt.stmt.labels
            return
        cases = ctx.switches[-1]
        key = stmt.key
        if key in cases:
            self._diag(DiagnosticCode.E_REDEFINITION, stmt.span, "duplicate case label")
        cases.add(key)
        self._bind_stmt(stmt.stmt, scope)
        stmt.labels = stmt.stmt.labels | {key}

    # -- expressions ----------------------------------------------------------

    def _check_assignable(self, dst: CType, src: Optional[CType], span: Span) -> None:
        if src is None or dst is None:
            return
        if dst.is_scalar and src.is_scalar:
            return
        if dst.is_array and src.is_array and dst.elem == src.elem:
            return
        if dst.is_struct and src.is_struct and dst.tag == src.tag:
            return
        if dst.is_proc and src.is_proc and dst == src:
            return
        self._diag(DiagnosticCode.E_TYPE, span, f"cannot convert '{src.describe()}' to '{dst.describe()}'")

    def _is_lvalue(self, expr: Expr) -> bool:
        if isinstance(expr, Ident):
            return expr.symbol is not None and expr.symbol.kind in ("var", "param")
        return isinstance(expr, (Index, Member))

    def _scalar(self, expr: Expr, ctype: Optional[CType], what: str) -> None:
        if ctype is not None and not ctype.is_scalar:
            self._diag(DiagnosticCode.E_TYPE, expr.span, f"{what} needs an integer operand, got '{ctype.describe()}'")

    def _bind_expr(self, expr: Expr, scope: Scope) -> Optional[CType]:
        ctype = self._infer(expr, scope)
        expr.ctype = ctype
        return ctype

    def _infer(self, expr: Expr, scope: Scope) -> Optional[CType]:
        if isinstance(expr, (IntLit, CharLit)):
            return INT
        if isinstance(expr, StrLit):
            return array_of(CHAR, ArraySpec(ArrayKind.DYNAMIC))
        if isinstance(expr, Ident):
            symbol = scope.lookup(expr.name)
            self._use(expr.name)
            if symbol is None:
                self._diag(DiagnosticCode.E_UNDECLARED, expr.span, f"'{expr.name}' is not declared")
                return None
            expr.symbol = symbol
            return symbol.ctype
        if isinstance(expr, Unary):
            operand = self._bind_expr(expr.operand, scope)
            if expr.op.startswith(("pre", "post")):
                if not self._is_lvalue(expr.operand):
                    self._diag(DiagnosticCode.E_TYPE, expr.span, f"'{expr.op[-2:]}' needs an assignable operand")
                self._scalar(expr, operand, f"'{expr.op[-2:]}'")
                return operand if operand is not None and operand.is_scalar else INT
            self._scalar(expr, operand, f"unary '{expr.op}'")
            return INT
        if isinstance(expr, Binary):
            left = self._bind_expr(expr.left, scope)
            right = self._bind_expr(expr.right, scope)
            self._scalar(expr.left, left, f"'{expr.op}'")
            self._scalar(expr.right, right, f"'{expr.op}'")
            return INT
        if isinstance(expr, Assign):
            target = self._bind_expr(expr.target, scope)
            value = self._bind_expr(expr.value, scope)
            if not self._is_lvalue(expr.target):
                self._diag(DiagnosticCode.E_TYPE, expr.target.span, "expression is not assignable")
            if expr.op == "=":
                self._check_assignable(target, value, expr.span)
            else:
                self._scalar(expr.target, target, f"'{expr.op}'")
                self._scalar(expr.value, value, f"'{expr.op}'")
            return target
        if isinstance(expr, Ternary):
            self._bind_cond(expr.cond, scope)
            then = self._bind_expr(expr.then, scope)
            other = self._bind_expr(expr.other, scope)
            if then is not None and other is not None and not (then.is_scalar and other.is_scalar):
                self._check_assignable(then, other, expr.span)
            return then
        if isinstance(expr, Comma):
            self._bind_expr(expr.left, scope)
            return self._bind_expr(expr.right, scope)
        if isinstance(expr, Call):
            return self._bind_call(expr, scope)
        if isinstance(expr, Index):
            base = self._bind_expr(expr.base, scope)
            index = self._bind_expr(expr.index, scope)
            self._scalar(expr.index, index, "array index")
            if base is None:
                return None
            if not base.is_array:
                self._diag(DiagnosticCode.E_TYPE, expr.base.span, f"'{base.describe()}' is not an array")
                return None
            return base.elem
        if isinstance(expr, Member):
            base = self._bind_expr(expr.base, scope)
            if base is None:
                return None
            info = self.table.structs.get(base.tag) if base.is_struct else None
            if info is None:
                self._diag(DiagnosticCode.E_TYPE, expr.span, f"'{base.describe()}' has no members")
                return None
            member = info.member(expr.name)
            if member is None:
                self._diag(DiagnosticCode.E_TYPE, expr.span, f"'struct {base.tag}' has no member '{expr.name}'")
                return None
            return member.ctype
        if isinstance(expr, SizeofExpr):
            self._bind_expr(expr.operand, scope)
            return INT
        if isinstance(expr, SizeofType):
            self._check_type(expr.target, expr.span)
            return INT
        if isinstance(expr, LengthOf):
            operand = self._bind_expr(expr.operand, scope)
            if operand is not None and not operand.is_array:
                self._diag(DiagnosticCode.E_TYPE, expr.span, f"'length' needs an array, got '{operand.describe()}'")
            return INT
        if isinstance(expr, Cast):
            operand = self._bind_expr(expr.operand, scope)
            if expr.target.kind != "void":
                if not expr.target.is_scalar:
                    self._diag(DiagnosticCode.E_TYPE, expr.span, f"cannot cast to '{expr.target.describe()}'")
                self._scalar(expr.operand, operand, "cast")
            return expr.target
        if isinstance(expr, InitList):
            self._diag(DiagnosticCode.E_TYPE, expr.span, "braced list is only allowed in an initializer")
            for item in expr.items:
                self._bind_expr(item, scope)
            return None
        self._diag(DiagnosticCode.E_INTERNAL, expr.span, f"unhandled expression {type(expr).__name__}")
        return None

    def _bind_call(self, call: Call, scope: Scope) -> Optional[CType]:
        callee = self._bind_expr(call.callee, scope)
        arg_types = [self._bind_expr(arg, scope) for arg in call.args]
        if callee is None:
            return None
        if not callee.is_proc:
            self._diag(DiagnosticCode.E_TYPE, call.callee.span, f"'{callee.describe()}' is not callable")
            return None
        symbol = call.callee.symbol if isinstance(call.callee, Ident) else None
        if symbol is not None and symbol.kind == "builtin":
            _, minimum, variadic = BUILTINS[symbol.name]
            if len(call.args) < minimum or (not variadic and len(call.args) != minimum):
                self._diag(DiagnosticCode.E_PARSE, call.span,
                           f"'{symbol.name}' called with {len(call.args)} arguments")
            if arg_types and callee.params:
                self._check_assignable(callee.params[0], arg_types[0], call.args[0].span)
            return callee.elem
        if len(call.args) != len(callee.params):
            self._diag(DiagnosticCode.E_PARSE, call.span,
                       f"call expects {len(callee.params)} arguments, got {len(call.args)}")
        else:
            for param, arg, arg_type in zip(callee.params, call.args, arg_types):
                self._check_assignable(param, arg_type, arg.span)
        return callee.elem


def bind(unit: TranslationUnit) -> Tuple[SymbolTable, CodeFacts, List[Diagnostic]]:
    """Resolve names and compute the code facts of a parsed unit."""
    binder = Binder()
    binder.bind_unit(unit)
    facts = binder.facts()
    logger.info(f"Bound unit: {len(facts.declared)} declared, {len(facts.coded)} coded, "
                f"{len(facts.used)} used")
    return binder.table, facts, binder.diagnostics


class BinderTool(BaseTool):
    """Name resolution, label checks and code-fact computation."""

    def validate_params(self, unit: Any = None, **kwargs) -> bool:
        return isinstance(unit, TranslationUnit)

    def execute(self, unit: TranslationUnit) -> ToolResult:
        if not self.validate_params(unit=unit):
            return ToolResult(success=False, error=f"expected a TranslationUnit, got {type(unit).__name__}")
        try:
            table, facts, diagnostics = bind(unit)
            return ToolResult.from_diagnostics({"symbols": table, "facts": facts}, diagnostics)
        except Exception as e:
            logger.error(f"Error binding: {str(e)}", exc_info=True)
            return ToolResult(success=False, error=str(e))

    def format_result(self, data: Dict[str, Any]) -> str:
        facts: CodeFacts = data["facts"]
        return "\n".join(
            f"{name}\t{' '.join(sorted(getattr(facts, name)))}" for name in ("declared", "coded", "used")
        ) + "\n"


# Create singleton instance
binder_tool = BinderTool()
