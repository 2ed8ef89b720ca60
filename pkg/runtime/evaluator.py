"""
Tree-walking evaluator.

Every operand of an expression is evaluated, side effects included, before
the next operand starts. Calls evaluate the callee first and then the
arguments in the configured order.
"""
import io
import logging
from typing import Any, BinaryIO, List, Optional

from state.diagnostics import AtcRuntimeError, DiagnosticCode
from state.span import Span
from state.state import ArgOrder, EvalConfig
from tools.ast_nodes import (
    CHAR, ArrayKind, Assign, Binary, Block, Break, Call, Case, Cast, CharLit, Comma, Continue, CType,
    DeclStmt, Default, DoWhile, Empty, Expr, ExprStmt, For, Goto, Ident, If, Index, InitList, IntLit,
    Labeled, LengthOf, Member, Placement, ProcDef, Return, SizeofExpr, SizeofType, Stmt, StrLit,
    StructDecl, Switch, Ternary, TranslationUnit, Unary, VarDecl, While,
)
from tools.binder import SymbolTable
from tools.operators import apply_int_op, wrap_signed
from .builtins import builtin_length, builtin_sizeof, make_builtins, sizeof_type
from .call_stack import run_on_large_stack
from .environment import Environment
from .values import (
    UNIT, Activation, ArrayDesc, ArrayStorage, Builtin, Callable, Cell, ElementRef, StructVal, coerce,
    copy_value, default_value, describe, is_int, new_array,
)

logger = logging.getLogger(__name__)


class BreakSignal(Exception):
    pass


class ContinueSignal(Exception):
    pass


class ReturnSignal(Exception):
    def __init__(self, value: Any):
        super().__init__()
        self.value = value


class GotoSignal(Exception):
    def __init__(self, label: str, span: Span):
        super().__init__(label)
        self.label = label
        self.span = span


def _type_error(span: Optional[Span], message: str) -> AtcRuntimeError:
    return AtcRuntimeError(DiagnosticCode.E_TYPE, span, message)


class Evaluator:
    def __init__(self, table: SymbolTable, config: Optional[EvalConfig] = None, output: Optional[BinaryIO] = None):
        self.table = table
        self.config = config or EvalConfig()
        self.output = output if output is not None else io.BytesIO()
        self.builtins = make_builtins(self.output)
        self.globals = Environment(activation=Activation("<globals>"))
        self.steps = 0
        self.depth = 0

    def _tick(self, span: Optional[Span]) -> None:
        self.steps += 1
        if self.steps > self.config.step_limit:
            raise AtcRuntimeError(DiagnosticCode.E_STEP_LIMIT, span,
                                  f"step limit of {self.config.step_limit} exceeded")

    # -- program --------------------------------------------------------------

    def load(self, unit: TranslationUnit) -> None:
        """Bind top-level procedures, then initialize globals top to bottom."""
        for decl in unit.decls:
            if isinstance(decl, ProcDef) and decl.body is not None:
                self.globals.define(decl.name, Cell(decl.ctype, Callable(decl, self.globals, Placement.TOP_LEVEL)))
        for decl in unit.decls:
            if isinstance(decl, VarDecl):
                if decl.init is None and decl.name in self.globals.record:
                    continue
                self.declare_var(decl, self.globals)

    def run_main(self, unit: TranslationUnit) -> int:
        cell = self.globals.lookup("main")
        callee = cell.get() if cell is not None else None
        if not isinstance(callee, Callable) or callee.proc.params:
            raise AtcRuntimeError(DiagnosticCode.E_NO_MAIN, unit.span, "no 'int main()' is defined")
        result = self.invoke(callee, [], callee.proc.span)
        return result if is_int(result) else 0

    # -- declarations ---------------------------------------------------------

    def declare_var(self, decl: VarDecl, env: Environment) -> Cell:
        # the initializer cannot see the name it initializes
        value = self.init_value(decl.ctype, decl.init, env)
        return env.define(decl.name, Cell(decl.ctype, value))

    def init_value(self, ctype: CType, init: Optional[Expr], env: Environment) -> Any:
        if init is None:
            return default_value(ctype, self.table)
        if isinstance(init, InitList):
            if ctype.is_array:
                elements = [self.init_value(ctype.elem, item, env) for item in init.items]
                if ctype.array.kind == ArrayKind.FIXED:
                    elements += [default_value(ctype.elem, self.table)
                                 for _ in range(ctype.array.size - len(elements))]
                return new_array(ctype.elem, elements)
            if ctype.is_struct:
                info = self.table.structs[ctype.tag]
                fields = {}
                for i, member in enumerate(info.members):
                    item = init.items[i] if i < len(init.items) else None
                    fields[member.name] = Cell(member.ctype, self.init_value(member.ctype, item, env))
                return StructVal(info, fields)
            raise _type_error(init.span, f"braced initializer for '{ctype.describe()}'")
        if ctype.is_array and isinstance(init, StrLit):
            content = list(init.value)
            if ctype.array.kind == ArrayKind.FIXED:
                size = ctype.array.size
                return new_array(ctype.elem, (content + [0] * size)[:size])
            return ArrayDesc(ctype.elem, ArrayStorage(content + [0]), 0, len(content))
        return copy_value(ctype, self.eval_expr(init, env), self.table)

    def make_local_procedure(self, proc: ProcDef, env: Environment) -> Callable:
        """A nested procedure dies with the activation that defined it; a closure keeps its frames."""
        callable_ = Callable(proc, env, proc.placement, owner=env.activation)
        env.define(proc.name, Cell(proc.ctype, callable_))
        return callable_

    def _declare(self, stmt: DeclStmt, env: Environment) -> None:
        for decl in stmt.decls:
            if isinstance(decl, VarDecl):
                self.declare_var(decl, env)
            elif isinstance(decl, ProcDef) and decl.body is not None:
                self.make_local_procedure(decl, env)

    def _skip(self, stmt: Stmt, env: Environment) -> None:
        """Jumped-over declarations still own their names."""
        if not isinstance(stmt, DeclStmt):
            return
        for decl in stmt.decls:
            if isinstance(decl, StructDecl) or decl.name in env.record:
                continue
            if isinstance(decl, VarDecl):
                env.define(decl.name, Cell(decl.ctype, default_value(decl.ctype, self.table)))
            elif isinstance(decl, ProcDef) and decl.body is not None:
                self.make_local_procedure(decl, env)

    # -- statements -----------------------------------------------------------

    def exec_block(self, block: Block, env: Environment, seek: Any = None) -> None:
        scope = env.child()
        while True:
            try:
                for stmt in block.stmts:
                    if seek is not None:
                        if seek not in stmt.labels:
                            self._skip(stmt, scope)
                            continue
                        target, seek = seek, None
                        self.exec_stmt(stmt, scope, target)
                    else:
                        self.exec_stmt(stmt, scope)
                return
            except GotoSignal as jump:
                if jump.label not in block.labels:
                    raise
                seek = jump.label

    def exec_stmt(self, stmt: Stmt, env: Environment, seek: Any = None) -> None:
        self._tick(stmt.span)
        if isinstance(stmt, Block):
            self.exec_block(stmt, env, seek)
        elif isinstance(stmt, ExprStmt):
            self.eval_expr(stmt.expr, env)
        elif isinstance(stmt, DeclStmt):
            self._declare(stmt, env)
        elif isinstance(stmt, If):
            if seek is not None:
                branch = stmt.then if seek in stmt.then.labels else stmt.other
                self.exec_stmt(branch, env, seek)
            elif self.truth(stmt.cond, env):
                self.exec_stmt(stmt.then, env)
            elif stmt.other is not None:
                self.exec_stmt(stmt.other, env)
        elif isinstance(stmt, While):
            self._loop(stmt.body, env, seek, cond=stmt.cond, test_first=seek is None)
        elif isinstance(stmt, DoWhile):
            self._loop(stmt.body, env, seek, cond=stmt.cond, test_first=False)
        elif isinstance(stmt, For):
            scope = env.child()
            if stmt.init is not None:
                if seek is None:
                    self.exec_stmt(stmt.init, scope)
                else:
                    self._skip(stmt.init, scope)
            self._loop(stmt.body, scope, seek, cond=stmt.cond, step=stmt.step, test_first=seek is None)
        elif isinstance(stmt, Switch):
            self._switch(stmt, env, seek)
        elif isinstance(stmt, (Case, Default)):
            self.exec_stmt(stmt.stmt, env, None if seek == stmt.key else seek)
        elif isinstance(stmt, Labeled):
            self.exec_stmt(stmt.stmt, env, None if seek == stmt.label else seek)
        elif isinstance(stmt, Break):
            raise BreakSignal()
        elif isinstance(stmt, Continue):
            raise ContinueSignal()
        elif isinstance(stmt, Return):
            value = UNIT if stmt.value is None else self.eval_expr(stmt.value, env)
            raise ReturnSignal(value)
        elif isinstance(stmt, Goto):
            raise GotoSignal(stmt.label, stmt.span)
        elif not isinstance(stmt, Empty):
            raise AtcRuntimeError(DiagnosticCode.E_INTERNAL, stmt.span, f"cannot execute {type(stmt).__name__}")

    def _loop(self, body: Stmt, env: Environment, seek: Any, cond: Optional[Expr] = None,
              step: Optional[Expr] = None, test_first: bool = True) -> None:
        first = True
        while True:
            if (test_first or not first) and cond is not None and not self.truth(cond, env):
                return
            try:
                self.exec_stmt(body, env, seek if first else None)
            except BreakSignal:
                return
            except ContinueSignal:
                pass
            first = False
            if step is not None:
                self.eval_expr(step, env)

    def _switch(self, stmt: Switch, env: Environment, seek: Any) -> None:
        if seek is None:
            value = self.eval_expr(stmt.expr, env)
            key = ("case", value)
            if key not in stmt.cases:
                key = ("default",)
                if key not in stmt.cases:
                    return
            seek = key
        try:
            self.exec_stmt(stmt.body, env, seek)
        except BreakSignal:
            pass

    # -- expressions ----------------------------------------------------------

    def truth(self, expr: Expr, env: Environment) -> bool:
        return self._int(self.eval_expr(expr, env), expr.span) != 0

    def _int(self, value: Any, span: Optional[Span]) -> int:
        if not is_int(value):
            raise _type_error(span, f"expected an integer, got {describe(value)}")
        return value

    def eval_expr(self, expr: Expr, env: Environment) -> Any:
        if isinstance(expr, IntLit):
            return wrap_signed(expr.value, 32)
        if isinstance(expr, CharLit):
            return expr.value
        if isinstance(expr, StrLit):
            content = list(expr.value)
            return ArrayDesc(CHAR, ArrayStorage(content + [0]), 0, len(content))
        if isinstance(expr, Ident):
            return self._ident(expr, env)
        if isinstance(expr, Unary):
            return self._unary(expr, env)
        if isinstance(expr, Binary):
            return self._binary(expr, env)
        if isinstance(expr, Assign):
            return self._assign(expr, env)
        if isinstance(expr, Ternary):
            branch = expr.then if self.truth(expr.cond, env) else expr.other
            return self.eval_expr(branch, env)
        if isinstance(expr, Comma):
            self.eval_expr(expr.left, env)
            return self.eval_expr(expr.right, env)
        if isinstance(expr, Call):
            return self.eval_call(expr.callee, expr.args, env, expr.span)
        if isinstance(expr, Index):
            desc = self._array(self.eval_expr(expr.base, env), expr.base.span)
            return desc.read(self._int(self.eval_expr(expr.index, env), expr.index.span), expr.span)
        if isinstance(expr, Member):
            return self._field(self.eval_expr(expr.base, env), expr).get()
        if isinstance(expr, SizeofExpr):
            return builtin_sizeof(expr.operand, self.table, expr.span)
        if isinstance(expr, SizeofType):
            return sizeof_type(expr.target, self.table, expr.span)
        if isinstance(expr, LengthOf):
            return builtin_length(self.eval_expr(expr.operand, env), expr.span)
        if isinstance(expr, Cast):
            value = self.eval_expr(expr.operand, env)
            if expr.target.kind == "void":
                return UNIT
            return coerce(expr.target, self._int(value, expr.operand.span))
        if isinstance(expr, InitList):
            raise _type_error(expr.span, "braced list outside an initializer")
        raise AtcRuntimeError(DiagnosticCode.E_INTERNAL, expr.span, f"cannot evaluate {type(expr).__name__}")

    def _ident(self, expr: Ident, env: Environment) -> Any:
        symbol = expr.symbol
        if symbol is not None and symbol.kind == "builtin":
            return self.builtins[expr.name]
        cell = env.lookup(expr.name)
        if cell is None:
            if expr.name in self.builtins:
                return self.builtins[expr.name]
            raise _type_error(expr.span, f"'{expr.name}' has no definition")
        return cell.get()

    def _unary(self, expr: Unary, env: Environment) -> int:
        op = expr.op
        if op.startswith(("pre", "post")):
            ref = self.lvalue(expr.operand, env)
            old = self._int(ref.get(), expr.operand.span)
            new = coerce(ref.ctype, old + 1 if op.endswith("++") else old - 1)
            ref.set(new)
            return new if op.startswith("pre") else old
        value = self._int(self.eval_expr(expr.operand, env), expr.operand.span)
        if op == "-":
            return wrap_signed(-value, 32)
        if op == "!":
            return int(value == 0)
        if op == "~":
            return wrap_signed(~value, 32)
        return value

    def _binary(self, expr: Binary, env: Environment) -> int:
        if expr.op == "&&":
            return int(self.truth(expr.left, env) and self.truth(expr.right, env))
        if expr.op == "||":
            return int(self.truth(expr.left, env) or self.truth(expr.right, env))
        left = self._int(self.eval_expr(expr.left, env), expr.left.span)
        right = self._int(self.eval_expr(expr.right, env), expr.right.span)
        result = apply_int_op(expr.op, left, right)
        if result is None:
            raise AtcRuntimeError(DiagnosticCode.E_DIV_ZERO, expr.span, f"'{left} {expr.op} {right}' overflows")
        return result

    def _assign(self, expr: Assign, env: Environment) -> Any:
        ref = self.lvalue(expr.target, env)
        if expr.op == "=":
            value = copy_value(ref.ctype, self.eval_expr(expr.value, env), self.table)
        else:
            old = self._int(ref.get(), expr.target.span)
            operand = self._int(self.eval_expr(expr.value, env), expr.value.span)
            result = apply_int_op(expr.op[:-1], old, operand)
            if result is None:
                raise AtcRuntimeError(DiagnosticCode.E_DIV_ZERO, expr.span,
                                      f"'{old} {expr.op[:-1]} {operand}' overflows")
            value = coerce(ref.ctype, result)
        ref.set(value)
        return value

    def _array(self, value: Any, span: Optional[Span]) -> ArrayDesc:
        if not isinstance(value, ArrayDesc):
            raise _type_error(span, f"{describe(value)} is not an array")
        return value

    def _field(self, value: Any, expr: Member) -> Cell:
        if not isinstance(value, StructVal) or expr.name not in value.fields:
            raise _type_error(expr.span, f"{describe(value)} has no member '{expr.name}'")
        return value.fields[expr.name]

    def lvalue(self, expr: Expr, env: Environment) -> Any:
        """A designator: a variable cell, an array element or a struct field."""
        if isinstance(expr, Ident):
            cell = env.lookup(expr.name)
            if cell is None:
                raise _type_error(expr.span, f"'{expr.name}' is not assignable")
            return cell
        if isinstance(expr, Index):
            desc = self._array(self.eval_expr(expr.base, env), expr.base.span)
            index = self._int(self.eval_expr(expr.index, env), expr.index.span)
            desc.check(index, expr.span)
            return ElementRef(desc, index, expr.span)
        if isinstance(expr, Member):
            return self._field(self.eval_expr(expr.base, env), expr)
        raise _type_error(expr.span, "expression is not assignable")

    # -- calls ----------------------------------------------------------------

    def eval_call(self, callee_expr: Expr, arg_exprs: List[Expr], env: Environment, span: Span) -> Any:
        callee = self.eval_expr(callee_expr, env)
        order = list(range(len(arg_exprs)))
        if self.config.arg_order == ArgOrder.RIGHT_TO_LEFT:
            order.reverse()
        args: List[Any] = [None] * len(arg_exprs)
        for i in order:
            args[i] = self.eval_expr(arg_exprs[i], env)
        return self.invoke(callee, args, span)

    def invoke(self, callee: Any, args: List[Any], span: Span) -> Any:
        if isinstance(callee, Builtin):
            return callee.fn(args, span)
        if not isinstance(callee, Callable):
            raise _type_error(span, f"cannot call {describe(callee)}")
        proc = callee.proc
        if not callee.alive:
            raise AtcRuntimeError(DiagnosticCode.E_ESCAPED_NESTED, span,
                                  f"nested procedure '{proc.name}' called after its parent returned")
        if self.depth >= self.config.max_call_depth:
            raise AtcRuntimeError(DiagnosticCode.E_STEP_LIMIT, span,
                                  f"call depth of {self.config.max_call_depth} exceeded")
        self._tick(span)

        activation = Activation(proc.name)
        frame = Environment(callee.env, activation)
        for param, arg in zip(proc.params, args):
            if param.name is None:
                continue
            if isinstance(arg, ArrayDesc):
                value = ArrayDesc(arg.elem, arg.storage, arg.offset, arg.length)
            else:
                value = copy_value(param.ctype, arg, self.table)
            frame.define(param.name, Cell(param.ctype, value))

        result: Any = None
        self.depth += 1
        try:
            self.exec_block(proc.body, frame)
        except ReturnSignal as ret:
            result = ret.value
        finally:
            activation.alive = False
            self.depth -= 1

        if proc.return_type.kind == "void":
            return UNIT
        if result is None or result is UNIT:
            return default_value(proc.return_type, self.table)
        return copy_value(proc.return_type, result, self.table)


def run(unit: TranslationUnit, table: SymbolTable, config: Optional[EvalConfig] = None,
        output: Optional[BinaryIO] = None) -> int:
    """Initialize globals, execute `main` and return its status."""
    evaluator = Evaluator(table, config, output)

    def execute() -> int:
        try:
            evaluator.load(unit)
            return evaluator.run_main(unit)
        except RecursionError:
            raise AtcRuntimeError(DiagnosticCode.E_STEP_LIMIT, None,
                                  f"recursion too deep at call depth {evaluator.depth}")

    status = run_on_large_stack(execute, evaluator.config.max_call_depth)
    logger.info(f"Program finished with status {status} after {evaluator.steps} steps")
    return status


def eval_expr(expr: Expr, env: Environment, config: Optional[EvalConfig] = None,
              output: Optional[BinaryIO] = None) -> Any:
    """Evaluate one expression against an existing environment."""
    return Evaluator(SymbolTable(), config, output).eval_expr(expr, env)
