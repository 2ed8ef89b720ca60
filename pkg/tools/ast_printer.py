"""Source and S-expression renderings of the syntax tree."""
from typing import List, Optional, Tuple

from .ast_nodes import (
    ArrayKind, Assign, Binary, Block, Break, Call, Case, Cast, CharLit, Comma, Continue, CType,
    DeclStmt, Default, DoWhile, Empty, Expr, ExprStmt, For, Goto, Ident, If, Index, InitList, IntLit,
    Labeled, LengthOf, Member, Node, Param, ProcDef, Return, SizeofExpr, SizeofType, Stmt, StrLit,
    StructDecl, StructMember, Switch, Ternary, TranslationUnit, Unary, VarDecl, While,
)

SKIPPED_FIELDS = frozenset({"span", "ctype", "labels", "symbol", "cases", "const"})
INDENT = "    "


def escape_bytes(data: bytes, quote: str) -> str:
    out = []
    for byte in data:
        ch = chr(byte)
        if ch == quote or ch == "\\":
            out.append("\\" + ch)
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif 0x20 <= byte < 0x7F:
            out.append(ch)
        else:
            out.append(f"\\{byte:03o}")
    return "".join(out)


# -- source -------------------------------------------------------------------

def split_declarator(name: Optional[str], ctype: CType) -> Tuple[str, str]:
    """Base type and the declarator that follows it: ("int", "x[3]")."""
    label = name or ""
    if ctype.is_array:
        spec = ctype.array
        size = "" if spec.kind == ArrayKind.DYNAMIC else str(spec.size)
        return type_name(ctype.elem), f"{label}[{size}]"
    if ctype.is_proc:
        return type_name(ctype.elem), f"(*{label})({param_types(ctype)})"
    return type_name(ctype), label


def declarator(name: Optional[str], ctype: CType) -> str:
    """`int x`, `char s[]`, `int (*f)(int)`."""
    base, tail = split_declarator(name, ctype)
    if not tail or tail.startswith("["):
        return base + tail
    return f"{base} {tail}"


def type_name(ctype: CType) -> str:
    if ctype.kind == "struct":
        return f"struct {ctype.tag}"
    if ctype.is_array or ctype.is_proc:
        return declarator(None, ctype)
    return ctype.kind


def param_types(ctype: CType) -> str:
    return ", ".join(type_name(p) for p in ctype.params) or "void"


def expr_source(expr: Expr) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, CharLit):
        return "'" + escape_bytes(bytes([expr.value & 0xFF]), "'") + "'"
    if isinstance(expr, StrLit):
        return '"' + escape_bytes(expr.value, '"') + '"'
    if isinstance(expr, Ident):
        return expr.name
    if isinstance(expr, Unary):
        operand = _wrapped(expr.operand)
        if expr.op.startswith("pre"):
            return expr.op[3:] + operand
        if expr.op.startswith("post"):
            return operand + expr.op[4:]
        return expr.op + operand
    if isinstance(expr, Binary):
        return f"{_wrapped(expr.left)} {expr.op} {_wrapped(expr.right)}"
    if isinstance(expr, Assign):
        return f"{_wrapped(expr.target)} {expr.op} {_wrapped(expr.value)}"
    if isinstance(expr, Ternary):
        return f"{_wrapped(expr.cond)} ? {_wrapped(expr.then)} : {_wrapped(expr.other)}"
    if isinstance(expr, Comma):
        return f"{_wrapped(expr.left)}, {_wrapped(expr.right)}"
    if isinstance(expr, Call):
        return f"{_wrapped(expr.callee)}({', '.join(_wrapped(a) for a in expr.args)})"
    if isinstance(expr, Index):
        return f"{_wrapped(expr.base)}[{expr_source(expr.index)}]"
    if isinstance(expr, Member):
        return f"{_wrapped(expr.base)}{'->' if expr.arrow else '.'}{expr.name}"
    if isinstance(expr, SizeofExpr):
        return f"sizeof {_wrapped(expr.operand)}"
    if isinstance(expr, SizeofType):
        return f"sizeof({type_name(expr.target)})"
    if isinstance(expr, LengthOf):
        return f"length({expr_source(expr.operand)})"
    if isinstance(expr, Cast):
        return f"({type_name(expr.target)}){_wrapped(expr.operand)}"
    if isinstance(expr, InitList):
        return "{" + ", ".join(expr_source(item) for item in expr.items) + "}"
    raise TypeError(f"cannot print {type(expr).__name__}")


def _wrapped(expr: Expr) -> str:
    text = expr_source(expr)
    if isinstance(expr, (IntLit, CharLit, StrLit, Ident, LengthOf, SizeofType, InitList)):
        if isinstance(expr, IntLit) and expr.value < 0:
            return f"({text})"
        return text
    return f"({text})"


def _decl_source(decl: Node, level: int) -> List[str]:
    pad = INDENT * level
    if isinstance(decl, VarDecl):
        text = declarator(decl.name, decl.ctype)
        if decl.volatile:
            text = "volatile " + text
        if decl.init is not None:
            text += " = " + expr_source(decl.init)
        return [pad + text + ";"]
    if isinstance(decl, StructDecl):
        if decl.members is None:
            return [pad + f"struct {decl.tag};"]
        lines = [pad + f"struct {decl.tag} {{"]
        lines += [pad + INDENT + declarator(m.name, m.ctype) + ";" for m in decl.members]
        return lines + [pad + "};"]
    if isinstance(decl, ProcDef):
        params = ", ".join(declarator(p.name, p.ctype) for p in decl.params) or "void"
        if decl.return_type.is_proc:
            ret = decl.return_type
            head = f"{type_name(ret.elem)} (*{decl.name}({params}))({param_types(ret)})"
        else:
            head = f"{type_name(decl.return_type)} {decl.name}({params})"
        if decl.placement.value == "nested":
            head = "volatile " + head
        if decl.body is None:
            return [pad + head + ";"]
        body = _stmt_source(decl.body, level)
        return [pad + head + " " + body[0].lstrip()] + body[1:]
    raise TypeError(f"cannot print {type(decl).__name__}")


def _var_tail(decl: VarDecl) -> str:
    _, tail = split_declarator(decl.name, decl.ctype)
    if decl.init is not None:
        tail += " = " + expr_source(decl.init)
    return tail


def _decl_group_source(decls: List[Node], level: int) -> List[str]:
    """Declarations that came from one source declaration print as one again."""
    pad = INDENT * level
    head: List[str] = []
    rest = list(decls)
    if rest and isinstance(rest[0], StructDecl) and len(rest) > 1:
        head = _decl_source(rest.pop(0), level)
        head[-1] = head[-1][:-1]
    if rest and all(isinstance(d, VarDecl) for d in rest):
        base, _ = split_declarator(rest[0].name, rest[0].ctype)
        prefix = "volatile " if rest[0].volatile else ""
        tails = ", ".join(_var_tail(d) for d in rest)
        if head:
            head[-1] += " " + tails + ";"
            return head
        return [pad + f"{prefix}{base} {tails};"]
    lines = head
    for decl in rest:
        lines += _decl_source(decl, level)
    return lines


def _stmt_source(stmt: Stmt, level: int) -> List[str]:
    pad = INDENT * level
    if isinstance(stmt, Block):
        lines = [pad + "{"]
        for inner in stmt.stmts:
            lines += _stmt_source(inner, level + 1)
        return lines + [pad + "}"]
    if isinstance(stmt, ExprStmt):
        return [pad + expr_source(stmt.expr) + ";"]
    if isinstance(stmt, DeclStmt):
        return _decl_group_source(stmt.decls, level)
    if isinstance(stmt, If):
        lines = [pad + f"if ({expr_source(stmt.cond)})"] + _stmt_source(stmt.then, level + 1)
        if stmt.other is not None:
            lines += [pad + "else"] + _stmt_source(stmt.other, level + 1)
        return lines
    if isinstance(stmt, While):
        return [pad + f"while ({expr_source(stmt.cond)})"] + _stmt_source(stmt.body, level + 1)
    if isinstance(stmt, DoWhile):
        return [pad + "do"] + _stmt_source(stmt.body, level + 1) + [pad + f"while ({expr_source(stmt.cond)});"]
    if isinstance(stmt, For):
        if stmt.init is None:
            init = ";"
        else:
            init = " ".join(line.strip() for line in _stmt_source(stmt.init, 0))
        cond = expr_source(stmt.cond) if stmt.cond is not None else ""
        step = expr_source(stmt.step) if stmt.step is not None else ""
        return [pad + f"for ({init} {cond}; {step})"] + _stmt_source(stmt.body, level + 1)
    if isinstance(stmt, Switch):
        return [pad + f"switch ({expr_source(stmt.expr)})"] + _stmt_source(stmt.body, level + 1)
    if isinstance(stmt, Case):
        return [pad + f"case {expr_source(stmt.value)}:"] + _stmt_source(stmt.stmt, level + 1)
    if isinstance(stmt, Default):
        return [pad + "default:"] + _stmt_source(stmt.stmt, level + 1)
    if isinstance(stmt, Break):
        return [pad + "break;"]
    if isinstance(stmt, Continue):
        return [pad + "continue;"]
    if isinstance(stmt, Return):
        value = "" if stmt.value is None else " " + expr_source(stmt.value)
        return [pad + f"return{value};"]
    if isinstance(stmt, Goto):
        return [pad + f"goto {stmt.label};"]
    if isinstance(stmt, Labeled):
        return [pad + f"{stmt.label}:"] + _stmt_source(stmt.stmt, level + 1)
    if isinstance(stmt, Empty):
        return [pad + ";"]
    raise TypeError(f"cannot print {type(stmt).__name__}")


def to_source(unit: TranslationUnit) -> str:
    """Re-parseable source text; every compound subexpression is parenthesized."""
    lines: List[str] = []
    for decl in unit.decls:
        lines += _decl_source(decl, 0)
    return "\n".join(lines) + "\n"


# -- S-expressions ------------------------------------------------------------

def _atom(value) -> str:
    if isinstance(value, CType):
        return value.describe().replace(" ", "")
    if isinstance(value, bytes):
        return '"' + escape_bytes(value, '"') + '"'
    if hasattr(value, "value") and not isinstance(value, (int, str)):
        return str(value.value)
    return str(value)


def _sexpr(node: Node, level: int) -> List[str]:
    head = [type(node).__name__]
    kids: List[Node] = []
    for name in node.__dataclass_fields__:
        if name in SKIPPED_FIELDS:
            continue
        value = getattr(node, name)
        if isinstance(value, Node):
            kids.append(value)
        elif isinstance(value, list):
            kids.extend(v for v in value if isinstance(v, Node))
        elif value is None:
            continue
        else:
            head.append(_atom(value))
    if isinstance(node, (VarDecl, Param, StructMember)):
        head.append(_atom(node.ctype))
    span = node.span
    head.append(f"@{span.line}:{span.column}")
    pad = "  " * level
    if not kids:
        return [pad + "(" + " ".join(head) + ")"]
    lines = [pad + "(" + " ".join(head)]
    for kid in kids:
        lines += _sexpr(kid, level + 1)
    lines[-1] += ")"
    return lines


def to_sexpr(unit: Node) -> str:
    """One node per line, children indented under their parent."""
    return "\n".join(_sexpr(unit, 0)) + "\n"
