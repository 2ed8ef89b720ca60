"""
Library procedures and the `length` / `sizeof` operators.

`%.*s` (and `%.Ns`) writes exactly the requested number of bytes from the
start of the array, zero bytes included; plain `%s` stops at the first zero
byte or the end of the array.
"""
import logging
from typing import Any, BinaryIO, Dict, List, Optional

from state.diagnostics import AtcRuntimeError, DiagnosticCode
from state.span import Span
from tools.ast_nodes import ArrayKind, CType, Expr, Ident, InitList, StrLit
from tools.binder import SymbolTable
from .values import ArrayDesc, Builtin, describe, is_int

logger = logging.getLogger(__name__)

NUMERIC_CONVERSIONS = "diuxXo"


def _bad_format(span: Optional[Span], message: str) -> AtcRuntimeError:
    return AtcRuntimeError(DiagnosticCode.E_BAD_FORMAT, span, message)


def _int_arg(value: Any, conversion: str, span: Optional[Span]) -> int:
    if not is_int(value):
        raise _bad_format(span, f"'%{conversion}' expects an integer, got {describe(value)}")
    return value


def c_string(desc: ArrayDesc) -> bytes:
    """Bytes up to the first zero byte or the end of the array."""
    data = desc.to_bytes()
    cut = data.find(b"\0")
    return data if cut < 0 else data[:cut]


def format_printf(fmt: bytes, args: List[Any], span: Optional[Span] = None) -> bytes:
    out = bytearray()
    position = 0
    i = 0

    def next_arg(conversion: str) -> Any:
        nonlocal position
        if position >= len(args):
            raise _bad_format(span, f"missing argument for '%{conversion}'")
        value = args[position]
        position += 1
        return value

    while i < len(fmt):
        byte = fmt[i]
        if byte != ord("%"):
            out.append(byte)
            i += 1
            continue
        i += 1
        flags = ""
        while i < len(fmt) and chr(fmt[i]) in "-0":
            flags += chr(fmt[i])
            i += 1
        width = 0
        if i < len(fmt) and fmt[i] == ord("*"):
            width = _int_arg(next_arg("*"), "*", span)
            if width < 0:
                flags += "-"
                width = -width
            i += 1
        else:
            start = i
            while i < len(fmt) and chr(fmt[i]).isdigit():
                i += 1
            width = int(fmt[start:i]) if i > start else 0
        precision = None
        if i < len(fmt) and fmt[i] == ord("."):
            i += 1
            if i < len(fmt) and fmt[i] == ord("*"):
                precision = _int_arg(next_arg(".*"), ".*", span)
                if precision < 0:
                    raise _bad_format(span, f"negative precision {precision}")
                i += 1
            else:
                start = i
                while i < len(fmt) and chr(fmt[i]).isdigit():
                    i += 1
                precision = int(fmt[start:i]) if i > start else 0
        if i >= len(fmt):
            raise _bad_format(span, "incomplete conversion at end of format")
        conversion = chr(fmt[i])
        i += 1

        if conversion == "%":
            out += b"%"
            continue
        if conversion in NUMERIC_CONVERSIONS:
            value = _int_arg(next_arg(conversion), conversion, span)
            if conversion in "di":
                sign, digits = ("-", str(-value)) if value < 0 else ("", str(value))
            else:
                unsigned = value & 0xFFFFFFFF
                sign = ""
                digits = {"u": str(unsigned), "x": f"{unsigned:x}",
                          "X": f"{unsigned:X}", "o": f"{unsigned:o}"}[conversion]
            if precision is not None:
                digits = digits.rjust(precision, "0")
            if "0" in flags and "-" not in flags and precision is None:
                digits = digits.rjust(width - len(sign), "0")
            body = (sign + digits).encode()
        elif conversion == "c":
            body = bytes([_int_arg(next_arg("c"), "c", span) & 0xFF])
        elif conversion == "s":
            desc = next_arg("s")
            if not isinstance(desc, ArrayDesc):
                raise _bad_format(span, f"'%s' expects a char array, got {describe(desc)}")
            if precision is None:
                body = c_string(desc)
            else:
                if precision > desc.length:
                    raise AtcRuntimeError(DiagnosticCode.E_OOB_INDEX, span,
                                          f"precision {precision} exceeds array length {desc.length}")
                body = desc.to_bytes(precision)
        else:
            raise _bad_format(span, f"unknown conversion '%{conversion}'")

        if len(body) < width:
            pad = b" " * (width - len(body))
            body = body + pad if "-" in flags else pad + body
        out += body
    return bytes(out)


def builtin_printf(output: BinaryIO, args: List[Any], span: Optional[Span] = None) -> int:
    if not args or not isinstance(args[0], ArrayDesc):
        raise _bad_format(span, "printf needs a format string")
    data = format_printf(c_string(args[0]), args[1:], span)
    output.write(data)
    return len(data)


def builtin_putchar(output: BinaryIO, args: List[Any], span: Optional[Span] = None) -> int:
    value = _int_arg(args[0], "c", span) & 0xFF
    output.write(bytes([value]))
    return value


def builtin_puts(output: BinaryIO, args: List[Any], span: Optional[Span] = None) -> int:
    if not isinstance(args[0], ArrayDesc):
        raise _bad_format(span, f"puts expects a char array, got {describe(args[0])}")
    data = c_string(args[0]) + b"\n"
    output.write(data)
    return len(data)


def make_builtins(output: BinaryIO) -> Dict[str, Builtin]:
    """Library procedures bound to one output sink."""
    table = {
        "printf": builtin_printf,
        "putchar": builtin_putchar,
        "puts": builtin_puts,
    }
    return {name: Builtin(name, lambda args, span, fn=fn: fn(output, args, span)) for name, fn in table.items()}


def builtin_length(value: Any, span: Optional[Span] = None) -> int:
    """Element count of an array descriptor."""
    if not isinstance(value, ArrayDesc):
        raise AtcRuntimeError(DiagnosticCode.E_TYPE, span, f"'length' needs an array, got {describe(value)}")
    return value.length


def _unsized(span: Optional[Span], what: str) -> AtcRuntimeError:
    return AtcRuntimeError(DiagnosticCode.E_SIZEOF_UNSIZED, span, f"size of {what} is not known here")


def sizeof_type(ctype: CType, table: SymbolTable, span: Optional[Span] = None) -> int:
    size = table.size_of(ctype)
    if size is None:
        raise _unsized(span, f"'{ctype.describe()}'")
    return size


def builtin_sizeof(operand: Expr, table: SymbolTable, span: Optional[Span] = None) -> int:
    """
    Static size of an expression, which is never evaluated.

    A dynamic array has a size only when its visible definition carries a
    string literal or braced initializer; the string form counts the
    terminating zero byte.
    """
    if isinstance(operand, StrLit):
        return len(operand.value) + 1
    ctype = operand.ctype
    if ctype is None:
        raise _unsized(span, "expression")
    if ctype.is_array and ctype.array.kind == ArrayKind.DYNAMIC:
        symbol = operand.symbol if isinstance(operand, Ident) else None
        init = getattr(symbol.decl, "init", None) if symbol is not None else None
        elem = sizeof_type(ctype.elem, table, span)
        if isinstance(init, StrLit):
            return (len(init.value) + 1) * elem
        if isinstance(init, InitList):
            return len(init.items) * elem
        raise _unsized(span, f"'{getattr(operand, 'name', ctype.describe())}'")
    return sizeof_type(ctype, table, span)
