"""C operator table shared by the parser and the preprocessor expression evaluator."""
from typing import Optional


# Binary operators, higher binds tighter. All are left associative.
BINARY_PRECEDENCE = {
    "||": 4,
    "&&": 5,
    "|": 6,
    "^": 7,
    "&": 8,
    "==": 9, "!=": 9,
    "<": 10, ">": 10, "<=": 10, ">=": 10,
    "<<": 11, ">>": 11,
    "+": 12, "-": 12,
    "*": 13, "/": 13, "%": 13,
}

COMMA_PRECEDENCE = 1
ASSIGN_PRECEDENCE = 2
TERNARY_PRECEDENCE = 3

ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "^=", "|="})
UNARY_OPS = frozenset({"+", "-", "!", "~"})
INCDEC_OPS = frozenset({"++", "--"})


def wrap_signed(value: int, bits: int) -> int:
    """Two's complement wrap of an unbounded int to `bits` bits."""
    mask = (1 << bits) - 1
    value &= mask
    if value >> (bits - 1):
        value -= 1 << bits
    return value


def trunc_div(a: int, b: int) -> int:
    """C division: quotient truncated toward zero."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def trunc_mod(a: int, b: int) -> int:
    return a - trunc_div(a, b) * b


def apply_int_op(op: str, a: int, b: int) -> Optional[int]:
    """32-bit binary arithmetic; None on division by zero or overflow of INT_MIN / -1."""
    if op in ("/", "%"):
        if b == 0 or (a == -(1 << 31) and b == -1):
            return None
        return trunc_div(a, b) if op == "/" else trunc_mod(a, b)
    if op == "&&":
        return int(a != 0 and b != 0)
    if op == "||":
        return int(a != 0 or b != 0)
    table = {
        "+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b,
        "<<": lambda: a << (b & 31), ">>": lambda: a >> (b & 31),
        "&": lambda: a & b, "|": lambda: a | b, "^": lambda: a ^ b,
        "==": lambda: int(a == b), "!=": lambda: int(a != b),
        "<": lambda: int(a < b), ">": lambda: int(a > b),
        "<=": lambda: int(a <= b), ">=": lambda: int(a >= b),
    }
    return wrap_signed(table[op](), 32)
