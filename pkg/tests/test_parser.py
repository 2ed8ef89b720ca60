import random

import pytest

from state.diagnostics import codes
from tools.ast_nodes import (
    ArrayKind, Assign, Binary, Call, DeclStmt, Ident, IntLit, LengthOf, Member, Placement, ProcDef,
    SizeofExpr, SizeofType, StructDecl, Ternary, Unary, VarDecl, children,
)
from tools.ast_printer import expr_source, to_sexpr, to_source
from tools.lexer import lex
from tools.operators import BINARY_PRECEDENCE
from tools.parser import ParseError, parse, parse_expression, parse_local_procedure, parser_tool
from tools.tokens import TokenCursor

PROGRAM = """
struct S { int n; int L[0]; };
int table[4] = {1, 2, 3, 4};
char name[] = "abc";
int (*Counter(int start))(void)
{
    int count = start;
    int Next(void) { count++; return count; }
    return Next;
}
int main()
{
    struct S s;
    int i, total = 0;
    volatile void Log(void) { total += 1; }
    for (i = 0; i < length(table); i++) {
        if (table[i] % 2 == 0) continue; else total += table[i];
    }
    switch (total) { case 4: total = -total; break; default: ; }
    do { i--; } while (i > 0);
again:
    if (i++ < 2) goto again;
    s.n = sizeof(int) + sizeof name;
    return total > 0 ? total : (total, 0);
}
"""


def parse_text(text):
    tokens, _ = lex(text.encode())
    return parse(tokens)


def expression(text):
    tokens, _ = lex(text.encode())
    return parse_expression(TokenCursor(tokens))


def test_program_parses_cleanly():
    unit, diags = parse_text(PROGRAM)
    assert diags == []
    assert [type(d).__name__ for d in unit.decls] == ["StructDecl", "VarDecl", "VarDecl", "ProcDef", "ProcDef"]


def test_dynamic_array_declaration():
    unit, _ = parse_text("int A[];")
    decl = unit.decls[0]
    assert isinstance(decl, VarDecl)
    assert decl.ctype.array.kind == ArrayKind.DYNAMIC


def test_flex_member_last():
    unit, diags = parse_text("struct S { int n; int L[0]; };")
    struct = unit.decls[0]
    assert isinstance(struct, StructDecl)
    assert struct.members[-1].ctype.array.kind == ArrayKind.FLEX_ZERO
    assert diags == []


@pytest.mark.parametrize("text", ["struct S { int L[0]; int n; };", "int L[0];"])
def test_flex_not_last(text):
    _, diags = parse_text(text)
    assert codes(diags) == ["E_FLEX_NOT_LAST"]


def test_spaced_increment_plus():
    tree = expression("i++ +j")
    assert tree == Binary("+", Unary("post++", Ident("i")), Ident("j"))


def test_sequence_point_expression_shape():
    tree = expression("++I + I++ + ++I + I++")
    assert isinstance(tree, Binary)
    assert isinstance(tree.left, Binary) and isinstance(tree.left.left, Binary)
    ops = [tree.left.left.left.op, tree.left.left.right.op, tree.left.right.op, tree.right.op]
    assert ops == ["pre++", "post++", "pre++", "post++"]


def test_assignment_is_right_associative():
    assert expression("a = b = c") == Assign("=", Ident("a"), Assign("=", Ident("b"), Ident("c")))


def test_ternary_nests_to_the_right():
    tree = expression("a ? b : c ? d : e")
    assert isinstance(tree, Ternary) and isinstance(tree.other, Ternary)


def test_length_and_sizeof_forms():
    assert expression("length(S)") == LengthOf(Ident("S"))
    assert isinstance(expression("sizeof(int)"), SizeofType)
    assert isinstance(expression("sizeof x"), SizeofExpr)
    assert isinstance(expression("sizeof(x)"), SizeofExpr)


def test_arrow_is_member_access():
    tree = expression("d->A")
    assert isinstance(tree, Member) and tree.name == "A"


def test_adjacent_strings_concatenate():
    assert expression('"ab" "cd"').value == b"abcd"


@pytest.mark.parametrize("text", ["&x", "*p", "(a + b", "a +"])
def test_malformed_expressions(text):
    with pytest.raises(ParseError):
        expression(text)


def test_local_procedure_placement():
    nested = parse_local_procedure(TokenCursor(lex(b"volatile void N() { }")[0]))
    closure = parse_local_procedure(TokenCursor(lex(b"void C() { }")[0]))
    assert nested.placement == Placement.NESTED
    assert closure.placement == Placement.CLOSURE


def test_top_level_placement_and_volatile_note():
    unit, diags = parse_text("volatile void F() { }\nvolatile int x;")
    assert unit.decls[0].placement == Placement.TOP_LEVEL
    assert codes(diags) == []
    assert codes(diags, include_notes=True) == ["N_VOLATILE_IGNORED", "N_VOLATILE_IGNORED"]


def test_procedure_returning_procedure():
    unit, diags = parse_text("int (*Counter(int start))(void) { return 0; }")
    proc = unit.decls[0]
    assert isinstance(proc, ProcDef)
    assert proc.return_type.is_proc and proc.return_type.params == ()
    assert [p.name for p in proc.params] == ["start"]
    assert diags == []


def test_procedure_variable_declarator():
    unit, _ = parse_text("int (*op)(int, int);")
    decl = unit.decls[0]
    assert decl.name == "op" and decl.ctype.is_proc and len(decl.ctype.params) == 2


def test_recovery_reports_several_errors():
    _, diags = parse_text("int main() { x = ; y = ; return 0; }\nint ok;")
    assert codes(diags) == ["E_PARSE", "E_PARSE"]


def test_round_trip_through_source():
    unit, _ = parse_text(PROGRAM)
    again, diags = parse_text(to_source(unit))
    assert diags == []
    assert again == unit


def test_spans_nest():
    unit, _ = parse_text(PROGRAM)

    def check(node):
        for child in children(node):
            assert node.span.contains(child.span), f"{type(child).__name__} escapes {type(node).__name__}"
            check(child)

    check(unit)


def test_sexpr_dump_mentions_nodes():
    unit, _ = parse_text("int main() { return 1 + 2; }")
    dump = to_sexpr(unit)
    assert dump.startswith("(TranslationUnit")
    assert "(Binary + @1:21" in dump


# -- precedence conformance ---------------------------------------------------

OPERATORS = ["+", "-", "*", "/", "%", "<<", ">>", "<", "==", "&", "^", "|", "&&", "||"]


def parenthesize(operands, operators):
    """Shunting-yard over the precedence table; returns fully parenthesized text."""
    output = []
    stack = []

    def reduce():
        op = stack.pop()
        right = output.pop()
        left = output.pop()
        output.append(f"({left} {op} {right})")

    output.append(operands[0])
    for op, operand in zip(operators, operands[1:]):
        while stack and BINARY_PRECEDENCE[stack[-1]] >= BINARY_PRECEDENCE[op]:
            reduce()
        stack.append(op)
        output.append(operand)
    while stack:
        reduce()
    return output[0]


def test_precedence_matches_table():
    rng = random.Random(20240517)
    for _ in range(500):
        count = rng.randint(1, 8)
        operands = [rng.choice(["a", "b", "c", "1", "2"]) for _ in range(count + 1)]
        operators = [rng.choice(OPERATORS) for _ in range(count)]
        flat = operands[0] + "".join(f" {op} {x}" for op, x in zip(operators, operands[1:]))
        assert expression(flat) == expression(parenthesize(operands, operators)), flat


def test_printed_expression_reparses():
    rng = random.Random(7)
    for _ in range(200):
        operands = [rng.choice(["x", "y", "3"]) for _ in range(5)]
        operators = [rng.choice(OPERATORS) for _ in range(4)]
        flat = operands[0] + "".join(f" {op} {x}" for op, x in zip(operators, operands[1:]))
        tree = expression(flat)
        assert expression(expr_source(tree)) == tree


def test_call_arguments_stop_at_comma():
    tree = expression("f(a, (b, c))")
    assert isinstance(tree, Call) and len(tree.args) == 2


def test_negative_literal_is_unary():
    assert expression("-5") == Unary("-", IntLit(5))


def test_parser_tool_result():
    tokens, _ = lex(b"int main() { return 0; }")
    result = parser_tool.execute(tokens)
    assert result.success
    assert parser_tool.format_result(result.data).startswith("(TranslationUnit")
    rejected = parser_tool.execute(b"int main() { return 0; }")
    assert not rejected.success
    assert rejected.error == "tokens must be a sequence of Token"
