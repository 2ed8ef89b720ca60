import pytest

from runtime.values import copy_value, new_array
from state.diagnostics import codes
from state.state import load_config
from tools.ast_nodes import CHAR, INT, ArrayKind, ArraySpec, array_of
from tools.binder import SymbolTable
from workflows.workflow import run_source

BINARY = r'char S[] = "Binary-safe\0 @C String!";'


def run(source, config=None, **overrides):
    config = config or load_config()
    if overrides:
        config = config.with_overrides(**overrides)
    status, output, diags = run_source(source.encode(), config)
    return status, output, codes(diags)


def output_of(source, **overrides):
    status, output, diag_codes = run(source, **overrides)
    assert diag_codes == [], diag_codes
    return output


@pytest.mark.parametrize("source, status", [
    ("int main() { return 0; }", 0),
    ("int main(void) { return 7; }", 7),
    ("int g = 2;\nint main() { return g; }", 2),
    ("int main() { }", 0),
])
def test_exit_status(source, status):
    assert run(source) == (status, b"", [])


def test_sequenced_pair():
    source = 'int I = 0;\nint main() { int a = ++I + ++I; int b = I++ + I++; printf("%d, %d\\n", a, b); return 0; }'
    assert output_of(source) == b"3, 5\n"


def test_sequence_point_example():
    source = 'int main() { int I = 0; int E = ++I + I++ + ++I + I++; printf("E = %d\\n", E); return 0; }'
    assert output_of(source) == b"E = 8\n"


def test_post_increment_difference():
    source = 'int main() { int I = 0; printf("%d %d\\n", I++ - I++, I); return 0; }'
    assert output_of(source) == b"-1 2\n"


def test_ternary_short_circuits():
    assert output_of('int main() { printf("%d", 1 ? 2 : (1 / 0)); return 0; }') == b"2"


def test_logical_short_circuit():
    source = 'int main() { int n = 0; if (0 && (n = 1)) {} if (1 || (n = 2)) {} printf("%d", n); return 0; }'
    assert output_of(source) == b"0"


@pytest.mark.parametrize("order, expected", [("left", b"0, 1\n"), ("right", b"1, 0\n")])
def test_argument_order(order, expected):
    source = 'int main() { int I = 0; printf("%d, %d\\n", I++, I++); return 0; }'
    assert output_of(source, arg_order=order) == expected


@pytest.mark.parametrize("order, expected", [("left", b"A-B\n"), ("right", b"B-A\n")])
def test_procedure_argument_order(order, expected):
    source = (
        'void P(int A, int B) { printf("%c-%c\\n", A + \'A\', B + \'A\'); }\n'
        "int main() { int I = 0; P(I++, I++); return 0; }"
    )
    assert output_of(source, arg_order=order) == expected


def test_argument_order_flip_matches_swapped_call():
    template = 'void P(int a, int b) {{ printf("%d %d\\n", a, b); }}\nint main() {{ int I = 5; P({}); return 0; }}'
    left = output_of(template.format("I++, I *= 2"), arg_order="left")
    right = output_of(template.format("I *= 2, I++"), arg_order="right")
    assert left.split() == right.split()[::-1]


def test_length_of_arrays():
    source = BINARY + '\nint main() { int A[] = {1, 2, 3}; char V[] = S; printf("%d %d %d", length(S), length(A), length(V)); return 0; }'
    assert output_of(source) == b"23 3 23"


def test_sizeof_values():
    source = (
        BINARY + "\nstruct T { int n; int L[0]; };\n"
        'int main() { printf("%d %d %d %d", sizeof(S), sizeof(S) - 1, sizeof(int), sizeof(struct T)); return 0; }'
    )
    assert output_of(source) == b"24 23 4 4"


def test_sizeof_of_copied_array_is_unsized():
    status, _, diag_codes = run(BINARY + "\nint main() { char V[] = S; return sizeof(V); }")
    assert (status, diag_codes) == (101, ["E_SIZEOF_UNSIZED"])


@pytest.mark.parametrize("literal", ['""', '"a"', '"hello world"', r'"with\0zero"'])
def test_length_and_sizeof_agree(literal):
    source = f'char v[] = {literal};\nint main() {{ return sizeof(v) - 1 - length(v); }}'
    assert run(source) == (0, b"", [])


def test_binary_safe_print():
    out = output_of(BINARY + '\nint main() { printf("%.*s", length(S), S); return 0; }')
    assert len(out) == 23
    assert out[11] == 0
    assert out == b"Binary-safe\x00 @C String!"


@pytest.mark.parametrize("count", [0, 5, 11, 12, 23])
def test_precision_controls_byte_count(count):
    out = output_of(BINARY + f'\nint main() {{ printf("%.*s", {count}, S); return 0; }}')
    assert len(out) == count


def test_plain_s_stops_at_zero_byte():
    assert output_of(BINARY + '\nint main() { printf("%s|", S); return 0; }') == b"Binary-safe|"


def test_printf_return_values():
    source = 'int main() { int n = printf("%d, %d\\n", 3, 5); int m = printf("%%"); return n * 10 + m; }'
    assert run(source) == (51, b"3, 5\n%", [])


def test_printf_conversions():
    source = 'int main() { printf("%i %x %c %5d|%-3d|%03d", -4, 255, 65, 42, 7, 9); return 0; }'
    assert output_of(source) == b"-4 ff A    42|7  |009"


def test_putchar_and_puts():
    assert output_of('int main() { putchar(72); puts("i"); return 0; }') == b"Hi\n"


@pytest.mark.parametrize("source, expected", [
    ('int main() { printf("%q"); return 0; }', ["E_BAD_FORMAT"]),
    ('int main() { printf("%d"); return 0; }', ["E_BAD_FORMAT"]),
    ('int main() { printf("%s", 3); return 0; }', ["E_BAD_FORMAT"]),
    ('int main() { printf("%.*s", 4, "abc"); return 0; }', ["E_OOB_INDEX"]),
    ("int main() { int z = 0; return 1 / z; }", ["E_DIV_ZERO"]),
    ("int main() { int z = 0; return 1 % z; }", ["E_DIV_ZERO"]),
    ("int main() { int m = -2147483647 - 1; return m / -1; }", ["E_DIV_ZERO"]),
    ("int main() { int a[3]; a[3] = 1; return 0; }", ["E_OOB_INDEX"]),
    ("int main() { int a[3]; return a[-1]; }", ["E_OOB_INDEX"]),
    ("struct T { int n; int L[0]; };\nint main() { struct T t; t.L[0] = 1; return 0; }", ["E_OOB_INDEX"]),
    ("int f() { return 0; }", ["E_NO_MAIN"]),
    ("int main(int argc) { return 0; }", ["E_NO_MAIN"]),
])
def test_runtime_errors(source, expected):
    status, _, diag_codes = run(source)
    assert status == 101
    assert diag_codes == expected


def test_runtime_error_keeps_earlier_output():
    status, out, diag_codes = run('int main() { int z = 0; printf("before\\n"); return 1 / z; }')
    assert (status, out, diag_codes) == (101, b"before\n", ["E_DIV_ZERO"])


def test_step_limit():
    status, _, diag_codes = run("int main() { while (1) ; return 0; }", step_limit=1000)
    assert (status, diag_codes) == (101, ["E_STEP_LIMIT"])


def test_call_depth_limit():
    config = load_config()
    config = config.model_copy(update={"evaluator": config.evaluator.model_copy(update={"max_call_depth": 200})})
    status, _, diag_codes = run("int f(int n) { return f(n + 1); }\nint main() { return f(0); }", config=config)
    assert (status, diag_codes) == (101, ["E_STEP_LIMIT"])


def test_integer_wraparound_and_division():
    source = 'int main() { int big = 2147483647; printf("%d %d %d %d", big + 1, -7 / 2, -7 % 2, 1 << 33); return 0; }'
    assert output_of(source) == b"-2147483648 -3 -1 2"


def test_char_wraps_at_byte():
    assert output_of('int main() { char c = 255; c++; printf("%d", c); return 0; }') == b"0"


def test_array_initialization_copies():
    source = 'char S[] = "abc";\nint main() { char V[] = S; V[0] = \'X\'; printf("%s %s", S, V); return 0; }'
    assert output_of(source) == b"abc Xbc"


def test_array_parameter_is_a_view():
    source = 'void f(int a[]) { a[0] = 9; }\nint main() { int v[2] = {1, 2}; f(v); printf("%d %d", v[0], length(v)); return 0; }'
    assert output_of(source) == b"9 2"


def test_struct_values_copy():
    source = (
        "struct P { int x; int y; };\n"
        'int main() { struct P p = {1, 2}; struct P q = p; q.x = 5; printf("%d %d %d", p.x, q.x, q.y); return 0; }'
    )
    assert output_of(source) == b"1 5 2"


def test_uninitialized_locals_read_zero():
    assert output_of('int main() { int x; int a[2]; printf("%d %d", x, a[1]); return 0; }') == b"0 0"


def test_control_flow():
    source = """
int main()
{
    int i, total = 0;
    for (i = 0; i < 10; i++) {
        if (i == 2) continue;
        if (i == 6) break;
        total += i;
    }
    do { total++; } while (total < 5);
    switch (total) {
    case 14: printf("fourteen ");
    case 15: printf("fallthrough ");
        break;
    default: printf("other ");
    }
    i = 0;
again:
    i++;
    if (i < 3) goto again;
    printf("%d %d\\n", total, i);
    return 0;
}
"""
    assert output_of(source) == b"fourteen fallthrough 14 3\n"


def test_goto_out_of_nested_loops():
    source = """
int main()
{
    int i, j;
    for (i = 0; i < 5; i++)
        for (j = 0; j < 5; j++)
            if (i * j == 6) goto done;
done:
    printf("%d %d", i, j);
    return 0;
}
"""
    assert output_of(source) == b"2 3"


def test_compound_assignment_reads_target_first():
    source = 'int main() { int x = 1; x += (x = 10); printf("%d", x); return 0; }'
    assert output_of(source) == b"11"


def test_indexed_assignment_evaluates_designator_first():
    source = 'int main() { int a[3]; int i = 0; a[i++] = i; printf("%d %d", a[0], i); return 0; }'
    assert output_of(source) == b"1 1"


def test_runs_are_deterministic():
    source = BINARY + '\nint main() { int I = 0; printf("%d %d %.*s", I++, I++, length(S), S); return 3; }'
    assert run(source) == run(source)


def test_array_copy_takes_the_destination_element_type():
    target = array_of(CHAR, ArraySpec(ArrayKind.FIXED, 3))
    copy = copy_value(target, new_array(INT, [300, 1]), SymbolTable())
    assert copy.elem == CHAR
    assert [copy.read(i) for i in range(copy.length)] == [44, 1, 0]
