import pytest

from state.diagnostics import codes
from workflows.workflow import run_source


def run(source):
    status, output, diags = run_source(source.encode())
    return status, output, codes(diags)


COUNTER = """
int (*Counter(int start))(void)
{
    int count = start;
    int Next(void) { count++; return count; }
    return Next;
}
"""


def test_counters_keep_separate_frames():
    source = COUNTER + 'int main() { int (*a)(void) = Counter(10); int (*b)(void) = Counter(100);\n' \
                       'printf("%d %d %d\\n", a(), a(), b()); return 0; }'
    assert run(source) == (0, b"11 12 101\n", [])


def test_closure_mutation_is_visible_to_running_parent():
    source = """
int main()
{
    int v = 1;
    void Set(void) { v = 5; }
    Set();
    printf("%d", v);
    return 0;
}
"""
    assert run(source) == (0, b"5", [])


def test_closure_captures_parameter():
    source = """
int (*Adder(int k))(int)
{
    int Add(int x) { return x + k; }
    return Add;
}
int main() { printf("%d %d", Adder(5)(3), Adder(-1)(1)); return 0; }
"""
    assert run(source) == (0, b"8 0", [])


def test_two_closures_share_one_frame():
    source = """
void (*inc)(void);
int (*get)(void);
void Make(void)
{
    int n = 0;
    void Inc(void) { n++; }
    int Get(void) { return n; }
    inc = Inc;
    get = Get;
}
int main() { Make(); inc(); inc(); printf("%d", get()); return 0; }
"""
    assert run(source) == (0, b"2", [])


def test_closure_reaches_grandparent_frame():
    source = """
int (*Outer(int a))(void)
{
    int (*Mid(int b))(void)
    {
        int Inner(void) { return a * 10 + b; }
        return Inner;
    }
    return Mid(2);
}
int main() { printf("%d", Outer(1)()); return 0; }
"""
    assert run(source) == (0, b"12", [])


def test_recursive_local_procedure():
    source = """
int main()
{
    int Fact(int n) { return n <= 1 ? 1 : n * Fact(n - 1); }
    printf("%d", Fact(5));
    return 0;
}
"""
    assert run(source) == (0, b"120", [])


def test_nested_call_before_return():
    source = """
int main()
{
    int total = 0;
    volatile void Add(int x) { total += x; }
    Add(2);
    Add(3);
    printf("%d", total);
    return 0;
}
"""
    assert run(source) == (0, b"5", [])


def test_nested_passed_down_while_parent_lives():
    source = """
int Apply(int (*f)(int), int x) { return f(x); }
int main()
{
    int base = 100;
    volatile int AddBase(int x) { return x + base; }
    printf("%d", Apply(AddBase, 5));
    return 0;
}
"""
    assert run(source) == (0, b"105", [])


def test_nested_escape_through_global():
    source = """
void (*Saved)(void);
void Parent(void)
{
    volatile void N(void) { printf("inside\\n"); }
    N();
    Saved = N;
}
int main() { Parent(); Saved(); return 0; }
"""
    assert run(source) == (101, b"inside\n", ["E_ESCAPED_NESTED"])


def test_nested_escape_through_return_value():
    source = """
int (*Make(void))(void)
{
    volatile int N(void) { return 1; }
    return N;
}
int main() { int (*f)(void) = Make(); return f(); }
"""
    assert run(source) == (101, b"", ["E_ESCAPED_NESTED"])


def test_dead_nested_stays_dead():
    source = """
int (*Saved)(void);
int calls;
void Parent(void)
{
    volatile int N(void) { calls++; return calls; }
    Saved = N;
}
int main() { Parent(); Parent(); Saved(); return 0; }
"""
    assert run(source)[2] == ["E_ESCAPED_NESTED"]


def test_nested_inside_still_running_parent_from_deeper_call():
    source = """
void (*hook)(void);
int hits;
void Deep(int n) { if (n > 0) Deep(n - 1); else hook(); }
void Parent(void)
{
    volatile void N(void) { hits++; }
    hook = N;
    Deep(5);
}
int main() { Parent(); printf("%d", hits); return 0; }
"""
    assert run(source) == (0, b"1", [])


@pytest.mark.parametrize("volatile, expected", [("volatile ", ["E_ESCAPED_NESTED"]), ("", [])])
@pytest.mark.parametrize("rounds", [1, 3])
def test_escape_liveness(volatile, expected, rounds):
    source = f"""
int (*p)(void);
int state;
int (*Make(void))(void)
{{
    {volatile}int N(void) {{ state++; return state; }}
    p = N;
    return N;
}}
int main()
{{
    int (*f)(void) = Make();
    int i;
    for (i = 0; i < {rounds}; i++) {{ f(); p(); }}
    return state;
}}
"""
    status, _, diag_codes = run(source)
    assert diag_codes == expected
    if not expected:
        assert status == 2 * rounds
