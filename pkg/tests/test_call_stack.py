import sys
from concurrent.futures import ThreadPoolExecutor

import pytest

from runtime.call_stack import MAX_STACK_BYTES, MIN_STACK_BYTES, recursion_limit, run_on_large_stack, stack_bytes_for
from state.diagnostics import codes
from state.state import load_config
from workflows.workflow import run_source

SUM = b'int sum(int n) { return n ? n + sum(n - 1) : 0; }\nint main() { printf("%d", sum(%d)); return 0; }\n'
RUNAWAY = b"int f(int n) { return f(n + 1); }\nint main() { return f(0); }\n"


def sum_program(n):
    return SUM.replace(b"sum(%d)", b"sum(" + str(n).encode() + b")")


def with_call_depth(depth):
    config = load_config()
    return config.model_copy(update={"evaluator": config.evaluator.model_copy(update={"max_call_depth": depth})})


def test_deep_recursion_under_default_config():
    assert run_source(sum_program(20000)) == (0, b"200010000", [])


def test_runaway_recursion_is_a_runtime_error():
    status, output, diags = run_source(RUNAWAY, with_call_depth(5000))
    assert (status, output, codes(diags)) == (101, b"", ["E_STEP_LIMIT"])


def test_runaway_recursion_under_default_config():
    status, _, diags = run_source(RUNAWAY)
    assert status == 101
    assert codes(diags) == ["E_STEP_LIMIT"]


def test_recursion_limit_is_restored_after_a_run():
    before = sys.getrecursionlimit()
    run_source(sum_program(3000))
    assert sys.getrecursionlimit() == before


def test_concurrent_deep_runs():
    before = sys.getrecursionlimit()
    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(lambda n: run_source(sum_program(n)), [8000, 9000, 10000, 11000] * 2))
    expected = [(0, str(n * (n + 1) // 2).encode(), []) for n in [8000, 9000, 10000, 11000] * 2]
    assert results == expected
    assert sys.getrecursionlimit() == before


def test_overlapping_limits_stay_raised_until_the_last_exit():
    before = sys.getrecursionlimit()
    with recursion_limit(before + 5000):
        with recursion_limit(before + 100):
            assert sys.getrecursionlimit() == before + 5000
        assert sys.getrecursionlimit() == before + 5000
    assert sys.getrecursionlimit() == before


def test_stack_size_is_clamped():
    assert stack_bytes_for(1) == MIN_STACK_BYTES
    assert stack_bytes_for(10 ** 9) == MAX_STACK_BYTES


def test_errors_cross_the_thread():
    def boom():
        raise KeyError("inside")

    with pytest.raises(KeyError, match="inside"):
        run_on_large_stack(boom, 10)
    assert run_on_large_stack(lambda: 42, 10) == 42
