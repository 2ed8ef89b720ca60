from pathlib import Path

import pytest
from click.testing import CliRunner

from main import cli, main

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False, env={"ATC_COLOR": "0"})


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_bytes(text.encode())
        return str(path)
    return _write


def test_run_prints_output_and_exits_with_main_status(runner, write):
    path = write("hello.atc", 'int main() { printf("hi\\n"); return 3; }')
    result = runner.invoke(cli, ["run", path])
    assert result.exit_code == 3
    assert result.stdout_bytes == b"hi\n"


def test_run_status_is_truncated_to_a_byte(runner, write):
    path = write("big.atc", "int main() { return 300; }")
    assert runner.invoke(cli, ["run", path]).exit_code == 300 & 0xFF


def test_run_argument_order_flag(runner, write):
    path = write("order.atc", 'int main() { int I = 0; printf("%d, %d\\n", I++, I++); return 0; }')
    assert runner.invoke(cli, ["run", path]).stdout_bytes == b"0, 1\n"
    assert runner.invoke(cli, ["run", "--argeval=right", path]).stdout_bytes == b"1, 0\n"


def test_run_compile_error(runner, write):
    path = write("bad.atc", "int main() { return y; }")
    result = runner.invoke(cli, ["run", path])
    assert result.exit_code == 1
    assert result.stdout_bytes == b""
    assert "E_UNDECLARED" in result.stderr
    assert "bad.atc:1:" in result.stderr


def test_run_runtime_error(runner, write):
    path = write("div.atc", 'int main() { int z = 0; printf("x"); return 1 / z; }')
    result = runner.invoke(cli, ["run", path])
    assert result.exit_code == 101
    assert result.stdout_bytes == b"x"
    assert result.stderr.startswith("E_DIV_ZERO")


def test_run_reads_standard_input(runner):
    result = runner.invoke(cli, ["run", "-"], input=b'int main() { printf("in"); return 0; }')
    assert (result.exit_code, result.stdout_bytes) == (0, b"in")


def test_run_stops_at_first_failing_input(runner, write):
    first = write("one.atc", 'int main() { printf("1"); return 4; }')
    second = write("two.atc", 'int main() { printf("2"); return 0; }')
    result = runner.invoke(cli, ["run", first, second])
    assert (result.exit_code, result.stdout_bytes) == (4, b"1")


def test_check_reports_every_input(runner, write):
    good = write("good.atc", "int main() { return 0; }")
    bad = write("bad.atc", "int main() { return y; }")
    ambiguous = write("amb.atc", "int main() { int i = 0, j = 0; return i+++j; }")
    result = runner.invoke(cli, ["check", good, bad, ambiguous])
    assert result.exit_code == 1
    assert result.stderr.count("E_UNDECLARED") == 1
    assert result.stderr.count("E_AMBIGUOUS_PUNCT") == 1
    assert runner.invoke(cli, ["check", good]).exit_code == 0


def test_ambiguous_warning_does_not_fail(runner, write):
    path = write("amb.atc", "int main() { int i = 1, j = 2; return i+++j; }")
    result = runner.invoke(cli, ["run", "--ambiguous=warn", path])
    assert result.exit_code == 3
    assert result.stderr.startswith("warning: E_AMBIGUOUS_PUNCT")


def test_lex_dump(runner, write):
    path = write("tiny.atc", "int x;")
    result = runner.invoke(cli, ["lex", path])
    assert result.exit_code == 0
    assert result.stdout.splitlines() == [
        "KEYWORD\t1:1@0-3\tint",
        "WHITESPACE\t1:4@3-4\t ",
        "IDENTIFIER\t1:5@4-5\tx",
        "PUNCTUATOR\t1:6@5-6\t;",
        "EOF\t1:7@6-6\t",
    ]


def test_pp_output_and_trace(runner):
    result = runner.invoke(cli, ["pp", "--pp-trace", str(CORPUS / "used_p.atc")])
    assert result.exit_code == 0
    assert "void P" not in result.stdout
    assert "main" in result.stdout
    assert result.stderr.splitlines() == ["1\tused\tP\t1", "2\tused\tP\t0"]


def test_ast_dump(runner, write):
    path = write("tree.atc", "int main() { return 1 + 2; }")
    result = runner.invoke(cli, ["ast", path])
    assert result.exit_code == 0
    assert result.stdout.startswith("(TranslationUnit")


def test_corpus_command(runner):
    result = runner.invoke(cli, ["test", str(CORPUS), "-j", "4"])
    assert result.exit_code == 0, result.stdout
    assert result.stdout.splitlines()[-1].endswith(" passed, 0 failed")


@pytest.mark.parametrize("args", [
    ["run"],
    ["run", "--argeval=sideways", "-"],
    ["run", "--no-such-flag", "-"],
    ["frobnicate"],
])
def test_usage_errors_exit_two(runner, args):
    assert runner.invoke(cli, args, input=b"").exit_code == 2


def test_main_returns_usage_status():
    assert main(["run"]) == 2


def test_color_can_be_forced(write):
    path = write("bad.atc", "int main() { return y; }")
    result = CliRunner(mix_stderr=False, env={"ATC_COLOR": "1"}).invoke(cli, ["check", path])
    assert "\x1b[" in result.stderr
