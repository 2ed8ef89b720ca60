from pathlib import Path

from state.diagnostics import codes
from state.state import load_config
from workflows.workflow import CompileWorkflow, fixpoint_compile, run_source

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

USED_P = b'#if used P\nvoid P() { printf("P\\n"); }\n#endif\nint main() { printf("main\\n"); return 0; }\n'


def test_unused_procedure_converges_in_two_iterations():
    state = fixpoint_compile(USED_P)
    assert state["iterations"] == 2
    assert "P" not in state["symbols"].globals
    assert [[(r.name, r.value) for r in trace] for trace in state["trace"]] == [[("P", True)], [("P", False)]]


def test_called_procedure_stays():
    source = USED_P.replace(b'printf("main\\n");', b"P();")
    state = fixpoint_compile(source)
    assert state["iterations"] == 1
    assert run_source(source) == (0, b"P\n", [])


def test_plain_program_takes_one_iteration():
    state = fixpoint_compile(b"int main() { return 0; }")
    assert state["iterations"] == 1
    assert state["trace"] == [[]]


def test_conservative_extension():
    """Without predicates, the fixpoint driver adds nothing to the ordinary pipeline."""
    source = b"#define TWICE(x) ((x) * 2)\nint main() { printf(\"%d\", TWICE(21)); return 0; }\n"
    assert fixpoint_compile(source)["iterations"] == 1
    assert run_source(source) == (0, b"42", [])


def test_iteration_cap_reports_divergence():
    config = load_config().with_overrides(max_pp_iters=1)
    state = fixpoint_compile(USED_P, config)
    assert codes(state["diagnostics"]) == ["E_PP_FIXPOINT_DIVERGE"]


def test_oscillating_predicate_diverges():
    source = b"#if !used P\nvoid Q() { P(); }\n#endif\nvoid P() { }\nint main() { return 0; }\n"
    state = fixpoint_compile(source)
    assert codes(state["diagnostics"]) == ["E_PP_FIXPOINT_DIVERGE"]
    assert state["iterations"] == load_config().preprocessor.max_fixpoint_iters


def test_diagnostics_come_from_the_last_iteration():
    source = b"#if used P\nvoid P() { return undefined_name; }\n#endif\nint main() { return 0; }\n"
    state = fixpoint_compile(source)
    assert state["iterations"] == 2
    assert codes(state["diagnostics"]) == []


def test_workflow_statuses():
    workflow = CompileWorkflow()
    assert workflow.run(b"int main() { return 5; }")[0] == 5
    assert workflow.run(b"int main() { return y; }")[0] == 1
    assert workflow.run(b"int main() { int z = 0; return 1 / z; }")[0] == 101
    assert codes(workflow.check(b"int x = ;")) == ["E_PARSE"]


def test_workflow_dumps():
    workflow = CompileWorkflow()
    text, _ = workflow.pp_dump(USED_P)
    assert "void P" not in text
    dump, _ = workflow.ast_dump(b"int main() { return 0; }")
    assert dump.startswith("(TranslationUnit")
    tokens, diagnostics = workflow.lex_dump(b"int")
    assert tokens.startswith("KEYWORD\t1:1@0-3\tint") and diagnostics == []


def test_corpus_sources_compile_deterministically():
    for path in sorted(CORPUS.glob("*.atc")):
        data = path.read_bytes()
        assert run_source(data, file_name=str(path)) == run_source(data, file_name=str(path)), path.name


def test_preprocessed_output_runs_like_its_source():
    cases = [p for p in sorted(CORPUS.glob("*.atc"))
             if not p.with_suffix(".diag").exists() and not p.with_suffix(".flags").exists()]
    assert cases
    workflow = CompileWorkflow()
    for path in cases:
        data = path.read_bytes()
        text, state = workflow.pp_dump(data)
        assert codes(state["diagnostics"]) == [], path.name
        assert run_source(text.encode("utf-8", "surrogateescape")) == run_source(data), path.name


def test_macro_rescan_reaches_the_evaluator():
    source = b"#define f(x) x + 1\n#define F f\nint main() { return F(2); }\n"
    assert run_source(source) == (3, b"", [])
