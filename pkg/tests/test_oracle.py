import glob
import os

import pytest

from deducto.check import Diagnostic, check
from deducto.dsl import parse
from deducto.errors import CompilerUnavailable
from deducto.gen import GenConfig, generate_programs
from deducto.oracle import compare, compiler_argv, diff_oracle, render_cpp
from deducto.typemodel import Scalar, ScalarKind

from support import CORPUS, FIXTURES, find_compiler

CC = find_compiler()
needs_cc = pytest.mark.skipif(CC is None, reason="no C++ compiler on PATH")


def rendered(text):
    sf = parse(text)
    return render_cpp(sf, check(sf))


def test_render_qualifies_library_names():
    r = rendered(
        "struct [[abstract]] S { int a; };\n"
        "decltype(declval<S>().a) x;\n"
        "typename enable_if<is_abstract<S>::value, int>::type y;\n"
    )
    assert "virtual void deducto_pure_() = 0;" in r.text
    assert "extern decltype(std::declval<S>().a) x;" in r.text
    assert "typename std::enable_if<std::is_abstract<S>::value, int>::type y;" in r.text
    assert 'static_assert(std::is_same<decltype(x), int>::value, "DEDUCTO#0");' in r.text
    assert [c.name for c in r.checks] == ["x", "y"]


def test_render_result_of_on_a_function_name():
    r = rendered("int fun(int);\ntypename result_of<fun(int)>::type r;")
    assert "typename std::result_of<decltype(fun)&(int)>::type" in r.text


def test_render_skips_rejected_declarations_but_probes_them():
    r = rendered("int i;\ndecltype(nope) k;\n")
    assert "'k' rejected by the engine" in r.text
    assert [name for name, _, _ in r.rejected] == ["k"]
    assert "decltype(nope) k" in r.rejected[0][2]


def test_missing_compiler():
    with pytest.raises(CompilerUnavailable):
        compiler_argv("definitely-not-a-compiler-xyz")
    with pytest.raises(CompilerUnavailable):
        diff_oracle(parse("int i;"), "definitely-not-a-compiler-xyz")


@needs_cc
@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(CORPUS, "*.tdl"))), ids=os.path.basename)
def test_corpus_agrees_with_compiler(path):
    report = diff_oracle(parse(open(path).read(), path), CC)
    assert report.ok, report.render_text()


@needs_cc
def test_patched_engine_answer_is_caught():
    sf = parse(open(os.path.join(CORPUS, "decltype_cases.tdl")).read())
    report = check(sf)
    report.entry("x2").resolved = Scalar(ScalarKind.FLOAT)
    diff = compare(render_cpp(sf, report), CC)
    assert len(diff.divergences) == 1
    (d,) = diff.divergences
    assert (d.name, d.kind, d.engine) == ("x2", "type", "float")


@needs_cc
def test_engine_rejection_accepted_by_compiler_is_caught():
    sf = parse("int i;\nint j;\n")
    report = check(sf)
    report.entries[1].diagnostics = [Diagnostic("error", "planted", 2, 1)]
    diff = compare(render_cpp(sf, report), CC)
    assert [(d.name, d.kind) for d in diff.divergences] == [("j", "engine-rejected")]


@needs_cc
def test_generated_programs_agree_with_compiler():
    for sf in generate_programs(GenConfig(seed=11, count=60, batch=60)):
        report = diff_oracle(sf, CC)
        assert report.ok, report.render_text()
        assert report.checks >= 60


@needs_cc
def test_member_driven_triviality_agrees_with_compiler():
    path = os.path.join(FIXTURES, "trivial_copy.tdl")
    sf = parse(open(path).read(), path)
    assert check(sf).ok
    report = diff_oracle(sf, CC)
    assert report.ok, report.render_text()
    assert report.checks == 10
