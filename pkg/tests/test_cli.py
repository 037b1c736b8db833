import json
import os
import subprocess
import sys

from hypothesis import given, settings, strategies as st

from deducto.check import check_text
from deducto.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from deducto.oracle import SKIP_EXIT

from support import CORPUS, FIXTURES, REPO

GOOD = os.path.join(FIXTURES, "mixed", "good.tdl")
WRONG = os.path.join(FIXTURES, "mixed", "wrong.tdl")


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_check_text_and_json(capsys):
    rc, out, _ = run(capsys, "check", GOOD)
    assert rc == EXIT_OK
    assert "PASS expected int, actual int" in out
    rc, out, _ = run(capsys, "check", WRONG, "--json")
    assert rc == EXIT_FAIL
    data = json.loads(out)
    assert data["failed"] == 1
    assert data["entries"][-1]["assertions"][0] == {"expected": "const double&", "actual": "double", "pass": False}


def test_check_error_diagnostic_exit(capsys):
    rc, out, _ = run(capsys, "check", os.path.join(FIXTURES, "error.tdl"))
    assert rc == EXIT_FAIL
    assert "error 2:1" in out


def test_check_missing_file(capsys):
    rc, _, err = run(capsys, "check", os.path.join(FIXTURES, "absent.tdl"))
    assert rc == EXIT_USAGE and "no such file" in err


def test_corpus(capsys):
    rc, out, _ = run(capsys, "corpus", CORPUS)
    assert rc == EXIT_OK
    assert out.strip().endswith("0 failed")


def test_corpus_reports_the_wrong_file(capsys):
    rc, out, _ = run(capsys, "corpus", os.path.join(FIXTURES, "mixed"), "--json")
    assert rc == EXIT_FAIL
    data = json.loads(out)
    assert [(os.path.basename(r["path"]), r["pass"]) for r in data["results"]] == [
        ("good.tdl", True),
        ("wrong.tdl", False),
    ]


def test_corpus_empty_and_missing(capsys, tmp_path):
    rc, out, _ = run(capsys, "corpus", str(tmp_path))
    assert rc == EXIT_OK and "0 file(s), 0 failed" in out
    rc, _, _ = run(capsys, "corpus", str(tmp_path / "nope"))
    assert rc == EXIT_USAGE


def test_type_subcommand(capsys):
    path = os.path.join(CORPUS, "decltype_cases.tdl")
    assert run(capsys, "type", path, "x5")[:2] == (EXIT_OK, "const double&\n")
    assert run(capsys, "type", path, "x3")[1] == "const int&&\n"
    assert run(capsys, "type", path, "missing")[0] == EXIT_FAIL
    assert run(capsys, "type", os.path.join(FIXTURES, "error.tdl"), "k")[0] == EXIT_FAIL


def test_diff_without_compiler_skips(capsys):
    rc, _, err = run(capsys, "diff", CORPUS, "--cc", "definitely-not-a-compiler-xyz")
    assert rc == SKIP_EXIT
    assert rc not in (EXIT_OK, EXIT_FAIL, EXIT_USAGE)
    assert "skipped" in err


def test_console_script_module_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "deducto.cli", "type", os.path.join(CORPUS, "auto_literals.tdl"), "c"],
        capture_output=True,
        text=True,
        cwd=REPO,
    )
    assert proc.returncode == 0 and proc.stdout == "const int\n"


# exit code 0 exactly when nothing failed and nothing errored
SNIPPETS = [
    "int i{n} = 1;",
    "decltype(i{n}++) j{n};",
    "assert_value(i{n}, 1);",
    "assert_value(i{n}, 2);",
    "static_assert_type(j{n}, int);",
    "static_assert_type(j{n}, long);",
    "decltype(undeclared) u{n};",
    "auto& bad{n} = 5;",
    "const int& ok{n} = 5;",
    "int& w{n};",
]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(SNIPPETS), st.integers(0, 2)), min_size=1, max_size=8))
def test_exit_code_contract(tmp_path_factory, picks):
    text = "\n".join(s.format(n=n) for s, n in picks) + "\n"
    path = tmp_path_factory.mktemp("contract") / "f.tdl"
    path.write_text(text)
    proc_rc = main(["check", str(path), "--json"])
    report = check_text(text)
    clean = report.failed == 0 and report.errors == 0
    assert (proc_rc == EXIT_OK) == clean
    assert proc_rc in (EXIT_OK, EXIT_FAIL)
