"""Drive the engine over a parsed file and collect a report."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .ast import Id, classify, evaluate, free_identifiers
from .deduce import AutoPattern, decltype_of, deduce_auto, resolve_function_decl, resolve_type_expr
from .dsl import (
    AssertValue,
    Decl,
    FuncDecl,
    SourceFile,
    StaticAssertType,
    StructDecl,
    VarDecl,
    expected_outcome,
    parse,
    show_expr,
)
from .errors import (
    DeclvalInEvaluatedContext,
    DeductoError,
    DslSyntaxError,
    InvalidDeclaration,
    NonEvaluableExpr,
    UnknownIdentifier,
    UnsupportedPattern,
)
from .resolve import TemplateFunction
from .typemodel import (
    Class,
    ClassDef,
    Env,
    Function,
    FunctionDecl,
    LValueRef,
    RValueRef,
    Scalar,
    ScalarKind,
    Type,
    Variable,
    cv_of,
    is_integral,
    spell,
)


@dataclass
class Assertion:
    expected: str
    actual: str
    passed: bool

    def to_json(self) -> dict[str, Any]:
        return {"expected": self.expected, "actual": self.actual, "pass": self.passed}


@dataclass
class Diagnostic:
    severity: str
    message: str
    line: int
    col: int

    def to_json(self) -> dict[str, Any]:
        return {"severity": self.severity, "message": self.message, "line": self.line, "col": self.col}


@dataclass
class Entry:
    name: str
    kind: str
    line: int
    col: int
    type: Optional[str] = None
    category: Optional[str] = None
    assertions: list[Assertion] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    # engine answer, kept out of the serialized form
    resolved: Optional[Type] = field(default=None, repr=False, compare=False)

    @property
    def has_error(self) -> bool:
        return any(d.severity == "error" for d in self.diagnostics)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "kind": self.kind, "type": self.type}
        if self.category is not None:
            out["category"] = self.category
        out["line"] = self.line
        out["col"] = self.col
        out["assertions"] = [a.to_json() for a in self.assertions]
        out["diagnostics"] = [d.to_json() for d in self.diagnostics]
        return out


@dataclass
class Report:
    path: Optional[str]
    entries: list[Entry] = field(default_factory=list)

    @property
    def assertions(self) -> list[Assertion]:
        return [a for e in self.entries for a in e.assertions]

    @property
    def failed(self) -> int:
        return sum(not a.passed for a in self.assertions)

    @property
    def errors(self) -> int:
        return sum(d.severity == "error" for e in self.entries for d in e.diagnostics)

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.errors == 0

    def entry(self, name: str) -> Entry:
        for e in reversed(self.entries):
            if e.name == name and e.kind in ("var", "function", "template", "struct"):
                return e
        raise KeyError(name)

    def to_json(self) -> dict[str, Any]:
        return {
            "path": self.path,
            "ok": self.ok,
            "assertions": len(self.assertions),
            "failed": self.failed,
            "errors": self.errors,
            "entries": [e.to_json() for e in self.entries],
        }

    def render_text(self) -> str:
        lines = [self.path or "<input>"]
        for e in self.entries:
            where = f"{e.line}:{e.col}"
            head = f"  {where:<7} {e.kind} {e.name}"
            if e.type is not None:
                head += f": {e.type}"
            if e.category is not None:
                head += f" [{e.category}]"
            lines.append(head)
            for a in e.assertions:
                verdict = "PASS" if a.passed else "FAIL"
                lines.append(f"          {verdict} expected {a.expected}, actual {a.actual}")
            for d in e.diagnostics:
                lines.append(f"          {d.severity} {d.line}:{d.col}: {d.message}")
        verdict = "OK" if self.ok else "FAILED"
        lines.append(
            f"  {len(self.assertions)} assertion(s), {self.failed} failed, {self.errors} error(s): {verdict}"
        )
        return "\n".join(lines) + "\n"


def class_def_from(d: StructDecl) -> ClassDef:
    if "nontrivial_copy" in d.attrs:
        trivial = False
    elif "trivial_copy" in d.attrs:
        trivial = True
    else:
        # polymorphic classes never have a trivial copy assignment
        trivial = "abstract" not in d.attrs
    ops = tuple((tuple(te for _, te in f.params), f.return_type) for f in d.call_operators)
    return ClassDef(
        name=d.name,
        template_params=d.template_params,
        fields=dict(d.fields),
        static_fields=dict(d.static_fields),
        call_operators=ops,
        is_abstract="abstract" in d.attrs,
        is_trivially_copy_assignable=trivial,
        complete=d.complete,
    )


def check_template_names(tf: TemplateFunction, env: Env) -> None:
    """Names in a template's return type must be visible where they are written."""
    visible = {n for n, _ in tf.params if n} if tf.style == "trailing" else set()
    for _, te in tf.params:
        for name in free_identifiers(te):
            if env.lookup(name) is None:
                raise UnknownIdentifier(name)
    for name in free_identifiers(tf.return_type):
        if name not in visible and env.lookup(name) is None:
            raise UnknownIdentifier(name)


class Checker:
    """Processes declarations top to bottom in a fresh environment."""

    def __init__(self, sf: SourceFile):
        self.sf = sf
        self.env = Env()
        self.store: dict[str, int] = {}
        self.report = Report(sf.path)

    def run(self) -> Report:
        for d in self.sf.decls:
            self.report.entries.append(self.process(d))
        return self.report

    def process(self, d: Decl) -> Entry:
        entry = self._entry_for(d)
        try:
            if isinstance(d, VarDecl):
                self._var(d, entry)
            elif isinstance(d, FuncDecl):
                self._func(d, entry)
            elif isinstance(d, StructDecl):
                self._struct(d, entry)
            elif isinstance(d, StaticAssertType):
                self._static_assert(d, entry)
            else:
                self._assert_value(d, entry)
        except DeductoError as err:
            entry.diagnostics.append(Diagnostic("error", str(err), d.loc.line, d.loc.col))
        return entry

    def _entry_for(self, d: Decl) -> Entry:
        if isinstance(d, VarDecl):
            return Entry(d.name, "var", d.loc.line, d.loc.col)
        if isinstance(d, FuncDecl):
            return Entry(d.name, "template" if d.is_template else "function", d.loc.line, d.loc.col)
        if isinstance(d, StructDecl):
            return Entry(d.name, "struct", d.loc.line, d.loc.col)
        if isinstance(d, StaticAssertType):
            return Entry(d.name, "static_assert_type", d.loc.line, d.loc.col)
        return Entry(show_expr(d.expr), "assert_value", d.loc.line, d.loc.col)

    def _var(self, d: VarDecl, entry: Entry) -> None:
        env = self.env
        init = d.init
        if init is None and d.ctor_args is not None and len(d.ctor_args) == 1:
            init = d.ctor_args[0]
        if isinstance(d.type, AutoPattern):
            if init is None:
                raise InvalidDeclaration(f"declaration of '{d.name}' with deduced type requires an initializer")
            t = deduce_auto(d.type, init, env)
        else:
            t = resolve_type_expr(d.type, env)
        initialized = d.init is not None or d.ctor_args is not None
        for e in ((d.init,) if d.init is not None else ()) + (d.ctor_args or ()):
            entry.category = classify(e, env).category.value
        self._validate_variable(d.name, t, initialized, entry, d.loc)
        if d.init is not None:
            self._evaluate_initializer(d.name, t, d.init)
        env.declare(d.name, Variable(t))
        entry.type = spell(t)
        entry.resolved = t

    def _validate_variable(self, name: str, t: Type, initialized: bool, entry: Entry, loc: Any) -> None:
        if isinstance(t, Scalar) and t.kind is ScalarKind.VOID:
            raise InvalidDeclaration(f"variable '{name}' has incomplete type 'void'")
        if isinstance(t, Function):
            raise InvalidDeclaration(f"variable '{name}' has function type")
        if isinstance(t, Class):
            defn = self.env.class_def(t.name)
            if not defn.complete:
                raise InvalidDeclaration(f"variable '{name}' has incomplete type '{spell(t)}'")
            if defn.is_abstract:
                raise InvalidDeclaration(f"variable '{name}' has abstract type '{spell(t)}'")
        if not initialized and (isinstance(t, (LValueRef, RValueRef)) or cv_of(t)[0]):
            # acceptable as a declaration of an object defined elsewhere
            entry.diagnostics.append(
                Diagnostic("warning", f"'{name}' of type '{spell(t)}' declared without an initializer", loc.line, loc.col)
            )

    def _evaluate_initializer(self, name: str, t: Type, init: Any) -> None:
        try:
            value, store = evaluate(init, self.env, self.store)
        except NonEvaluableExpr:
            return
        except DeclvalInEvaluatedContext:
            raise
        self.store = store
        if is_integral(t):
            self.store[name] = value

    def _func(self, d: FuncDecl, entry: Entry) -> None:
        env = self.env
        if d.is_template:
            tf = TemplateFunction(d.name, d.template_params, d.form.params, d.form.return_type, d.form.style)
            check_template_names(tf, env)
            env.declare_function(d.name, tf)
            return
        sig = resolve_function_decl(d.form, env)
        env.declare_function(d.name, FunctionDecl(d.name, sig))
        entry.type = spell(sig)
        entry.resolved = sig

    def _struct(self, d: StructDecl, entry: Entry) -> None:
        defn = class_def_from(d)
        self.env.declare_class(defn)
        entry.type = d.name
        if d.complete and not d.template_params:
            try:
                self.env.instantiate(Class(d.name))
            except DeductoError:
                del self.env.names[d.name]
                raise

    def _static_assert(self, d: StaticAssertType, entry: Entry) -> None:
        actual = decltype_of(Id(d.name), self.env)
        expected = resolve_type_expr(d.type, self.env)
        entry.type = spell(actual)
        entry.resolved = actual
        entry.assertions.append(Assertion(spell(expected), spell(actual), expected == actual))

    def _assert_value(self, d: AssertValue, entry: Entry) -> None:
        value, self.store = evaluate(d.expr, self.env, self.store)
        entry.type = "int"
        entry.assertions.append(Assertion(str(d.value), str(value), value == d.value))


def check(sf: SourceFile) -> Report:
    return Checker(sf).run()


def check_text(text: str, path: str | None = None) -> Report:
    try:
        sf = parse(text, path)
    except (DslSyntaxError, UnsupportedPattern) as err:
        line, col = _error_position(err)
        report = Report(path)
        entry = Entry("<parse>", "parse", line, col)
        entry.diagnostics.append(Diagnostic("error", str(err), line, col))
        report.entries.append(entry)
        return report
    return check(sf)


def _error_position(err: DeductoError) -> tuple[int, int]:
    if isinstance(err, DslSyntaxError):
        return err.line, err.col
    head = str(err).split(":", 2)
    try:
        return int(head[0]), int(head[1])
    except (ValueError, IndexError):
        return 0, 0


def check_file(path: str | Path) -> Report:
    path = Path(path)
    return check_text(path.read_text(), str(path))


@dataclass
class FileResult:
    path: str
    expect: str
    report: Report

    @property
    def passed(self) -> bool:
        return self.report.ok == (self.expect == "pass")

    def to_json(self) -> dict[str, Any]:
        return {"path": self.path, "expect": self.expect, "pass": self.passed, "report": self.report.to_json()}


@dataclass
class CorpusSummary:
    directory: str
    files: list[FileResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(f.passed for f in self.files)

    def to_json(self) -> dict[str, Any]:
        return {
            "directory": self.directory,
            "ok": self.ok,
            "files": len(self.files),
            "failed": sum(not f.passed for f in self.files),
            "results": [f.to_json() for f in self.files],
        }

    def render_text(self) -> str:
        lines = []
        for f in self.files:
            verdict = "ok" if f.passed else "FAIL"
            lines.append(f"{verdict:<5} {f.path} (expect {f.expect})")
            if not f.passed:
                lines.extend("      " + line for line in f.report.render_text().splitlines())
        failed = sum(not f.passed for f in self.files)
        lines.append(f"{len(self.files)} file(s), {failed} failed")
        return "\n".join(lines) + "\n"


def run_corpus(directory: str | Path) -> CorpusSummary:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {directory}")
    summary = CorpusSummary(str(directory))
    for path in sorted(directory.glob("*.tdl")):
        text = path.read_text()
        summary.files.append(FileResult(str(path), expected_outcome(text), check_text(text, str(path))))
    return summary
