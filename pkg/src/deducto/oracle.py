"""Differential check against a real C++11 compiler.

Each declaration the engine accepts is rendered as C++ and followed by a
``static_assert(std::is_same<decltype(name), ENGINE_TYPE>::value, ...)``.
Declarations the engine rejects are compiled on their own afterwards; a
compiler that accepts one of them is also a divergence.
"""

from __future__ import annotations

import re
import shlex
import shutil
import subprocess
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from .ast import (
    Add,
    Call,
    Declval,
    Expr,
    FloatLit,
    Id,
    IntLit,
    Member,
    New,
    Paren,
    PostInc,
    TCv,
    TConcrete,
    TDecltype,
    TFunc,
    TLRef,
    TName,
    TPointer,
    TRRef,
    TTrait,
    TypeExpr,
    ValueExpr,
    VBool,
    VNot,
    VTrait,
)
from .check import Checker, Report
from .deduce import AutoPattern, FnDeclForm
from .dsl import AssertValue, Decl, FuncDecl, SourceFile, StaticAssertType, StructDecl, VarDecl
from .errors import CompilerUnavailable
from .typemodel import spell

SKIP_EXIT = 77
CXX_FLAGS = ["-std=c++11", "-fsyntax-only", "-x", "c++", "-"]
PRELUDE = "#include <cstddef>\n#include <cstring>\n#include <type_traits>\n#include <utility>\n"
_TAG = "DEDUCTO#"


@dataclass
class Check:
    tag: int
    name: str
    engine: str
    line: int  # source line of the declaration


@dataclass
class Divergence:
    name: str
    kind: str  # type, compile, engine-rejected
    engine: str
    detail: str
    line: int

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "kind": self.kind, "engine": self.engine, "detail": self.detail, "line": self.line}


@dataclass
class Rendering:
    text: str
    checks: list[Check]
    line_owner: dict[int, tuple[str, int]]  # TU line -> (decl name, source line)
    rejected: list[tuple[str, int, str]] = field(default_factory=list)  # (name, line, probe TU)


@dataclass
class DiffReport:
    path: Optional[str]
    checks: int
    divergences: list[Divergence]
    stderr: str = ""

    @property
    def ok(self) -> bool:
        return not self.divergences

    def to_json(self) -> dict[str, Any]:
        return {
            "path": self.path,
            "checks": self.checks,
            "ok": self.ok,
            "divergences": [d.to_json() for d in self.divergences],
        }

    def render_text(self) -> str:
        lines = [f"{self.path or '<input>'}: {self.checks} check(s), {len(self.divergences)} divergence(s)"]
        for d in self.divergences:
            lines.append(f"  line {d.line}: {d.kind} {d.name}: engine '{d.engine}': {d.detail}")
        return "\n".join(lines) + "\n"


# -- rendering ----------------------------------------------------------------


class CppRenderer:
    def __init__(self, function_names: set[str]):
        self.function_names = function_names

    def type(self, te: Union[TypeExpr, ValueExpr]) -> str:
        if isinstance(te, TConcrete):
            return spell(te.type)
        if isinstance(te, TName):
            if te.name == "size_t" and not te.args:
                return "std::size_t"
            if te.name in self.function_names and not te.args:
                return f"decltype({te.name})"
            if te.args:
                return f"{te.name}<{', '.join(self.type(a) for a in te.args)}>"
            return te.name
        if isinstance(te, TCv):
            quals = ("const " if te.const else "") + ("volatile " if te.volatile else "")
            if isinstance(te.inner, (TPointer, TLRef, TRRef, TFunc)):
                return f"{self.type(te.inner)} {quals.strip()}"
            return quals + self.type(te.inner)
        if isinstance(te, TPointer):
            quals = (" const" if te.const else "") + (" volatile" if te.volatile else "")
            return f"{self.type(te.inner)}*{quals}"
        if isinstance(te, TLRef):
            return f"{self.type(te.inner)}&"
        if isinstance(te, TRRef):
            return f"{self.type(te.inner)}&&"
        if isinstance(te, TDecltype):
            return f"decltype({self.expr(te.expr)})"
        if isinstance(te, TTrait):
            if te.name == "result_of" and len(te.args) == 1 and isinstance(te.args[0], TFunc):
                sig = te.args[0]
                callee = self.type(sig.ret)
                if isinstance(sig.ret, TName) and sig.ret.name in self.function_names:
                    callee += "&"
                params = ", ".join(self.type(p) for p in sig.params)
                return f"typename std::result_of<{callee}({params})>::type"
            return f"typename std::{te.name}<{', '.join(self.type(a) for a in te.args)}>::type"
        if isinstance(te, TFunc):
            return f"{self.type(te.ret)}({', '.join(self.type(p) for p in te.params)})"
        if isinstance(te, VTrait):
            return f"std::{te.name}<{', '.join(self.type(a) for a in te.args)}>::value"
        if isinstance(te, VNot):
            return f"!{self.type(te.inner)}"
        if isinstance(te, VBool):
            return "true" if te.value else "false"
        raise TypeError(f"cannot render {te!r}")

    def expr(self, e: Expr) -> str:
        if isinstance(e, IntLit):
            return str(e.value)
        if isinstance(e, FloatLit):
            return repr(e.value)
        if isinstance(e, Id):
            return e.name
        if isinstance(e, Member):
            return f"{self.expr(e.base)}{'->' if e.arrow else '.'}{e.field}"
        if isinstance(e, Call):
            return f"{e.callee}({', '.join(self.expr(a) for a in e.args)})"
        if isinstance(e, Paren):
            return f"({self.expr(e.inner)})"
        if isinstance(e, PostInc):
            return f"{self.expr(e.inner)}++"
        if isinstance(e, Add):
            return f"{self.expr(e.lhs)} + {self.expr(e.rhs)}"
        if isinstance(e, Declval):
            return f"std::declval<{self.type(e.arg)}>()"
        if isinstance(e, New):
            return f"new {self.type(e.type)}()"
        raise TypeError(f"cannot render {e!r}")

    def params(self, params: tuple) -> str:
        return ", ".join(self.type(te) + (f" {n}" if n else "") for n, te in params)

    def form(self, name: str, form: FnDeclForm) -> str:
        if form.style == "trailing":
            return f"auto {name}({self.params(form.params)}) -> {self.type(form.return_type)};"
        return f"{self.type(form.return_type)} {name}({self.params(form.params)});"

    def decl(self, d: Decl, engine_pass: Optional[bool] = None) -> list[str]:
        if isinstance(d, VarDecl):
            spec = str(d.type) if isinstance(d.type, AutoPattern) else self.type(d.type)
            if d.init is not None:
                return [f"{spec} {d.name} = {self.expr(d.init)};"]
            return [f"extern {spec} {d.name};"]
        if isinstance(d, FuncDecl):
            head = []
            if d.template_params:
                head.append("template <" + ", ".join(f"typename {p}" for p in d.template_params) + ">")
            return head + [self.form(d.name, d.form)]
        if isinstance(d, StructDecl):
            head = "template <" + ", ".join(f"typename {p}" for p in d.template_params) + "> " if d.template_params else ""
            if not d.complete:
                return [f"{head}struct {d.name};"]
            body = [f"    {self.type(te)} {n};" for n, te in d.fields]
            body += [f"    static {self.type(te)} {n};" for n, te in d.static_fields]
            body += [f"    {self.form('operator()', f)}" for f in d.call_operators]
            if "abstract" in d.attrs:
                body.append("    virtual void deducto_pure_() = 0;")
            if "nontrivial_copy" in d.attrs:
                body.append(f"    {d.name}& operator=(const {d.name}&);")
            return [f"{head}struct {d.name} {{", *body, "};"]
        if isinstance(d, StaticAssertType):
            expected = "true" if engine_pass else "false"
            return [f"static_assert(std::is_same<decltype({d.name}), {self.type(d.type)}>::value == {expected}, \"{{tag}}\");"]
        return [f"// assert_value({self.expr(d.expr)}, {d.value}) is checked at run time only"]


def _function_names(sf: SourceFile) -> set[str]:
    return {d.name for d in sf.decls if isinstance(d, FuncDecl) and not d.template_params}


def render_cpp(sf: SourceFile, report: Report) -> Rendering:
    """Render the accepted declarations plus one static_assert per engine answer."""
    renderer = CppRenderer(_function_names(sf))
    lines = PRELUDE.splitlines()
    checks: list[Check] = []
    owner: dict[int, tuple[str, int]] = {}
    rejected: list[tuple[str, int, str]] = []
    declared_fns: dict[str, int] = {}

    def emit(text: str, name: str, src_line: int) -> None:
        lines.append(text)
        owner[len(lines)] = (name, src_line)

    for d, entry in zip(sf.decls, report.entries):
        src_line = d.loc.line
        if entry.has_error:
            probe = "\n".join(lines + renderer.decl(d)) + "\n"
            if not isinstance(d, AssertValue):
                rejected.append((entry.name, src_line, probe))
            lines.append(f"// line {src_line}: '{entry.name}' rejected by the engine")
            continue
        if isinstance(d, StaticAssertType):
            tag = len(checks)
            passed = all(a.passed for a in entry.assertions)
            text = renderer.decl(d, passed)[0].replace("{tag}", f"{_TAG}{tag}")
            checks.append(Check(tag, d.name, "pass" if passed else "fail", src_line))
            emit(text, d.name, src_line)
            continue
        for text in renderer.decl(d):
            emit(text, entry.name, src_line)
        if isinstance(d, FuncDecl) and not d.template_params:
            declared_fns[d.name] = declared_fns.get(d.name, 0) + (1 if entry.resolved is not None else 0)
        checkable = isinstance(d, VarDecl) or (
            isinstance(d, FuncDecl) and not d.template_params and _single_overload(report, d.name, sf)
        )
        if checkable and entry.resolved is not None:
            tag = len(checks)
            engine = spell(entry.resolved)
            checks.append(Check(tag, d.name, engine, src_line))
            emit(
                f"static_assert(std::is_same<decltype({d.name}), {engine}>::value, \"{_TAG}{tag}\");",
                d.name,
                src_line,
            )
    return Rendering("\n".join(lines) + "\n", checks, owner, rejected)


def _single_overload(report: Report, name: str, sf: SourceFile) -> bool:
    sigs = {
        e.type
        for d, e in zip(sf.decls, report.entries)
        if isinstance(d, FuncDecl) and d.name == name and not e.has_error
    }
    templates = any(isinstance(d, FuncDecl) and d.name == name and d.template_params for d in sf.decls)
    return len(sigs) == 1 and not templates


# -- compiling ----------------------------------------------------------------


def compiler_argv(cc: str) -> list[str]:
    argv = shlex.split(cc)
    if not argv or shutil.which(argv[0]) is None:
        raise CompilerUnavailable(f"compiler not found: {cc!r}")
    return argv + CXX_FLAGS


def compile_tu(cc: str, text: str, timeout: float = 120.0) -> subprocess.CompletedProcess:
    return subprocess.run(compiler_argv(cc), input=text, capture_output=True, text=True, timeout=timeout)


_ERR_LINE = re.compile(r"^<stdin>:(\d+):(?:\d+:)?\s*error:(.*)$")


def compare(rendering: Rendering, cc: str, path: Optional[str] = None) -> DiffReport:
    result = compile_tu(cc, rendering.text)
    divergences: list[Divergence] = []
    by_tag = {c.tag: c for c in rendering.checks}
    seen_tags: set[int] = set()
    seen_lines: set[int] = set()
    for raw in result.stderr.splitlines():
        m = _ERR_LINE.match(raw)
        if not m:
            continue
        tu_line, message = int(m.group(1)), m.group(2).strip()
        tag_m = re.search(rf"{_TAG}(\d+)", raw)
        if tag_m and "static" in message.lower():
            tag = int(tag_m.group(1))
            if tag in by_tag and tag not in seen_tags:
                seen_tags.add(tag)
                c = by_tag[tag]
                divergences.append(Divergence(c.name, "type", c.engine, message, c.line))
            continue
        if tu_line in seen_lines:
            continue
        seen_lines.add(tu_line)
        name, src_line = rendering.line_owner.get(tu_line, ("<prelude>", 0))
        divergences.append(Divergence(name, "compile", "accepted", message, src_line))
    if result.returncode != 0 and not divergences:
        divergences.append(Divergence("<tu>", "compile", "accepted", result.stderr.strip()[:500], 0))
    for name, src_line, probe in rendering.rejected:
        if compile_tu(cc, probe).returncode == 0:
            divergences.append(
                Divergence(name, "engine-rejected", "error", "the compiler accepts this declaration", src_line)
            )
    return DiffReport(path, len(rendering.checks), divergences, result.stderr)


def diff_oracle(sf: SourceFile, cc: str) -> DiffReport:
    """Check ``sf`` with the engine and compare every answer with ``cc``."""
    compiler_argv(cc)  # fail fast when the compiler is missing
    report = Checker(sf).run()
    return compare(render_cpp(sf, report), cc, sf.path)
