"""Lexer, parser and printer for the declaration language (``.tdl`` files).

The language is a strict subset of C++ declaration syntax plus two
assertion forms, ``static_assert_type(name, type);`` and
``assert_value(expr, int);``.  ``std::`` qualifiers are dropped and
``typename`` is accepted and ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

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
from .deduce import AutoPattern, FnDeclForm
from .errors import DslSyntaxError, UnsupportedPattern
from .traits import ALL_TRAITS
from .typemodel import spell

# -- declarations -------------------------------------------------------------


@dataclass(frozen=True)
class Loc:
    line: int
    col: int


NOWHERE = Loc(0, 0)


@dataclass(frozen=True)
class VarDecl:
    type: Union[TypeExpr, AutoPattern]
    name: str
    init: Optional[Expr] = None
    ctor_args: Optional[tuple[Expr, ...]] = None
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class StructDecl:
    name: str
    template_params: tuple[str, ...] = ()
    attrs: tuple[str, ...] = ()
    fields: tuple[tuple[str, TypeExpr], ...] = ()
    static_fields: tuple[tuple[str, TypeExpr], ...] = ()
    call_operators: tuple[FnDeclForm, ...] = ()
    complete: bool = True
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class FuncDecl:
    name: str
    form: FnDeclForm
    template_params: tuple[str, ...] = ()
    has_body: bool = False
    loc: Loc = field(default=NOWHERE, compare=False)

    @property
    def is_template(self) -> bool:
        return bool(self.template_params)


@dataclass(frozen=True)
class StaticAssertType:
    name: str
    type: TypeExpr
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class AssertValue:
    expr: Expr
    value: int
    loc: Loc = field(default=NOWHERE, compare=False)


Decl = Union[VarDecl, StructDecl, FuncDecl, StaticAssertType, AssertValue]


@dataclass(frozen=True)
class SourceFile:
    decls: tuple[Decl, ...]
    path: Optional[str] = field(default=None, compare=False)
    expect: str = field(default="pass", compare=False)


STRUCT_ATTRS = ("abstract", "trivial_copy", "nontrivial_copy")

# -- lexer --------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, float, punct, eof
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<float>\d+\.\d*(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>\[\[|\]\]|::|->|\+\+|&&|[(){}<>,;*&+.=!\-\[\]])
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parser -------------------------------------------------------------------

SCALAR_WORDS = frozenset(
    {"void", "bool", "char", "short", "int", "long", "float", "double", "signed", "unsigned"}
)
CV_WORDS = frozenset({"const", "volatile"})
KEYWORDS = SCALAR_WORDS | CV_WORDS | {
    "auto",
    "decltype",
    "struct",
    "class",
    "template",
    "typename",
    "static",
    "operator",
    "new",
    "true",
    "false",
    "static_assert_type",
    "assert_value",
}


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.type_names: set[str] = {"size_t"}
        self.scopes: list[set[str]] = []

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("punct", "ident") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected '{text}'")
        tok = self.tok
        self.pos += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> None:
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise DslSyntaxError(f"{message}, found '{found}'", tok.line, tok.col)

    def loc(self) -> Loc:
        return Loc(self.tok.line, self.tok.col)

    def skip_std(self) -> None:
        if self.tok.kind == "ident" and self.tok.text == "std" and self.peek().text == "::":
            self.pos += 2

    def ident(self) -> str:
        self.skip_std()
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.error("expected an identifier")
        self.pos += 1
        return tok.text

    def is_type_name(self, name: str) -> bool:
        return name in self.type_names or any(name in s for s in self.scopes) or name in ALL_TRAITS

    def starts_type(self, offset: int = 0) -> bool:
        tok = self.peek(offset)
        if tok.kind != "ident":
            return False
        if tok.text == "std" and self.peek(offset + 1).text == "::":
            return self.starts_type(offset + 2)
        if tok.text in SCALAR_WORDS or tok.text in CV_WORDS:
            return True
        if tok.text in ("decltype", "typename", "auto"):
            return True
        return self.is_type_name(tok.text)

    # program

    def parse_file(self) -> tuple[Decl, ...]:
        decls = []
        while self.tok.kind != "eof":
            decls.append(self.parse_decl())
        return tuple(decls)

    def parse_decl(self) -> Decl:
        loc = self.loc()
        if self.at("struct") or self.at("class"):
            return self.parse_struct((), loc)
        if self.at("template"):
            return self.parse_template(loc)
        if self.at("static_assert_type"):
            self.pos += 1
            self.expect("(")
            name = self.ident()
            self.expect(",")
            te = self.parse_type(allow_func=True)
            self.expect(")")
            self.expect(";")
            return StaticAssertType(name, te, loc)
        if self.at("assert_value"):
            self.pos += 1
            self.expect("(")
            expr = self.parse_expr()
            self.expect(",")
            value = self.parse_int()
            self.expect(")")
            self.expect(";")
            return AssertValue(expr, value, loc)
        return self.parse_var_or_func((), loc)

    def parse_int(self) -> int:
        sign = -1 if self.accept("-") else 1
        if self.tok.kind != "int":
            self.error("expected an integer")
        value = int(self.tok.text)
        self.pos += 1
        return sign * value

    def parse_template(self, loc: Loc) -> Decl:
        self.expect("template")
        self.expect("<")
        params = []
        while True:
            if not (self.accept("typename") or self.accept("class")):
                self.error("expected 'typename'")
            params.append(self.ident())
            if not self.accept(","):
                break
        self.expect(">")
        self.scopes.append(set(params))
        try:
            if self.at("struct") or self.at("class"):
                return self.parse_struct(tuple(params), loc)
            decl = self.parse_var_or_func(tuple(params), loc)
            if not isinstance(decl, FuncDecl):
                self.error("expected a function or struct template")
            return decl
        finally:
            self.scopes.pop()

    def parse_attrs(self) -> list[str]:
        attrs = []
        while self.accept("[["):
            name = self._word()
            if name not in STRUCT_ATTRS:
                self.error(f"unknown attribute '{name}'")
            attrs.append(name)
            self.expect("]]")
        return attrs

    def _word(self) -> str:
        text = self.tok.text
        self.pos += 1
        return text

    def parse_struct(self, template_params: tuple[str, ...], loc: Loc) -> StructDecl:
        self.pos += 1  # struct / class
        attrs = self.parse_attrs()
        name = self.ident()
        self.type_names.add(name)
        attrs += self.parse_attrs()
        if self.accept(";"):
            return StructDecl(name, template_params, tuple(attrs), complete=False, loc=loc)
        self.expect("{")
        fields: list[tuple[str, TypeExpr]] = []
        statics: list[tuple[str, TypeExpr]] = []
        ops: list[FnDeclForm] = []
        while not self.accept("}"):
            is_static = self.accept("static")
            if self.at("auto"):
                self.pos += 1
                self.parse_operator_call_name()
                params = self.parse_params()
                self.expect("->")
                ret = self.parse_type()
                self.expect(";")
                ops.append(FnDeclForm("trailing", params, ret))
                continue
            te = self.parse_type()
            if self.at("operator"):
                self.parse_operator_call_name()
                params = self.parse_params()
                self.expect(";")
                ops.append(FnDeclForm("leading", params, te))
                continue
            member = self.ident()
            self.expect(";")
            if any(member == n for n, _ in fields + statics):
                self.error(f"duplicate member '{member}'")
            (statics if is_static else fields).append((member, te))
        self.expect(";")
        dup = [a for a in attrs if attrs.count(a) > 1]
        if dup or ("trivial_copy" in attrs and "nontrivial_copy" in attrs):
            raise DslSyntaxError("conflicting struct attributes", loc.line, loc.col)
        return StructDecl(name, template_params, tuple(attrs), tuple(fields), tuple(statics), tuple(ops), True, loc)

    def parse_operator_call_name(self) -> None:
        self.expect("operator")
        self.expect("(")
        self.expect(")")

    def parse_decl_type(self) -> Union[TypeExpr, AutoPattern]:
        """A declaration's leading type, including the four auto forms."""
        start = self.pos
        const = False
        while self.at("const") or self.at("volatile"):
            if self.tok.text == "volatile":
                break
            const = True
            self.pos += 1
        if self.at("auto"):
            tok = self.tok
            self.pos += 1
            if self.accept("&&"):
                raise UnsupportedPattern(f"{tok.line}:{tok.col}: 'auto&&' is not supported")
            ref = self.accept("&")
            return AutoPattern(const, ref)
        if self.at("decltype") and self.peek().text == "(" and self.peek(2).text == "auto":
            tok = self.tok
            raise UnsupportedPattern(f"{tok.line}:{tok.col}: 'decltype(auto)' is not supported")
        self.pos = start
        return self.parse_type()

    def parse_decl_name(self) -> str:
        if self.accept("operator"):
            if self.accept("+"):
                return "operator+"
            self.error("only 'operator+' may be declared at namespace scope")
        return self.ident()

    def parse_var_or_func(self, template_params: tuple[str, ...], loc: Loc) -> Decl:
        spec = self.parse_decl_type()
        name = self.parse_decl_name()
        if self.at("(") and (name.startswith("operator") or self.peek().text == ")" or self.starts_type(1)):
            params = self.parse_params()
            if isinstance(spec, AutoPattern):
                if spec != AutoPattern():
                    self.error("trailing return requires a plain 'auto'")
                self.expect("->")
                form = FnDeclForm("trailing", params, self.parse_type())
            else:
                form = FnDeclForm("leading", params, spec)
            has_body = self.parse_body_or_semicolon()
            return FuncDecl(name, form, template_params, has_body, loc)
        if template_params:
            self.error("expected a function declaration after template header")
        if name.startswith("operator"):
            self.error("expected '(' after operator name")
        init = None
        ctor_args = None
        if self.accept("="):
            init = self.parse_expr()
        elif self.accept("("):
            args = []
            if not self.at(")"):
                args.append(self.parse_expr())
                while self.accept(","):
                    args.append(self.parse_expr())
            self.expect(")")
            ctor_args = tuple(args)
        self.expect(";")
        return VarDecl(spec, name, init, ctor_args, loc)

    def parse_params(self) -> tuple[tuple[Optional[str], TypeExpr], ...]:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                te = self.parse_type()
                pname = None
                if self.tok.kind == "ident" and self.tok.text not in KEYWORDS:
                    pname = self.ident()
                params.append((pname, te))
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(params)

    def parse_body_or_semicolon(self) -> bool:
        if self.accept(";"):
            return False
        if not self.at("{"):
            self.error("expected ';' or a function body")
        depth = 0
        while True:
            if self.tok.kind == "eof":
                self.error("unterminated function body")
            if self.at("{"):
                depth += 1
            elif self.at("}"):
                depth -= 1
                if depth == 0:
                    self.pos += 1
                    break
            self.pos += 1
        self.accept(";")
        return True

    # types

    def parse_type(self, allow_func: bool = False) -> TypeExpr:
        result = self.parse_type_or_value(allow_func)
        if isinstance(result, (VTrait, VNot, VBool)):
            self.error("expected a type, not a value")
        return result

    def parse_type_or_value(self, allow_func: bool = True) -> Union[TypeExpr, ValueExpr]:
        if self.accept("!"):
            return VNot(self.parse_value())
        if self.at("true") or self.at("false"):
            return VBool(self._word() == "true")
        self.accept("typename")
        const = volatile = False
        while self.at("const") or self.at("volatile"):
            if self._word() == "const":
                const = True
            else:
                volatile = True
        base = self.parse_base_type()
        if isinstance(base, VTrait):
            if const or volatile:
                self.error("cv-qualifier on a value")
            return base
        while self.at("const") or self.at("volatile"):
            if self._word() == "const":
                const = True
            else:
                volatile = True
        te: TypeExpr = TCv(base, const, volatile) if (const or volatile) else base
        while True:
            if self.accept("*"):
                pc = pv = False
                while self.at("const") or self.at("volatile"):
                    if self._word() == "const":
                        pc = True
                    else:
                        pv = True
                te = TPointer(te, pc, pv)
            elif self.accept("&&"):
                te = TRRef(te)
            elif self.accept("&"):
                te = TLRef(te)
            else:
                break
        if allow_func and self.at("("):
            params = self.parse_params()
            te = TFunc(te, tuple(p for _, p in params))
        return te

    def parse_value(self) -> ValueExpr:
        result = self.parse_type_or_value()
        if not isinstance(result, (VTrait, VNot, VBool)):
            self.error("expected a boolean constant")
        return result

    def parse_base_type(self) -> Union[TypeExpr, VTrait]:
        self.skip_std()
        tok = self.tok
        if tok.text == "auto":
            self.error("'auto' is not allowed here")
        if tok.text == "decltype":
            self.pos += 1
            self.expect("(")
            if self.at("auto"):
                raise UnsupportedPattern(f"{tok.line}:{tok.col}: 'decltype(auto)' is not supported")
            expr = self.parse_expr()
            self.expect(")")
            return TDecltype(expr)
        if tok.kind == "ident" and tok.text in SCALAR_WORDS:
            words = []
            while self.tok.kind == "ident" and self.tok.text in SCALAR_WORDS:
                words.append(self._word())
            return TName(_canonical_scalar(words, tok, self))
        name = self.ident()
        args: tuple = ()
        if self.accept("<"):
            items = []
            if not self.at(">"):
                items.append(self.parse_type_or_value())
                while self.accept(","):
                    items.append(self.parse_type_or_value())
            self.expect(">")
            args = tuple(items)
        if self.accept("::"):
            member = self._word()
            if member == "type":
                return TTrait(name, args)
            if member == "value":
                if any(isinstance(a, (VTrait, VNot, VBool)) for a in args):
                    self.error("predicate arguments must be types")
                return VTrait(name, args)
            self.error("expected 'type' or 'value' after '::'")
        if any(isinstance(a, (VTrait, VNot, VBool)) for a in args):
            self.error("template arguments must be types")
        if name in ALL_TRAITS:
            self.error(f"expected '::type' or '::value' after '{name}<...>'")
        return TName(name, args)

    # expressions

    def parse_expr(self) -> Expr:
        lhs = self.parse_postfix()
        while self.accept("+"):
            lhs = Add(lhs, self.parse_postfix())
        return lhs

    def parse_postfix(self) -> Expr:
        e = self.parse_primary()
        while True:
            if self.accept("."):
                e = Member(e, self.ident(), False)
            elif self.accept("->"):
                e = Member(e, self.ident(), True)
            elif self.accept("++"):
                e = PostInc(e)
            else:
                return e

    def parse_primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self.pos += 1
            return IntLit(int(tok.text))
        if tok.kind == "float":
            self.pos += 1
            return FloatLit(float(tok.text))
        if self.accept("-"):
            inner = self.tok
            if inner.kind == "int":
                self.pos += 1
                return IntLit(-int(inner.text))
            if inner.kind == "float":
                self.pos += 1
                return FloatLit(-float(inner.text))
            self.error("expected a numeric literal after '-'")
        if self.accept("("):
            inner_e = self.parse_expr()
            self.expect(")")
            return Paren(inner_e)
        if self.accept("new"):
            te = self.parse_type()
            self.expect("(")
            self.expect(")")
            return New(te)
        self.skip_std()
        if self.at("declval"):
            self.pos += 1
            self.expect("<")
            te = self.parse_type(allow_func=True)
            self.expect(">")
            self.expect("(")
            self.expect(")")
            return Declval(te)
        name = self.ident()
        if self.accept("("):
            args = []
            if not self.at(")"):
                args.append(self.parse_expr())
                while self.accept(","):
                    args.append(self.parse_expr())
            self.expect(")")
            return Call(name, tuple(args))
        return Id(name)


def _canonical_scalar(words: list[str], tok: Token, parser: Parser) -> str:
    from .typemodel import SCALAR_SPELLINGS

    text = " ".join(words)
    if text not in SCALAR_SPELLINGS:
        raise DslSyntaxError(f"invalid type specifier '{text}'", tok.line, tok.col)
    return SCALAR_SPELLINGS[text].spelling


EXPECT_RE = re.compile(r"^\s*//\s*expect:\s*(pass|fail)\s*$", re.MULTILINE)


def expected_outcome(text: str) -> str:
    """The ``// expect: pass|fail`` header of a corpus file; pass when absent."""
    m = EXPECT_RE.search(text)
    return m.group(1) if m else "pass"


def parse(text: str, path: str | None = None) -> SourceFile:
    return SourceFile(Parser(text).parse_file(), path, expected_outcome(text))


def parse_type_expr(text: str) -> TypeExpr:
    p = Parser(text)
    te = p.parse_type(allow_func=True)
    if p.tok.kind != "eof":
        p.error("trailing input after type")
    return te


def parse_expr(text: str) -> Expr:
    p = Parser(text)
    e = p.parse_expr()
    if p.tok.kind != "eof":
        p.error("trailing input after expression")
    return e


# -- printer ------------------------------------------------------------------


def show_type(te: Union[TypeExpr, ValueExpr, AutoPattern]) -> str:
    if isinstance(te, AutoPattern):
        return str(te)
    if isinstance(te, TConcrete):
        return spell(te.type)
    if isinstance(te, TName):
        if te.args:
            return f"{te.name}<{', '.join(show_type(a) for a in te.args)}>"
        return te.name
    if isinstance(te, TCv):
        quals = ("const " if te.const else "") + ("volatile " if te.volatile else "")
        if isinstance(te.inner, (TPointer, TLRef, TRRef, TFunc)):
            return f"{show_type(te.inner)} {quals.strip()}"
        return quals + show_type(te.inner)
    if isinstance(te, TPointer):
        quals = (" const" if te.const else "") + (" volatile" if te.volatile else "")
        return f"{show_type(te.inner)}*{quals}"
    if isinstance(te, TLRef):
        return f"{show_type(te.inner)}&"
    if isinstance(te, TRRef):
        return f"{show_type(te.inner)}&&"
    if isinstance(te, TDecltype):
        return f"decltype({show_expr(te.expr)})"
    if isinstance(te, TTrait):
        return f"{te.name}<{', '.join(show_type(a) for a in te.args)}>::type"
    if isinstance(te, TFunc):
        return f"{show_type(te.ret)}({', '.join(show_type(p) for p in te.params)})"
    if isinstance(te, VTrait):
        return f"{te.name}<{', '.join(show_type(a) for a in te.args)}>::value"
    if isinstance(te, VNot):
        return f"!{show_type(te.inner)}"
    if isinstance(te, VBool):
        return "true" if te.value else "false"
    raise TypeError(f"cannot print {te!r}")


def show_expr(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, FloatLit):
        return repr(e.value)
    if isinstance(e, Id):
        return e.name
    if isinstance(e, Member):
        return f"{show_expr(e.base)}{'->' if e.arrow else '.'}{e.field}"
    if isinstance(e, Call):
        return f"{e.callee}({', '.join(show_expr(a) for a in e.args)})"
    if isinstance(e, Paren):
        return f"({show_expr(e.inner)})"
    if isinstance(e, PostInc):
        return f"{show_expr(e.inner)}++"
    if isinstance(e, Add):
        return f"{show_expr(e.lhs)} + {show_expr(e.rhs)}"
    if isinstance(e, Declval):
        return f"declval<{show_type(e.arg)}>()"
    if isinstance(e, New):
        return f"new {show_type(e.type)}()"
    raise TypeError(f"cannot print {e!r}")


def _show_params(params: tuple[tuple[Optional[str], TypeExpr], ...]) -> str:
    return ", ".join(show_type(te) + (f" {n}" if n else "") for n, te in params)


def _show_form(name: str, form: FnDeclForm, has_body: bool) -> str:
    end = " {}" if has_body else ";"
    if form.style == "trailing":
        return f"auto {name}({_show_params(form.params)}) -> {show_type(form.return_type)}{end}"
    return f"{show_type(form.return_type)} {name}({_show_params(form.params)}){end}"


def show_decl(d: Decl) -> str:
    if isinstance(d, VarDecl):
        text = f"{show_type(d.type)} {d.name}"
        if d.init is not None:
            text += f" = {show_expr(d.init)}"
        elif d.ctor_args is not None:
            text += f"({', '.join(show_expr(a) for a in d.ctor_args)})"
        return text + ";"
    if isinstance(d, StructDecl):
        head = _template_header(d.template_params)
        attrs = "".join(f" [[{a}]]" for a in d.attrs)
        if not d.complete:
            return f"{head}struct {d.name}{attrs};"
        body = [f"{show_type(te)} {n};" for n, te in d.fields]
        body += [f"static {show_type(te)} {n};" for n, te in d.static_fields]
        for form in d.call_operators:
            body.append(_show_form("operator()", form, False))
        inner = "".join(f"\n    {line}" for line in body)
        return f"{head}struct {d.name}{attrs} {{{inner}\n}};"
    if isinstance(d, FuncDecl):
        return _template_header(d.template_params) + _show_form(d.name, d.form, d.has_body)
    if isinstance(d, StaticAssertType):
        return f"static_assert_type({d.name}, {show_type(d.type)});"
    if isinstance(d, AssertValue):
        return f"assert_value({show_expr(d.expr)}, {d.value});"
    raise TypeError(f"cannot print {d!r}")


def _template_header(params: tuple[str, ...]) -> str:
    if not params:
        return ""
    return "template <" + ", ".join(f"typename {p}" for p in params) + ">\n"


def show_source(sf: SourceFile) -> str:
    head = f"// expect: {sf.expect}\n" if sf.expect != "pass" else ""
    return head + "\n".join(show_decl(d) for d in sf.decls) + "\n"
