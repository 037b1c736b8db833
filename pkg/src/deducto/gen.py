"""Seeded random programs for the differential oracle.

Every program shares a fixed prelude and adds probe declarations whose
types exercise auto, decltype, declval, traits, result_of and SFINAE
selection.  Candidates the engine rejects are dropped, so every probe that
survives carries an engine answer the compiler can confirm or refute.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

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
    VNot,
    VTrait,
    classify,
)
from .check import Checker
from .deduce import AutoPattern
from .dsl import SourceFile, VarDecl, parse, show_decl
from .errors import DeductoError
from .typemodel import Class, Env, Function, Scalar, ScalarKind, remove_ref

PRELUDE = """\
struct P0 { int i; double d; long l; unsigned char uc; };
struct P1 { const int ci; short s; };
struct [[abstract]] P2 { float f; long long ll; };
template <typename T> struct box { T v; };
template <typename A, typename B>
auto operator+(box<A> a, box<B> b) -> box<decltype(a.v + b.v)>;
template <typename T>
typename std::enable_if<std::is_trivially_copy_assignable<T>::value, int>::type gcopy(T* p);
template <typename T>
typename std::enable_if<!std::is_trivially_copy_assignable<T>::value, long>::type gcopy(T* p);
struct F0 { double operator()(int); };
struct F1 { auto operator()(long a, char b) -> const long&; };
int fi(int);
const int fci();
int& flr();
int&& frr(double);
P0 fp0();
const P0& fcp0();
P0&& fxp0();
int v_int = 1;
long v_long = 2;
const int c_int = 3;
unsigned v_uns = 4;
char v_char = 5;
short v_short = 6;
unsigned long v_ulong = 7;
float v_float;
double v_double;
int& r_int = v_int;
const double& cr_double = v_double;
int&& rr_int = 8;
P0 p0;
const P0 cp0;
P0* pp0 = new P0();
const P1* cpp1;
box<int> bi;
box<double> bd;
box<char> bc;
F0 f0;
F1 f1;
"""

LVALUE_IDS = (
    "v_int", "v_long", "c_int", "v_uns", "v_char", "v_short", "v_ulong",
    "v_float", "v_double", "r_int", "cr_double", "rr_int",
)  # fmt: skip
CLASS_IDS = ("p0", "cp0", "bi", "bd", "bc")
POINTER_IDS = ("pp0", "cpp1")
FIELDS = {"P0": ("i", "d", "l", "uc"), "P1": ("ci", "s"), "P2": ("f", "ll"), "box": ("v",)}
CALLS = (
    ("fi", 1), ("fci", 0), ("flr", 0), ("frr", 1), ("fp0", 0), ("fcp0", 0), ("fxp0", 0), ("f0", 1),
)  # fmt: skip
SCALARS = (
    ScalarKind.BOOL, ScalarKind.CHAR, ScalarKind.UCHAR, ScalarKind.SHORT, ScalarKind.INT,
    ScalarKind.UINT, ScalarKind.LONG, ScalarKind.ULONG, ScalarKind.LLONG, ScalarKind.ULLONG,
    ScalarKind.FLOAT, ScalarKind.DOUBLE, ScalarKind.LDOUBLE,
)  # fmt: skip
TRANSFORMS = (
    "remove_const", "remove_cv", "remove_reference", "add_const", "add_lvalue_reference", "add_rvalue_reference",
)  # fmt: skip
PREDICATES = (
    "is_abstract", "is_trivially_copy_assignable", "is_const", "is_reference", "is_lvalue_reference",
    "is_rvalue_reference", "is_pointer", "is_integral", "is_floating_point", "is_class",
)  # fmt: skip

# The arithmetic ladder differs from LP64 C++ for this pair only.
LADDER_GAP = frozenset({ScalarKind.ULONG, ScalarKind.LLONG})


@dataclass
class GenConfig:
    seed: int = 0
    count: int = 300
    batch: int = 50
    max_depth: int = 3
    max_attempts: int = 50


class ProbeGenerator:
    """Builds probe declarations one at a time against the prelude scope."""

    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.checker = Checker(parse(PRELUDE, "<prelude>"))
        report = self.checker.run()
        if not report.ok:
            raise RuntimeError("generator prelude rejected:\n" + report.render_text())
        self.base: Env = self.checker.env
        self.serial = 0

    # types

    def scalar(self) -> TypeExpr:
        return TConcrete(Scalar(self.rng.choice(SCALARS)))

    def object_type(self) -> TypeExpr:
        r = self.rng.random()
        if r < 0.55:
            return self.scalar()
        if r < 0.8:
            return TName(self.rng.choice(("P0", "P1", "P2")))
        if r < 0.9:
            return TName("box", (self.rng.choice((TConcrete(Scalar(ScalarKind.INT)), TConcrete(Scalar(ScalarKind.DOUBLE)), TConcrete(Scalar(ScalarKind.CHAR)))),))
        return TPointer(self.rng.choice((self.scalar(), TName("P0"))))

    def any_type(self) -> TypeExpr:
        t = self.object_type()
        if self.rng.random() < 0.3:
            t = TCv(t, const=True, volatile=self.rng.random() < 0.15)
        r = self.rng.random()
        if r < 0.25:
            t = TLRef(t)
        elif r < 0.45:
            t = TRRef(t)
        return t

    # expressions

    def expr(self, depth: int, evaluated: bool) -> Expr:
        rng = self.rng
        if depth <= 0:
            return self.atom(evaluated)
        choice = rng.choices(
            ("atom", "member", "call", "add", "paren", "postinc", "boxadd"), (3, 3, 2, 3, 2, 1, 1)
        )[0]
        if choice == "member":
            return self.member(depth, evaluated)
        if choice == "call":
            name, arity = rng.choice(CALLS)
            return Call(name, tuple(self.expr(depth - 1, evaluated) for _ in range(arity)))
        if choice == "add":
            return Add(self.expr(depth - 1, evaluated), self.expr(depth - 1, evaluated))
        if choice == "paren":
            return Paren(self.expr(depth - 1, evaluated))
        if choice == "postinc":
            return PostInc(Id(rng.choice(("v_int", "v_long", "v_uns", "v_char", "v_short", "r_int"))))
        if choice == "boxadd":
            return Add(self.box_expr(evaluated), self.box_expr(evaluated))
        return self.atom(evaluated)

    def box_expr(self, evaluated: bool) -> Expr:
        if evaluated or self.rng.random() < 0.5:
            return Id(self.rng.choice(("bi", "bd", "bc")))
        inner = self.rng.choice((ScalarKind.INT, ScalarKind.DOUBLE, ScalarKind.CHAR, ScalarKind.LONG, ScalarKind.FLOAT))
        return Declval(TName("box", (TConcrete(Scalar(inner)),)))

    def atom(self, evaluated: bool) -> Expr:
        rng = self.rng
        r = rng.random()
        if r < 0.15:
            return IntLit(rng.randrange(0, 100))
        if r < 0.22:
            return FloatLit(rng.choice((0.5, 1.5, 2.25)))
        if r < 0.6 or evaluated:
            return Id(rng.choice(LVALUE_IDS + CLASS_IDS + POINTER_IDS))
        if r < 0.9:
            return Declval(self.any_type())
        return New(TName("P0"))

    def member(self, depth: int, evaluated: bool) -> Expr:
        rng = self.rng
        r = rng.random()
        if r < 0.3:
            base: Expr = Id(rng.choice(CLASS_IDS))
        elif r < 0.45:
            name, _ = rng.choice((("fp0", 0), ("fcp0", 0), ("fxp0", 0)))
            base = Call(name)
        elif r < 0.6 or evaluated:
            ptr = rng.choice(POINTER_IDS)
            cls = "P0" if ptr == "pp0" else "P1"
            return Member(Id(ptr), rng.choice(FIELDS[cls]), arrow=True)
        else:
            t = self.any_type()
            base = Declval(t)
        try:
            obj = classify(base, self.base).type
        except DeductoError:
            return base
        if not isinstance(obj, Class):
            return base
        return Member(base, rng.choice(FIELDS[obj.name]))

    # probes

    def fresh(self, prefix: str) -> str:
        self.serial += 1
        return f"{prefix}{self.serial}"

    def decltype_probe(self) -> VarDecl:
        return VarDecl(TDecltype(self.expr(self.rng.randint(0, self.cfg.max_depth), False)), self.fresh("x"))

    def auto_probe(self) -> VarDecl:
        init = self.expr(self.rng.randint(0, self.cfg.max_depth), True)
        pattern = self.rng.choice((AutoPattern(), AutoPattern(add_const=True), AutoPattern(False, True), AutoPattern(True, True)))
        return VarDecl(pattern, self.fresh("a"), init)

    def transform_probe(self) -> VarDecl:
        return VarDecl(TTrait(self.rng.choice(TRANSFORMS), (self.any_type(),)), self.fresh("t"))

    def predicate_probe(self) -> list[VarDecl]:
        value = VTrait(self.rng.choice(PREDICATES), (self.any_type(),))
        payload = TConcrete(Scalar(ScalarKind.INT))
        name = self.fresh("q")
        # exactly one polarity is well formed; keep whichever the engine accepts
        return [
            VarDecl(TTrait("enable_if", (value, payload)), name),
            VarDecl(TTrait("enable_if", (VNot(value), payload)), name),
        ]

    def same_probe(self) -> list[VarDecl]:
        a, b = self.any_type(), (self.any_type() if self.rng.random() < 0.5 else None)
        value = VTrait("is_same", (a, b if b is not None else a))
        name = self.fresh("s")
        payload = TConcrete(Scalar(ScalarKind.LONG))
        return [
            VarDecl(TTrait("enable_if", (value, payload)), name),
            VarDecl(TTrait("enable_if", (VNot(value), payload)), name),
        ]

    def result_of_probe(self) -> VarDecl:
        rng = self.rng
        r = rng.random()
        if r < 0.4:
            sig = TFunc(TName("F0"), (self.scalar(),))
        elif r < 0.7:
            sig = TFunc(TName("F1"), (TConcrete(Scalar(ScalarKind.LONG)), TConcrete(Scalar(ScalarKind.CHAR))))
        else:
            sig = TFunc(TName("fi"), (rng.choice((TConcrete(Scalar(ScalarKind.INT)), TLRef(TConcrete(Scalar(ScalarKind.INT))))),))
        return VarDecl(TTrait("result_of", (sig,)), self.fresh("r"))

    def gcopy_probe(self) -> VarDecl:
        t = self.object_type()
        if isinstance(t, TPointer):
            t = t.inner
        if self.rng.random() < 0.3:
            t = TCv(t)
        arg = Declval(TPointer(t))
        return VarDecl(TDecltype(Call("gcopy", (arg,))), self.fresh("g"))

    def candidates(self) -> list[VarDecl]:
        kind = self.rng.choices(
            ("decltype", "auto", "transform", "predicate", "same", "result_of", "gcopy"), (6, 4, 2, 2, 1, 1, 1)
        )[0]
        if kind == "decltype":
            return [self.decltype_probe()]
        if kind == "auto":
            return [self.auto_probe()]
        if kind == "transform":
            return [self.transform_probe()]
        if kind == "predicate":
            return self.predicate_probe()
        if kind == "same":
            return self.same_probe()
        if kind == "result_of":
            return [self.result_of_probe()]
        return [self.gcopy_probe()]

    def accepts(self, d: VarDecl) -> bool:
        if _touches_ladder_gap(d, self.base):
            return False
        self.checker.env = self.base.child()
        try:
            entry = self.checker.process(d)
        finally:
            self.checker.env = self.base
        if entry.has_error or entry.resolved is None:
            return False
        t = remove_ref(entry.resolved)
        return not isinstance(t, Function) and not (isinstance(t, Scalar) and t.kind is ScalarKind.VOID)

    def next_probe(self) -> VarDecl:
        for _ in range(self.cfg.max_attempts * 10):
            for d in self.candidates():
                if self.accepts(d):
                    return d
        raise RuntimeError("generator could not produce an accepted probe")


def _touches_ladder_gap(d: VarDecl, env: Env) -> bool:
    """True when some arithmetic '+' inside ``d`` mixes the known gap pair."""
    found = False

    def visit(node: object) -> None:
        nonlocal found
        if found:
            return
        if isinstance(node, Add):
            try:
                kinds = {_kind(classify(node.lhs, env).type), _kind(classify(node.rhs, env).type)}
            except DeductoError:
                kinds = set()
            if kinds == LADDER_GAP:
                found = True
                return
        if isinstance(node, tuple):
            for item in node:
                visit(item)
        elif hasattr(node, "__dataclass_fields__"):
            for name in node.__dataclass_fields__:
                visit(getattr(node, name))

    visit(d)
    return found


def _kind(t: object) -> Optional[ScalarKind]:
    return t.kind if isinstance(t, Scalar) else None


def generate_probes(cfg: GenConfig) -> list[VarDecl]:
    gen = ProbeGenerator(cfg)
    return [gen.next_probe() for _ in range(cfg.count)]


def generate_programs(cfg: GenConfig) -> list[SourceFile]:
    """``cfg.count`` probes split into programs of at most ``cfg.batch``."""
    probes = generate_probes(cfg)
    programs = []
    for start in range(0, len(probes), cfg.batch):
        chunk = probes[start : start + cfg.batch]
        text = PRELUDE + "\n".join(show_decl(d) for d in chunk) + "\n"
        programs.append(parse(text, f"<generated seed={cfg.seed} #{start // cfg.batch}>"))
    return programs

