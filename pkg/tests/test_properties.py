"""Invariants of the type algebra and the deduction rules, checked with hypothesis."""

import copy

from hypothesis import assume, given, settings, strategies as st

from deducto.ast import Member, Paren, TDecltype, classify, evaluate
from deducto.check import Checker
from deducto.deduce import AutoPattern, decltype_of, deduce_auto, resolve_type_expr
from deducto.gen import GenConfig, generate_programs
from deducto.dsl import SourceFile, VarDecl, parse, parse_type_expr
from deducto.typemodel import (
    ClassDef,
    Env,
    LValueRef,
    RValueRef,
    RefKind,
    Scalar,
    ScalarKind,
    collapse_refs,
    common_arithmetic_type,
    cv_of,
    decay,
    remove_ref,
    spell,
    strip_cv,
    strip_ref_and_top_cv,
)

from strategies import INT_VARS, arithmetic_kinds, int_exprs, lvalue_exprs, object_types, registries, types


@given(types())
def test_remove_ref_idempotent(t):
    assert remove_ref(remove_ref(t)) == remove_ref(t)


@given(types())
def test_strip_ref_and_top_cv_idempotent(t):
    once = strip_ref_and_top_cv(t)
    assert strip_ref_and_top_cv(once) == once
    assert cv_of(once) == (False, False)


@given(object_types(), st.sampled_from(list(RefKind)), st.sampled_from(list(RefKind)))
def test_collapse_lvalue_dominates(t, outer, inner):
    assume(not (isinstance(t, Scalar) and t.kind is ScalarKind.VOID))
    got = collapse_refs(outer, collapse_refs(inner, t))
    if RefKind.LVALUE in (outer, inner):
        assert got == LValueRef(t)
    else:
        assert got == RValueRef(t)


@given(arithmetic_kinds, arithmetic_kinds, st.booleans(), st.booleans())
def test_common_type_commutes_and_ignores_cv(a, b, ca, cb):
    x, y = Scalar(a, ca), Scalar(b, cb)
    r = common_arithmetic_type(x, y)
    assert r == common_arithmetic_type(y, x)
    assert r == common_arithmetic_type(strip_cv(x), strip_cv(y))
    assert common_arithmetic_type(r, r) == r


@given(arithmetic_kinds, arithmetic_kinds, arithmetic_kinds)
def test_common_type_associative(a, b, c):
    A, B, C = Scalar(a), Scalar(b), Scalar(c)
    assert common_arithmetic_type(common_arithmetic_type(A, B), C) == common_arithmetic_type(
        A, common_arithmetic_type(B, C)
    )


def _env_with_classes():
    env = Env()
    for name in ("A", "B"):
        env.declare_class(ClassDef(name))
    return env


@given(types())
def test_spelling_round_trips_through_the_parser(t):
    env = _env_with_classes()
    assert resolve_type_expr(parse_type_expr(spell(t)), env) == t


def _int_checker(values):
    text = "".join(f"int {n} = {v};\n" for n, v in zip(INT_VARS, values))
    checker = Checker(parse(text))
    checker.run()
    return checker


@settings(max_examples=1000, deadline=None)
@given(int_exprs(), st.lists(st.integers(-50, 50), min_size=4, max_size=4))
def test_decltype_never_mutates_the_store(e, values):
    checker = _int_checker(values)
    before = copy.deepcopy(checker.store)
    entry = checker.process(VarDecl(TDecltype(e), "probe"))
    assert not entry.has_error, entry.diagnostics
    assert checker.store == before
    decltype_of(e, checker.env)
    classify(e, checker.env)
    assert checker.store == before


@settings(max_examples=200, deadline=None)
@given(int_exprs(), st.lists(st.integers(-50, 50), min_size=4, max_size=4))
def test_evaluate_is_functional(e, values):
    checker = _int_checker(values)
    before = dict(checker.store)
    first = evaluate(e, checker.env, checker.store)
    assert checker.store == before
    assert evaluate(e, checker.env, checker.store) == first


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_paren_lvalue_gives_lvalue_reference(data):
    reg = data.draw(registries())
    e = data.draw(lvalue_exprs(reg))
    t = decltype_of(Paren(e), reg.env)
    assert isinstance(t, LValueRef)
    assert t.referee == classify(e, reg.env).type


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_member_of_const_object_is_const(data):
    reg = data.draw(registries())
    e = data.draw(lvalue_exprs(reg))
    assume(isinstance(e, Member))
    base = classify(e.base, reg.env).type
    obj = base.pointee if e.arrow else base
    declared = decltype_of(e, reg.env)
    got = classify(e, reg.env).type
    if isinstance(declared, (LValueRef, RValueRef)):
        assert got == declared.referee
    else:
        assert cv_of(got)[0] == (cv_of(obj)[0] or cv_of(declared)[0])


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_auto_is_decayed_unqualified_decltype(data):
    reg = data.draw(registries())
    e = data.draw(lvalue_exprs(reg))
    t = remove_ref(decltype_of(Paren(e), reg.env))
    assert deduce_auto(AutoPattern(), e, reg.env) == strip_cv(decay(t))
    assert deduce_auto(AutoPattern(lvalue_ref=True), e, reg.env) == decltype_of(Paren(e), reg.env)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_classify_leaves_the_environment_alone(data):
    reg = data.draw(registries())
    e = data.draw(lvalue_exprs(reg))
    names = dict(reg.env.names)
    classify(e, reg.env)
    decltype_of(Paren(e), reg.env)
    assert reg.env.names == names


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1000))
def test_reports_are_byte_identical(seed):
    (sf,) = generate_programs(GenConfig(seed=seed, count=15, batch=15))
    again = SourceFile(sf.decls, sf.path)
    assert Checker(sf).run().render_text() == Checker(again).run().render_text()
