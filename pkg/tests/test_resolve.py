import pytest

from deducto.ast import TName, TPointer, TCv, TRRef, TLRef, TConcrete
from deducto.dsl import parse_type_expr
from deducto.errors import AmbiguousOverload, DeductionFailure, NonDeducibleTemplate, NoViableOverload
from deducto.resolve import (
    CONVERSION,
    EXACT,
    TemplateFunction,
    build_candidate,
    deduce_template_args,
    match_arg,
    resolve_overload,
    select_signature,
    substitute,
    substitute_candidate,
)
from deducto.traits import Ok, SubstFailure
from deducto.typemodel import (
    DOUBLE,
    INT,
    SIZE_T,
    VOID,
    Class,
    Env,
    Function,
    LValueRef,
    Pointer,
    RValueRef,
    Scalar,
    ScalarKind,
    spell,
)

from support import env_of

CINT = Scalar(ScalarKind.INT, const=True)
T = TName("T")

MYCOPY = """
template<typename T>
typename std::enable_if<std::is_trivially_copy_assignable<T>::value>::type
mycopy(const T* source, T* dest, std::size_t count);
template<typename T>
typename std::enable_if<!std::is_trivially_copy_assignable<T>::value>::type
mycopy(const T* source, T* dest, std::size_t count);
struct Pod { int a; };
struct [[nontrivial_copy]] Text { char* data; };
"""


def test_deduce_by_value_drops_reference_and_cv():
    assert deduce_template_args([T], [LValueRef(CINT)], ("T",)) == {"T": INT}


def test_deduce_through_pointer_and_const():
    pattern = TPointer(TCv(T))
    assert deduce_template_args([pattern], [LValueRef(Pointer(CINT))], ("T",)) == {"T": INT}
    assert deduce_template_args([TPointer(T)], [Pointer(CINT)], ("T",)) == {"T": CINT}


def test_forwarding_reference():
    assert deduce_template_args([TRRef(T)], [LValueRef(INT)], ("T",)) == {"T": LValueRef(INT)}
    assert deduce_template_args([TRRef(T)], [INT], ("T",)) == {"T": INT}
    assert deduce_template_args([TRRef(T)], [RValueRef(CINT)], ("T",)) == {"T": CINT}


def test_deduce_class_template_arguments():
    pattern = TName("vec", (T,))
    assert deduce_template_args([pattern], [Class("vec", (DOUBLE,))], ("T",)) == {"T": DOUBLE}
    with pytest.raises(DeductionFailure):
        deduce_template_args([pattern], [INT], ("T",))


def test_conflicting_deductions():
    with pytest.raises(DeductionFailure):
        deduce_template_args([T, T], [INT, DOUBLE], ("T",))


def test_non_deducible_template_is_rejected_at_declaration():
    with pytest.raises(NonDeducibleTemplate):
        TemplateFunction("f", ("T", "U"), (("x", T),), TConcrete(INT))
    with pytest.raises(NonDeducibleTemplate):
        TemplateFunction("f", ("T",), (("x", parse_type_expr("remove_reference<T>::type")),), TConcrete(INT))


def test_substitute_turns_errors_into_values():
    env = Env()
    assert substitute(parse_type_expr("enable_if<is_integral<T>::value, T>::type"), {"T": INT}, env) == Ok(INT)
    out = substitute(parse_type_expr("enable_if<is_integral<T>::value, T>::type"), {"T": DOUBLE}, env)
    assert isinstance(out, SubstFailure)
    assert isinstance(substitute(parse_type_expr("T*"), {"T": LValueRef(INT)}, env), SubstFailure)


@pytest.mark.parametrize(
    "arg, param, rank",
    [
        (INT, INT, EXACT),
        (LValueRef(CINT), INT, EXACT),
        (INT, DOUBLE, CONVERSION),
        (LValueRef(INT), LValueRef(INT), EXACT),
        (INT, LValueRef(INT), None),  # prvalue to non-const lvalue reference
        (INT, LValueRef(CINT), EXACT),
        (LValueRef(CINT), LValueRef(INT), None),  # would drop const
        (DOUBLE, LValueRef(CINT), CONVERSION),
        (INT, RValueRef(INT), EXACT),
        (LValueRef(INT), RValueRef(INT), None),
        (Pointer(INT), Pointer(CINT), EXACT),  # qualification conversion
        (Pointer(CINT), Pointer(INT), None),
        (Pointer(INT), Pointer(VOID), CONVERSION),
        (Pointer(CINT), Pointer(VOID), None),
        (Class("A"), Class("B"), None),
        (Pointer(INT), INT, None),
    ],
)
def test_match_arg(arg, param, rank):
    assert match_arg(arg, param) == rank


def test_select_signature_prefers_exact_and_reports_ambiguity():
    by_int = Function((INT,), INT)
    by_double = Function((DOUBLE,), DOUBLE)
    assert select_signature([by_int, by_double], [DOUBLE]) is by_double
    assert select_signature([by_int, by_double], [INT]) is by_int
    long_arg = Scalar(ScalarKind.LONG)
    assert "ambiguous" in select_signature([by_int, by_double], [long_arg])
    assert "no matching call" in select_signature([by_int], [Pointer(INT)])


def test_mycopy_selects_by_trait():
    env = env_of(MYCOPY)
    for cls, expect_first in (("Pod", True), ("Text", False)):
        args = [LValueRef(Pointer(Class(cls, const=True))), LValueRef(Pointer(Class(cls))), SIZE_T]
        cand = resolve_overload("mycopy", args, env)
        members = env.lookup("mycopy").members
        assert (cand.decl is members[0]) is expect_first
        assert cand.binding == {"T": Class(cls)}
        assert spell(cand.resolved_signature) == f"void(const {cls}*, {cls}*, unsigned long)"


def test_mycopy_candidates_are_exclusive():
    env = env_of(MYCOPY)
    members = env.lookup("mycopy").members
    args = [Pointer(CINT), Pointer(INT), INT]
    outcomes = [build_candidate(m, args, env) for m in members]
    assert sum(not isinstance(o, str) for o in outcomes) == 1
    assert "substitution failed" in [o for o in outcomes if isinstance(o, str)][0]


def test_no_viable_overload_lists_every_candidate():
    env = env_of(MYCOPY)
    with pytest.raises(NoViableOverload) as info:
        resolve_overload("mycopy", [INT, INT, INT], env)
    assert len(info.value.reasons) == 2
    assert all("deduction failed" in r for r in info.value.reasons)


def test_non_template_wins_a_tie():
    env = env_of("template <typename T> int g(T x);\nlong g(int x);")
    cand = resolve_overload("g", [INT], env)
    assert spell(cand.resolved_signature.ret) == "long"
    assert spell(resolve_overload("g", [DOUBLE], env).resolved_signature.ret) == "int"


def test_ambiguous_overload():
    env = env_of("int h(long x);\nint h(double x);")
    with pytest.raises(AmbiguousOverload) as info:
        resolve_overload("h", [INT], env)
    assert info.value.count == 2


def test_trailing_template_sees_its_parameters():
    env = env_of(
        "template <typename T> struct vec { T x; };\n"
        "template <typename A, typename B> auto operator+(vec<A> a, vec<B> b) -> vec<decltype(a.x + b.x)>;"
    )
    cand = resolve_overload("operator+", [Class("vec", (INT,)), LValueRef(Class("vec", (DOUBLE,)))], env)
    assert spell(cand.resolved_signature) == "vec<double>(vec<int>, vec<double>)"


def test_build_candidate_reports_deduction_failure():
    tf = TemplateFunction("k", ("T",), (("p", TPointer(T)),), TLRef(T))
    assert build_candidate(tf, [INT], Env()).startswith("deduction failed")
    cand = build_candidate(tf, [Pointer(DOUBLE)], Env())
    assert cand.resolved_signature == Function((Pointer(DOUBLE),), LValueRef(DOUBLE))


def test_const_element_type_only_reachable_by_explicit_binding():
    env = env_of(MYCOPY)
    first, second = env.lookup("mycopy").members
    with pytest.raises(NoViableOverload) as info:
        resolve_overload("mycopy", [Pointer(CINT), Pointer(CINT), INT], env)
    assert all("conflicting deductions" in r for r in info.value.reasons)
    assert isinstance(substitute_candidate(first, {"T": CINT}, env), str)
    cand = substitute_candidate(second, {"T": CINT}, env)
    assert spell(cand.resolved_signature) == "void(const int*, const int*, unsigned long)"
    assert substitute_candidate(second, {}, env) == "no binding for T"
