import pytest

from deducto.errors import NotCallable, SubstitutionFailure, UnknownTrait
from deducto.traits import (
    Ok,
    SubstFailure,
    eval_enable_if,
    eval_predicate,
    eval_result_of,
    eval_transform,
    unwrap,
)
from deducto.typemodel import (
    BOOL,
    DOUBLE,
    INT,
    VOID,
    Class,
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


@pytest.fixture(scope="module")
def env():
    return env_of(
        """
struct Pod { int a; };
struct [[nontrivial_copy]] Text { char* data; };
struct [[abstract]] Shape { double area; };
struct [[abstract]] [[trivial_copy]] Odd { int k; };
struct Fn { int operator()(int); double operator()(double, double); };
struct Empty { };
struct Frozen { const int k; };
struct Holder { Frozen f; };
struct Alias { int& r; };
struct Wrap { Pod p; const int* q; };
template <typename T> struct cell { T v; };
"""
    )


@pytest.mark.parametrize(
    "name, t, expected",
    [
        ("is_trivially_copy_assignable", INT, True),
        ("is_trivially_copy_assignable", CINT, False),
        ("is_trivially_copy_assignable", LValueRef(INT), True),
        ("is_trivially_copy_assignable", LValueRef(CINT), False),
        ("is_trivially_copy_assignable", Pointer(CINT), True),
        ("is_trivially_copy_assignable", VOID, False),
        ("is_trivially_copy_assignable", Function((), INT), False),
        ("is_trivially_copy_assignable", Class("Pod"), True),
        ("is_trivially_copy_assignable", Class("Text"), False),
        ("is_trivially_copy_assignable", Class("Shape"), False),
        ("is_trivially_copy_assignable", Class("Odd"), True),
        ("is_trivially_copy_assignable", Class("Pod", const=True), False),
        ("is_trivially_copy_assignable", Class("Frozen"), False),
        ("is_trivially_copy_assignable", Class("Holder"), False),
        ("is_trivially_copy_assignable", Class("Alias"), False),
        ("is_trivially_copy_assignable", Class("Wrap"), True),
        ("is_trivially_copy_assignable", Class("cell", (CINT,)), False),
        ("is_trivially_copy_assignable", Class("cell", (Class("Text"),)), False),
        ("is_trivially_copy_assignable", Class("cell", (Pointer(CINT),)), True),
        ("is_abstract", Class("Shape"), True),
        ("is_abstract", Class("Shape", const=True), True),
        ("is_abstract", Class("Pod"), False),
        ("is_abstract", INT, False),
        ("is_const", CINT, True),
        ("is_const", LValueRef(CINT), False),  # the reference itself is not const
        ("is_const", Pointer(CINT), False),
        ("is_const", Pointer(INT, const=True), True),
        ("is_reference", RValueRef(INT), True),
        ("is_lvalue_reference", RValueRef(INT), False),
        ("is_rvalue_reference", RValueRef(INT), True),
        ("is_pointer", Pointer(INT), True),
        ("is_pointer", LValueRef(Pointer(INT)), False),
        ("is_integral", BOOL, True),
        ("is_integral", CINT, True),
        ("is_integral", DOUBLE, False),
        ("is_floating_point", Scalar(ScalarKind.LDOUBLE), True),
        ("is_class", Class("Pod"), True),
        ("is_class", Pointer(Class("Pod")), False),
    ],
)
def test_predicates(env, name, t, expected):
    assert eval_predicate(name, [t], env) is expected


def test_is_same_is_exact(env):
    assert eval_predicate("is_same", [INT, INT], env)
    assert not eval_predicate("is_same", [INT, CINT], env)
    assert not eval_predicate("is_same", [INT, LValueRef(INT)], env)


def test_unknown_predicate_or_arity(env):
    with pytest.raises(UnknownTrait):
        eval_predicate("is_empty", [INT], env)
    with pytest.raises(UnknownTrait):
        eval_predicate("is_same", [INT], env)


@pytest.mark.parametrize(
    "name, t, expected",
    [
        ("remove_const", CINT, "int"),
        ("remove_const", Scalar(ScalarKind.INT, True, True), "volatile int"),
        ("remove_const", LValueRef(CINT), "const int&"),  # no top-level const under a reference
        ("remove_const", Pointer(CINT), "const int*"),
        ("remove_cv", Scalar(ScalarKind.INT, True, True), "int"),
        ("remove_reference", LValueRef(CINT), "const int"),
        ("remove_reference", RValueRef(INT), "int"),
        ("remove_reference", INT, "int"),
        ("add_const", INT, "const int"),
        ("add_const", LValueRef(INT), "int&"),
        ("add_const", Function((), INT), "int()"),
        ("add_lvalue_reference", RValueRef(INT), "int&"),
        ("add_rvalue_reference", LValueRef(INT), "int&"),
        ("add_rvalue_reference", INT, "int&&"),
        ("add_lvalue_reference", VOID, "void"),
    ],
)
def test_transforms(name, t, expected):
    assert spell(eval_transform(name, t)) == expected


def test_enable_if():
    assert eval_enable_if(True) == Ok(VOID)
    assert eval_enable_if(True, INT) == Ok(INT)
    assert isinstance(eval_enable_if(False, INT), SubstFailure)
    with pytest.raises(SubstitutionFailure):
        unwrap(eval_enable_if(False))


def test_result_of_functions_and_pointers(env):
    fun = Function((INT,), INT)
    assert eval_result_of(fun, [INT], env) == Ok(INT)
    assert eval_result_of(LValueRef(fun), [LValueRef(INT)], env) == Ok(INT)
    assert eval_result_of(Pointer(fun), [DOUBLE], env) == Ok(INT)
    assert isinstance(eval_result_of(fun, [Pointer(INT)], env), SubstFailure)
    assert isinstance(eval_result_of(fun, [], env), SubstFailure)


def test_result_of_functor_picks_an_operator(env):
    assert eval_result_of(Class("Fn"), [INT], env) == Ok(INT)
    assert eval_result_of(Class("Fn"), [DOUBLE, INT], env) == Ok(DOUBLE)
    assert isinstance(eval_result_of(Class("Empty"), [INT], env), SubstFailure)


def test_result_of_rejects_non_callables(env):
    with pytest.raises(NotCallable):
        eval_result_of(INT, [], env)
