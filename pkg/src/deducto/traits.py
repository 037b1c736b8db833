"""The closed set of type traits: predicates, transforms, enable_if, result_of."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import NotCallable, SubstitutionFailure, UnknownTrait
from .typemodel import (
    Class,
    Env,
    Function,
    LValueRef,
    Pointer,
    RValueRef,
    RefKind,
    Scalar,
    ScalarKind,
    Type,
    VOID,
    add_cv,
    collapse_refs,
    cv_of,
    remove_ref,
    with_cv,
)


@dataclass(frozen=True)
class Ok:
    type: Type


@dataclass(frozen=True)
class SubstFailure:
    reason: str


SubstOutcome = Union[Ok, SubstFailure]


def unwrap(outcome: SubstOutcome) -> Type:
    if isinstance(outcome, SubstFailure):
        raise SubstitutionFailure(outcome.reason)
    return outcome.type


PREDICATE_ARITY = {
    "is_abstract": 1,
    "is_trivially_copy_assignable": 1,
    "is_const": 1,
    "is_reference": 1,
    "is_lvalue_reference": 1,
    "is_rvalue_reference": 1,
    "is_pointer": 1,
    "is_integral": 1,
    "is_floating_point": 1,
    "is_class": 1,
    "is_same": 2,
}
PREDICATES = frozenset(PREDICATE_ARITY)
TRANSFORMS = frozenset(
    {
        "remove_const",
        "remove_cv",
        "remove_reference",
        "add_const",
        "add_lvalue_reference",
        "add_rvalue_reference",
    }
)
ALL_TRAITS = PREDICATES | TRANSFORMS | {"enable_if", "result_of"}


def eval_predicate(name: str, args: list[Type], env: Env) -> bool:
    if name not in PREDICATE_ARITY:
        raise UnknownTrait(name)
    if len(args) != PREDICATE_ARITY[name]:
        raise UnknownTrait(f"{name}/{len(args)}")
    t = args[0]
    if name == "is_same":
        return args[0] == args[1]
    if name == "is_const":
        return cv_of(t)[0]
    if name == "is_reference":
        return isinstance(t, (LValueRef, RValueRef))
    if name == "is_lvalue_reference":
        return isinstance(t, LValueRef)
    if name == "is_rvalue_reference":
        return isinstance(t, RValueRef)
    if name == "is_pointer":
        return isinstance(t, Pointer)
    if name == "is_integral":
        return isinstance(t, Scalar) and t.kind.is_integral
    if name == "is_floating_point":
        return isinstance(t, Scalar) and t.kind.is_floating
    if name == "is_class":
        return isinstance(t, Class)
    if name == "is_abstract":
        return isinstance(t, Class) and env.instantiate(with_cv(t, False, False)).is_abstract
    return _trivially_copy_assignable(t, env)


def _trivially_copy_assignable(t: Type, env: Env) -> bool:
    # assigning through T& from const T&: a reference argument behaves as its referee
    t = remove_ref(t)
    if isinstance(t, Function):
        return False
    if isinstance(t, Scalar) and t.kind is ScalarKind.VOID:
        return False
    if cv_of(t)[0]:
        return False
    if isinstance(t, Class):
        inst = env.instantiate(with_cv(t, False, False))
        if not inst.is_trivially_copy_assignable:
            return False
        # const and reference members delete the implicit copy assignment
        return all(
            not isinstance(f, (LValueRef, RValueRef)) and _trivially_copy_assignable(f, env)
            for f in inst.fields.values()
        )
    return True


def eval_transform(name: str, t: Type) -> Type:
    if name == "remove_const":
        return with_cv(t, False, cv_of(t)[1])
    if name == "remove_cv":
        return with_cv(t, False, False)
    if name == "remove_reference":
        return remove_ref(t)
    if name == "add_const":
        return add_cv(t, const=True)
    if name == "add_lvalue_reference":
        return _add_ref(RefKind.LVALUE, t)
    if name == "add_rvalue_reference":
        return _add_ref(RefKind.RVALUE, t)
    raise UnknownTrait(name)


def _add_ref(kind: RefKind, t: Type) -> Type:
    return collapse_refs(kind, t)


def eval_enable_if(cond: bool, payload: Type = VOID) -> SubstOutcome:
    if cond:
        return Ok(payload)
    return SubstFailure("enable_if condition false")


def eval_result_of(callee: Type, arg_types: list[Type], env: Env) -> SubstOutcome:
    """Return type of calling a value of type ``callee`` with the given arguments.

    Argument types use the decltype encoding: ``T&`` is an lvalue, ``T&&``
    an xvalue, and a plain ``T`` a prvalue.
    """
    from .resolve import select_signature

    target = remove_ref(callee)
    if isinstance(target, Pointer) and isinstance(target.pointee, Function):
        target = target.pointee
    if isinstance(target, Function):
        sigs = [target]
    elif isinstance(target, Class):
        sigs = list(env.instantiate(with_cv(target, False, False)).call_operators)
        if not sigs:
            return SubstFailure(f"'{target}' has no call operator")
    else:
        raise NotCallable(f"type '{callee}' is not callable")
    chosen = select_signature(sigs, arg_types)
    if isinstance(chosen, str):
        return SubstFailure(chosen)
    return Ok(chosen.ret)
