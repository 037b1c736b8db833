"""``auto`` deduction, ``decltype``, ``declval`` and function declaration forms.

Two answers exist for a member access: the member's declared type (what
``decltype(a->x)`` reports) and the classified expression type, which picks
up the object's cv (what ``decltype((a->x))`` builds a reference to).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

from . import traits
from .ast import (
    Call,
    Expr,
    Id,
    Member,
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
    call_return_type,
    classify,
    from_reference,
    is_overloaded_operator,
    member_access,
    overloaded_add_return_type,
    prvalue_type,
)
from .errors import (
    CannotBindNonConstRef,
    InvalidDeclaration,
    NotAType,
    UnknownIdentifier,
    UnknownTrait,
)
from .typemodel import (
    SCALAR_SPELLINGS,
    Class,
    ClassTemplate,
    Env,
    Function,
    FunctionDecl,
    LValueRef,
    OverloadSet,
    Pointer,
    RValueRef,
    RefKind,
    Scalar,
    ScalarKind,
    Type,
    TypeAlias,
    ValueCategory,
    Variable,
    add_cv,
    adjust_param,
    collapse_refs,
    decay,
    strip_cv,
)


@dataclass(frozen=True)
class AutoPattern:
    add_const: bool = False
    lvalue_ref: bool = False

    def __str__(self) -> str:
        return ("const " if self.add_const else "") + "auto" + ("&" if self.lvalue_ref else "")


@dataclass(frozen=True)
class FnDeclForm:
    style: Literal["leading", "trailing"]
    params: tuple[tuple[Optional[str], TypeExpr], ...]
    return_type: TypeExpr


def deduce_auto(p: AutoPattern, init: Expr, env: Env) -> Type:
    te = classify(init, env)
    base = te.type
    if isinstance(base, Scalar) and base.kind is ScalarKind.VOID:
        raise InvalidDeclaration("variable has incomplete type 'void'")
    if not p.lvalue_ref:
        return add_cv(strip_cv(decay(base)), const=p.add_const)
    if p.add_const:
        return LValueRef(add_cv(base, const=True))
    if te.category is not ValueCategory.LVALUE:
        raise CannotBindNonConstRef(
            f"non-const lvalue reference cannot bind to a {te.category.value} of type '{base}'"
        )
    return LValueRef(base)


def decltype_of(e: Expr, env: Env) -> Type:
    """Type named by ``decltype(e)``.  ``e`` is never evaluated."""
    if isinstance(e, Id):
        entity = env.lookup(e.name)
        if isinstance(entity, Variable):
            return entity.declared
        return classify(e, env).type  # a function name: its function type
    if isinstance(e, Member):
        return member_access(e, env)[2]
    if isinstance(e, Call):
        return _declared_result(call_return_type(e, env))
    if is_overloaded_operator(e, env):
        lhs = classify(e.lhs, env)
        rhs = classify(e.rhs, env)
        return _declared_result(overloaded_add_return_type(lhs, rhs, env))
    return classify(e, env).as_decltype()


def _declared_result(ret: Type) -> Type:
    if isinstance(ret, (LValueRef, RValueRef)):
        return ret
    return prvalue_type(ret)


def declval_type(t: TypeExpr, env: Env) -> tuple[Type, ValueCategory]:
    """Type and category of ``declval<t>()``; abstract or incomplete t is fine."""
    resolved = resolve_type_expr(t, env)
    return from_reference(collapse_refs(RefKind.RVALUE, resolved))


def resolve_function_decl(f: FnDeclForm, env: Env) -> Function:
    declared = [resolve_type_expr(te, env) for _, te in f.params]
    for t in declared:
        if isinstance(t, Scalar) and t.kind is ScalarKind.VOID and len(declared) > 1:
            raise InvalidDeclaration("'void' must be the only parameter")
    if len(declared) == 1 and declared[0] == Scalar(ScalarKind.VOID) and f.params[0][0] is None:
        declared = []
    if f.style == "trailing":
        scope = env.child()
        for (name, _), t in zip(f.params, declared):
            if name is not None:
                scope.declare(name, Variable(t))
        ret = resolve_type_expr(f.return_type, scope)
    else:
        ret = resolve_type_expr(f.return_type, env)
    if isinstance(ret, Function):
        raise InvalidDeclaration("function cannot return a function type")
    return Function(tuple(adjust_param(t) for t in declared), ret)


# -- type-expression resolution ----------------------------------------------


def resolve_type_expr(te: TypeExpr, env: Env) -> Type:
    """Resolve a type-expression to a Type.

    Raises ``SubstitutionFailure`` where the expression names no type
    (a false ``enable_if``, an unmatched ``result_of``); the template
    machinery turns that into a removed candidate.
    """
    if isinstance(te, TConcrete):
        return te.type
    if isinstance(te, TName):
        return _resolve_name(te, env)
    if isinstance(te, TCv):
        return add_cv(resolve_type_expr(te.inner, env), te.const, te.volatile)
    if isinstance(te, TPointer):
        inner = resolve_type_expr(te.inner, env)
        if isinstance(inner, (LValueRef, RValueRef)):
            raise InvalidDeclaration(f"'{inner}' cannot be pointed to")
        return Pointer(inner, te.const, te.volatile)
    if isinstance(te, (TLRef, TRRef)):
        inner = resolve_type_expr(te.inner, env)
        if isinstance(inner, Scalar) and inner.kind is ScalarKind.VOID:
            raise InvalidDeclaration("cannot form a reference to 'void'")
        kind = RefKind.LVALUE if isinstance(te, TLRef) else RefKind.RVALUE
        return collapse_refs(kind, inner)
    if isinstance(te, TDecltype):
        return decltype_of(te.expr, env)
    if isinstance(te, TTrait):
        return _resolve_trait(te, env)
    if isinstance(te, TFunc):
        ret = resolve_type_expr(te.ret, env)
        params = [resolve_type_expr(p, env) for p in te.params]
        if params == [Scalar(ScalarKind.VOID)]:
            params = []
        return Function(tuple(adjust_param(p) for p in params), ret)
    raise TypeError(f"not a type-expression: {te!r}")


def _resolve_name(te: TName, env: Env) -> Type:
    if te.name in SCALAR_SPELLINGS and not te.args and env.lookup(te.name) is None:
        return Scalar(SCALAR_SPELLINGS[te.name])
    entity = env.lookup(te.name)
    if entity is None:
        if te.name in traits.ALL_TRAITS:
            raise InvalidDeclaration(f"trait '{te.name}' used without '::type'")
        raise UnknownIdentifier(te.name)
    if isinstance(entity, TypeAlias):
        if te.args:
            raise InvalidDeclaration(f"'{te.name}' is not a template")
        return entity.type
    if isinstance(entity, ClassTemplate):
        defn = entity.defn
        if len(te.args) != len(defn.template_params):
            if defn.template_params:
                raise InvalidDeclaration(
                    f"'{te.name}' expects {len(defn.template_params)} template argument(s)"
                )
            raise InvalidDeclaration(f"'{te.name}' is not a template")
        return Class(te.name, tuple(resolve_type_expr(a, env) for a in te.args))
    if isinstance(entity, OverloadSet) and not te.args:
        members = [m for m in entity.members if isinstance(m, FunctionDecl)]
        if len(members) == 1 and len(entity.members) == 1:
            return members[0].signature
    raise NotAType(te.name)


def _resolve_trait(te: TTrait, env: Env) -> Type:
    name = te.name
    if name in traits.TRANSFORMS:
        if len(te.args) != 1 or isinstance(te.args[0], (VTrait, VNot, VBool)):
            raise InvalidDeclaration(f"'{name}' takes exactly one type argument")
        return traits.eval_transform(name, resolve_type_expr(te.args[0], env))
    if name == "enable_if":
        if not 1 <= len(te.args) <= 2:
            raise InvalidDeclaration("'enable_if' takes a condition and an optional type")
        cond = eval_value_expr(te.args[0], env)
        if len(te.args) == 2:
            payload = resolve_type_expr(te.args[1], env)
        else:
            payload = Scalar(ScalarKind.VOID)
        return traits.unwrap(traits.eval_enable_if(cond, payload))
    if name == "result_of":
        if len(te.args) != 1 or not isinstance(te.args[0], TFunc):
            raise InvalidDeclaration("'result_of' takes a single F(Args...) argument")
        sig = te.args[0]
        callee = resolve_type_expr(sig.ret, env)
        args = [resolve_type_expr(p, env) for p in sig.params]
        return traits.unwrap(traits.eval_result_of(callee, args, env))
    if name in traits.PREDICATES:
        raise InvalidDeclaration(f"'{name}' has no member 'type'; use '::value'")
    raise UnknownTrait(name)


def eval_value_expr(ve: ValueExpr | TypeExpr, env: Env) -> bool:
    if isinstance(ve, VBool):
        return ve.value
    if isinstance(ve, VNot):
        return not eval_value_expr(ve.inner, env)
    if isinstance(ve, VTrait):
        args = [resolve_type_expr(a, env) for a in ve.args]
        return traits.eval_predicate(ve.name, args, env)
    raise InvalidDeclaration("expected a boolean constant expression")
