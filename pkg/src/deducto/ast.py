"""Expression and type-expression trees, expression typing, and a tiny evaluator.

Expression types are reference-free: a declared reference contributes the
value category, never the type.  ``classify`` is pure; ``evaluate`` threads
an explicit store and is the only place where side effects happen.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .errors import (
    DeclvalInEvaluatedContext,
    InvalidOperand,
    NonEvaluableExpr,
    NotAPointer,
    NotArithmetic,
    UnknownIdentifier,
)
from .typemodel import (
    INT,
    DOUBLE,
    Class,
    Env,
    FunctionDecl,
    LValueRef,
    OverloadSet,
    Pointer,
    RValueRef,
    Type,
    ValueCategory,
    Variable,
    add_cv,
    cv_of,
    is_arithmetic,
    is_integral,
    strip_cv,
    RefKind,
    collapse_refs,
)

# -- type expressions ---------------------------------------------------------


@dataclass(frozen=True)
class TConcrete:
    type: Type


@dataclass(frozen=True)
class TName:
    name: str
    args: tuple["TypeExpr", ...] = ()


@dataclass(frozen=True)
class TCv:
    inner: "TypeExpr"
    const: bool = True
    volatile: bool = False


@dataclass(frozen=True)
class TPointer:
    inner: "TypeExpr"
    const: bool = False
    volatile: bool = False


@dataclass(frozen=True)
class TLRef:
    inner: "TypeExpr"


@dataclass(frozen=True)
class TRRef:
    inner: "TypeExpr"


@dataclass(frozen=True)
class TDecltype:
    expr: "Expr"


@dataclass(frozen=True)
class TTrait:
    """``name<args>::type``; args mix type-exprs and value-exprs."""

    name: str
    args: tuple[Union["TypeExpr", "ValueExpr"], ...]


@dataclass(frozen=True)
class TFunc:
    """Function type ``ret(params)``; inside result_of, ``ret`` is the callee."""

    ret: "TypeExpr"
    params: tuple["TypeExpr", ...]


@dataclass(frozen=True)
class VTrait:
    """``name<args>::value``."""

    name: str
    args: tuple["TypeExpr", ...]


@dataclass(frozen=True)
class VNot:
    inner: "ValueExpr"


@dataclass(frozen=True)
class VBool:
    value: bool


TypeExpr = Union[TConcrete, TName, TCv, TPointer, TLRef, TRRef, TDecltype, TTrait, TFunc]
ValueExpr = Union[VTrait, VNot, VBool]
VALUE_EXPRS = (VTrait, VNot, VBool)

# -- expressions --------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class FloatLit:
    value: float


@dataclass(frozen=True)
class Id:
    name: str


@dataclass(frozen=True)
class Member:
    base: "Expr"
    field: str
    arrow: bool = False


@dataclass(frozen=True)
class Call:
    callee: str
    args: tuple["Expr", ...] = ()


@dataclass(frozen=True)
class Paren:
    inner: "Expr"


@dataclass(frozen=True)
class PostInc:
    inner: "Expr"


@dataclass(frozen=True)
class Add:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Declval:
    arg: TypeExpr


@dataclass(frozen=True)
class New:
    type: TypeExpr


Expr = Union[IntLit, FloatLit, Id, Member, Call, Paren, PostInc, Add, Declval, New]


@dataclass(frozen=True)
class TypedExpr:
    expr: Expr
    type: Type
    category: ValueCategory

    def as_decltype(self) -> Type:
        """The category folded back into a reference (lvalue -> T&, xvalue -> T&&)."""
        if self.category is ValueCategory.LVALUE:
            return collapse_refs(RefKind.LVALUE, self.type)
        if self.category is ValueCategory.XVALUE:
            return collapse_refs(RefKind.RVALUE, self.type)
        return self.type


def from_reference(t: Type) -> tuple[Type, ValueCategory]:
    """Split a (possibly reference) type into expression type and category."""
    if isinstance(t, LValueRef):
        return t.referee, ValueCategory.LVALUE
    if isinstance(t, RValueRef):
        return t.referee, ValueCategory.XVALUE
    return prvalue_type(t), ValueCategory.PRVALUE


def prvalue_type(t: Type) -> Type:
    # prvalues of non-class type are never cv-qualified
    if isinstance(t, Class):
        return t
    return strip_cv(t)


def classify(e: Expr, env: Env) -> TypedExpr:
    if isinstance(e, IntLit):
        return TypedExpr(e, INT, ValueCategory.PRVALUE)
    if isinstance(e, FloatLit):
        return TypedExpr(e, DOUBLE, ValueCategory.PRVALUE)
    if isinstance(e, Id):
        entity = env.lookup(e.name)
        if isinstance(entity, Variable):
            t = entity.declared
            if isinstance(t, (LValueRef, RValueRef)):
                t = t.referee
            return TypedExpr(e, t, ValueCategory.LVALUE)
        if isinstance(entity, OverloadSet):
            fn = _single_function(entity)
            return TypedExpr(e, fn.signature, ValueCategory.LVALUE)
        raise UnknownIdentifier(e.name)
    if isinstance(e, Paren):
        inner = classify(e.inner, env)
        return TypedExpr(e, inner.type, inner.category)
    if isinstance(e, Member):
        t, cat, _declared = member_access(e, env)
        return TypedExpr(e, t, cat)
    if isinstance(e, Call):
        ret = call_return_type(e, env)
        t, cat = from_reference(ret)
        return TypedExpr(e, t, cat)
    if isinstance(e, PostInc):
        inner = classify(e.inner, env)
        if inner.category is not ValueCategory.LVALUE:
            raise InvalidOperand("operand of '++' must be an lvalue")
        if not is_integral(inner.type):
            raise InvalidOperand(f"operand of '++' has non-integral type '{inner.type}'")
        if cv_of(inner.type)[0]:
            raise InvalidOperand(f"cannot increment value of const type '{inner.type}'")
        return TypedExpr(e, strip_cv(inner.type), ValueCategory.PRVALUE)
    if isinstance(e, Add):
        lhs = classify(e.lhs, env)
        rhs = classify(e.rhs, env)
        if isinstance(lhs.type, Class) or isinstance(rhs.type, Class):
            ret = overloaded_add_return_type(lhs, rhs, env)
            t, cat = from_reference(ret)
            return TypedExpr(e, t, cat)
        if not (is_arithmetic(lhs.type) and is_arithmetic(rhs.type)):
            raise NotArithmetic(f"invalid operands to '+' ('{lhs.type}' and '{rhs.type}')")
        from .typemodel import common_arithmetic_type

        return TypedExpr(e, common_arithmetic_type(lhs.type, rhs.type), ValueCategory.PRVALUE)
    if isinstance(e, Declval):
        from .deduce import declval_type

        t, cat = declval_type(e.arg, env)
        return TypedExpr(e, t, cat)
    if isinstance(e, New):
        from .deduce import resolve_type_expr

        t = resolve_type_expr(e.type, env)
        return TypedExpr(e, Pointer(t), ValueCategory.PRVALUE)
    raise TypeError(f"not an expression: {e!r}")


def _single_function(entity: OverloadSet) -> FunctionDecl:
    plain = [m for m in entity.members if isinstance(m, FunctionDecl)]
    if len(entity.members) != 1 or not plain:
        raise InvalidOperand(f"reference to overloaded function '{entity.name}' is ambiguous")
    return plain[0]


def member_access(e: Member, env: Env) -> tuple[Type, ValueCategory, Type]:
    """Return (expression type, category, declared member type)."""
    base = classify(e.base, env)
    if e.arrow:
        if not isinstance(base.type, Pointer):
            raise NotAPointer(f"member reference type '{base.type}' is not a pointer")
        obj = base.type.pointee
        obj_cat = ValueCategory.LVALUE
    else:
        obj = base.type
        obj_cat = base.category
    if not isinstance(obj, Class):
        raise NotAPointer(f"member reference base type '{obj}' is not a class")
    inst = env.instantiate(Class(obj.name, obj.args))
    declared, is_static = inst.member(e.field)
    if isinstance(declared, (LValueRef, RValueRef)):
        return declared.referee, ValueCategory.LVALUE, declared
    if is_static:
        return declared, ValueCategory.LVALUE, declared
    const, volatile = cv_of(obj)
    cat = ValueCategory.LVALUE if obj_cat is ValueCategory.LVALUE else ValueCategory.XVALUE
    return add_cv(declared, const, volatile), cat, declared


def arg_type(te: TypedExpr) -> Type:
    return te.as_decltype()


def call_return_type(e: Call, env: Env) -> Type:
    """Declared return type of the function a call selects."""
    args = [arg_type(classify(a, env)) for a in e.args]
    entity = env.lookup(e.callee)
    if entity is None:
        raise UnknownIdentifier(e.callee)
    if isinstance(entity, Variable):
        from .traits import eval_result_of, unwrap

        callee = entity.declared
        return unwrap(eval_result_of(callee, args, env))
    from .resolve import resolve_overload

    cand = resolve_overload(e.callee, args, env)
    return cand.resolved_signature.ret


def overloaded_add_return_type(lhs: TypedExpr, rhs: TypedExpr, env: Env) -> Type:
    from .resolve import resolve_overload

    if env.lookup("operator+") is None:
        raise NotArithmetic(f"invalid operands to '+' ('{lhs.type}' and '{rhs.type}')")
    cand = resolve_overload("operator+", [arg_type(lhs), arg_type(rhs)], env)
    return cand.resolved_signature.ret


def is_overloaded_operator(e: Expr, env: Env) -> bool:
    if not isinstance(e, Add):
        return False
    lhs = classify(e.lhs, env)
    rhs = classify(e.rhs, env)
    return isinstance(lhs.type, Class) or isinstance(rhs.type, Class)


def free_identifiers(node: object) -> list[str]:
    """Expression identifiers (variables and callees) in source order."""
    out: list[str] = []
    _collect_names(node, out)
    return out


def _collect_names(node: object, out: list[str]) -> None:
    if isinstance(node, Id):
        out.append(node.name)
    elif isinstance(node, Call):
        out.append(node.callee)
        for a in node.args:
            _collect_names(a, out)
    elif isinstance(node, Member):
        _collect_names(node.base, out)
    elif isinstance(node, (Paren, PostInc, TCv, TPointer, TLRef, TRRef, VNot)):
        _collect_names(node.inner, out)
    elif isinstance(node, Add):
        _collect_names(node.lhs, out)
        _collect_names(node.rhs, out)
    elif isinstance(node, Declval):
        _collect_names(node.arg, out)
    elif isinstance(node, New):
        _collect_names(node.type, out)
    elif isinstance(node, TDecltype):
        _collect_names(node.expr, out)
    elif isinstance(node, (TName, TTrait, VTrait)):
        for a in node.args:
            _collect_names(a, out)
    elif isinstance(node, TFunc):
        _collect_names(node.ret, out)
        for p in node.params:
            _collect_names(p, out)


# -- evaluation ---------------------------------------------------------------


def contains_declval(e: Expr) -> bool:
    """True if a declval node sits in an evaluated position of ``e``."""
    if isinstance(e, Declval):
        return True
    if isinstance(e, (Paren, PostInc)):
        return contains_declval(e.inner)
    if isinstance(e, Member):
        return contains_declval(e.base)
    if isinstance(e, Add):
        return contains_declval(e.lhs) or contains_declval(e.rhs)
    if isinstance(e, Call):
        return any(contains_declval(a) for a in e.args)
    return False


def evaluate(e: Expr, env: Env, store: Mapping[str, int]) -> tuple[int, dict[str, int]]:
    """Evaluate an integer expression; returns the value and the new store."""
    if contains_declval(e):
        raise DeclvalInEvaluatedContext()
    return _eval(e, env, dict(store))


def _eval(e: Expr, env: Env, store: dict[str, int]) -> tuple[int, dict[str, int]]:
    if isinstance(e, IntLit):
        return e.value, store
    if isinstance(e, Id):
        entity = env.lookup(e.name)
        if entity is None:
            raise UnknownIdentifier(e.name)
        if not (isinstance(entity, Variable) and is_integral(entity.declared)):
            raise NonEvaluableExpr(f"'{e.name}' is not an integer variable")
        if e.name not in store:
            raise NonEvaluableExpr(f"'{e.name}' has no known value")
        return store[e.name], store
    if isinstance(e, Paren):
        return _eval(e.inner, env, store)
    if isinstance(e, PostInc):
        target = e.inner
        while isinstance(target, Paren):
            target = target.inner
        if not isinstance(target, Id):
            raise NonEvaluableExpr("'++' is only evaluated on variables")
        classify(e, env)
        old, store = _eval(target, env, store)
        store = dict(store)
        store[target.name] = old + 1
        return old, store
    if isinstance(e, Add):
        lhs, store = _eval(e.lhs, env, store)
        rhs, store = _eval(e.rhs, env, store)
        return lhs + rhs, store
    raise NonEvaluableExpr(f"cannot evaluate {type(e).__name__} expressions")
