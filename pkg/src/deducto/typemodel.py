"""Type algebra: scalars, class instances, pointers, references and functions.

Types are immutable and compared structurally.  cv-qualifiers live on the
node they qualify; reference and function nodes never carry them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Union

from .errors import (
    InvalidDeclaration,
    NoSuchField,
    NotArithmetic,
    NotAType,
    Redeclaration,
)

if TYPE_CHECKING:
    from .ast import TypeExpr


class ScalarKind(enum.Enum):
    BOOL = "bool"
    CHAR = "char"
    SCHAR = "signed char"
    UCHAR = "unsigned char"
    SHORT = "short"
    USHORT = "unsigned short"
    INT = "int"
    UINT = "unsigned int"
    LONG = "long"
    ULONG = "unsigned long"
    LLONG = "long long"
    ULLONG = "unsigned long long"
    FLOAT = "float"
    DOUBLE = "double"
    LDOUBLE = "long double"
    VOID = "void"

    @property
    def spelling(self) -> str:
        return self.value

    @property
    def is_integral(self) -> bool:
        return self in INTEGRAL_KINDS

    @property
    def is_floating(self) -> bool:
        return self in (ScalarKind.FLOAT, ScalarKind.DOUBLE, ScalarKind.LDOUBLE)

    @property
    def is_arithmetic(self) -> bool:
        return self is not ScalarKind.VOID


# Conversion ladder; everything below INT promotes to int first.
CONVERSION_RANK = {
    ScalarKind.BOOL: 0,
    ScalarKind.CHAR: 1,
    ScalarKind.SCHAR: 1,
    ScalarKind.UCHAR: 1,
    ScalarKind.SHORT: 2,
    ScalarKind.USHORT: 2,
    ScalarKind.INT: 3,
    ScalarKind.UINT: 4,
    ScalarKind.LONG: 5,
    ScalarKind.ULONG: 6,
    ScalarKind.LLONG: 7,
    ScalarKind.ULLONG: 8,
    ScalarKind.FLOAT: 9,
    ScalarKind.DOUBLE: 10,
    ScalarKind.LDOUBLE: 11,
}

INTEGRAL_KINDS = frozenset(k for k, r in CONVERSION_RANK.items() if r <= 8)
ARITHMETIC_KINDS = tuple(CONVERSION_RANK)

# Keyword sequences accepted by the DSL, mapped to a kind.
SCALAR_SPELLINGS: dict[str, ScalarKind] = {k.spelling: k for k in ScalarKind}
SCALAR_SPELLINGS.update(
    {
        "signed": ScalarKind.INT,
        "unsigned": ScalarKind.UINT,
        "signed int": ScalarKind.INT,
        "short int": ScalarKind.SHORT,
        "signed short": ScalarKind.SHORT,
        "unsigned short int": ScalarKind.USHORT,
        "long int": ScalarKind.LONG,
        "signed long": ScalarKind.LONG,
        "unsigned long int": ScalarKind.ULONG,
        "long long int": ScalarKind.LLONG,
        "signed long long": ScalarKind.LLONG,
        "unsigned long long int": ScalarKind.ULLONG,
    }
)


class RefKind(enum.Enum):
    LVALUE = "&"
    RVALUE = "&&"


class ValueCategory(enum.Enum):
    LVALUE = "lvalue"
    XVALUE = "xvalue"
    PRVALUE = "prvalue"

    @property
    def is_rvalue(self) -> bool:
        return self is not ValueCategory.LVALUE


@dataclass(frozen=True)
class Scalar:
    kind: ScalarKind
    const: bool = False
    volatile: bool = False

    def __str__(self) -> str:
        return spell(self)


@dataclass(frozen=True)
class Class:
    name: str
    args: tuple["Type", ...] = ()
    const: bool = False
    volatile: bool = False

    def __str__(self) -> str:
        return spell(self)


@dataclass(frozen=True)
class Pointer:
    pointee: "Type"
    const: bool = False
    volatile: bool = False

    def __str__(self) -> str:
        return spell(self)


@dataclass(frozen=True)
class LValueRef:
    referee: "Type"

    def __post_init__(self) -> None:
        if isinstance(self.referee, (LValueRef, RValueRef)):
            raise ValueError("reference to reference; use collapse_refs")

    def __str__(self) -> str:
        return spell(self)


@dataclass(frozen=True)
class RValueRef:
    referee: "Type"

    def __post_init__(self) -> None:
        if isinstance(self.referee, (LValueRef, RValueRef)):
            raise ValueError("reference to reference; use collapse_refs")

    def __str__(self) -> str:
        return spell(self)


@dataclass(frozen=True)
class Function:
    params: tuple["Type", ...]
    ret: "Type"

    def __str__(self) -> str:
        return spell(self)


Type = Union[Scalar, Class, Pointer, LValueRef, RValueRef, Function]
CV_TYPES = (Scalar, Class, Pointer)

VOID = Scalar(ScalarKind.VOID)
INT = Scalar(ScalarKind.INT)
DOUBLE = Scalar(ScalarKind.DOUBLE)
BOOL = Scalar(ScalarKind.BOOL)
SIZE_T = Scalar(ScalarKind.ULONG)


def scalar(kind: ScalarKind | str, const: bool = False, volatile: bool = False) -> Scalar:
    if isinstance(kind, str):
        kind = SCALAR_SPELLINGS[kind]
    return Scalar(kind, const, volatile)


def is_reference(t: Type) -> bool:
    return isinstance(t, (LValueRef, RValueRef))


def is_arithmetic(t: Type) -> bool:
    return isinstance(t, Scalar) and t.kind.is_arithmetic


def is_integral(t: Type) -> bool:
    return isinstance(t, Scalar) and t.kind.is_integral


def cv_of(t: Type) -> tuple[bool, bool]:
    if isinstance(t, CV_TYPES):
        return t.const, t.volatile
    return False, False


def with_cv(t: Type, const: bool, volatile: bool) -> Type:
    """Set top-level cv exactly; references and functions are left alone."""
    if isinstance(t, CV_TYPES):
        return replace(t, const=const, volatile=volatile)
    return t


def add_cv(t: Type, const: bool = False, volatile: bool = False) -> Type:
    c, v = cv_of(t)
    return with_cv(t, c or const, v or volatile)


def strip_cv(t: Type) -> Type:
    return with_cv(t, False, False)


def remove_ref(t: Type) -> Type:
    if isinstance(t, (LValueRef, RValueRef)):
        return t.referee
    return t


def collapse_refs(outer: RefKind, inner: Type) -> Type:
    """Apply ``&`` or ``&&`` to ``inner``, collapsing reference-to-reference."""
    if isinstance(inner, LValueRef):
        return inner
    if isinstance(inner, RValueRef):
        if outer is RefKind.LVALUE:
            return LValueRef(inner.referee)
        return inner
    if isinstance(inner, Scalar) and inner.kind is ScalarKind.VOID:
        # void& is not a type; the standard transforms leave void unchanged
        return inner
    return LValueRef(inner) if outer is RefKind.LVALUE else RValueRef(inner)


def strip_ref_and_top_cv(t: Type) -> Type:
    return strip_cv(remove_ref(t))


def common_arithmetic_type(a: Type, b: Type) -> Scalar:
    for t in (a, b):
        if not is_arithmetic(remove_ref(t)):
            raise NotArithmetic(f"operand of type '{spell(t)}' is not arithmetic")
    ka = _promote(remove_ref(a).kind)
    kb = _promote(remove_ref(b).kind)
    return Scalar(ka if CONVERSION_RANK[ka] >= CONVERSION_RANK[kb] else kb)


def _promote(kind: ScalarKind) -> ScalarKind:
    if CONVERSION_RANK[kind] < CONVERSION_RANK[ScalarKind.INT]:
        return ScalarKind.INT
    return kind


def decay(t: Type) -> Type:
    if isinstance(t, Function):
        return Pointer(t)
    return t


# -- spelling -----------------------------------------------------------------


def _cv_prefix(t: Type) -> str:
    c, v = cv_of(t)
    return ("const " if c else "") + ("volatile " if v else "")


def spell(t: Type, declarator: str = "") -> str:
    """Canonical west-const spelling, valid as a C++ type-id."""
    if isinstance(t, Scalar):
        return _cv_prefix(t) + t.kind.spelling + declarator
    if isinstance(t, Class):
        args = ", ".join(spell(a) for a in t.args)
        name = f"{t.name}<{args}>" if t.args else t.name
        return _cv_prefix(t) + name + declarator
    if isinstance(t, Pointer):
        suffix = ""
        if t.const:
            suffix += " const"
        if t.volatile:
            suffix += " volatile"
        if suffix and declarator and declarator[0] not in "*&":
            suffix += " "
        return spell(t.pointee, "*" + suffix + declarator)
    if isinstance(t, LValueRef):
        return spell(t.referee, "&" + declarator)
    if isinstance(t, RValueRef):
        return spell(t.referee, "&&" + declarator)
    if isinstance(t, Function):
        params = ", ".join(spell(p) for p in t.params)
        inner = f"({declarator})" if declarator else ""
        return spell(t.ret, f"{inner}({params})")
    raise TypeError(f"not a type: {t!r}")


def type_depth(t: Type) -> int:
    if isinstance(t, Scalar):
        return 1
    if isinstance(t, Class):
        return 1 + max((type_depth(a) for a in t.args), default=0)
    if isinstance(t, Pointer):
        return 1 + type_depth(t.pointee)
    if isinstance(t, (LValueRef, RValueRef)):
        return 1 + type_depth(t.referee)
    return 1 + max([type_depth(t.ret)] + [type_depth(p) for p in t.params])


# -- classes and scopes -------------------------------------------------------


@dataclass
class ClassDef:
    name: str
    template_params: tuple[str, ...] = ()
    fields: dict[str, "TypeExpr"] = field(default_factory=dict)
    static_fields: dict[str, "TypeExpr"] = field(default_factory=dict)
    # each entry is (parameter type-exprs, return type-expr)
    call_operators: tuple[tuple[tuple["TypeExpr", ...], "TypeExpr"], ...] = ()
    is_abstract: bool = False
    is_trivially_copy_assignable: bool = True
    complete: bool = True


@dataclass(frozen=True)
class ClassInstance:
    """A ClassDef with its template parameters substituted."""

    type: Class
    defn: ClassDef
    fields: dict[str, Type]
    static_fields: dict[str, Type]
    call_operators: tuple[Function, ...]

    @property
    def is_abstract(self) -> bool:
        return self.defn.is_abstract

    @property
    def is_trivially_copy_assignable(self) -> bool:
        return self.defn.is_trivially_copy_assignable

    def member(self, name: str) -> tuple[Type, bool]:
        """Declared type of a member and whether it is static."""
        if name in self.fields:
            return self.fields[name], False
        if name in self.static_fields:
            return self.static_fields[name], True
        if not self.defn.complete:
            raise NoSuchField(f"member access into incomplete type '{spell(self.type)}'")
        raise NoSuchField(f"no member named '{name}' in '{spell(self.type)}'")


@dataclass(frozen=True)
class Variable:
    declared: Type


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    signature: Function


@dataclass(frozen=True)
class TypeAlias:
    type: Type


@dataclass(frozen=True)
class ClassTemplate:
    defn: ClassDef


@dataclass
class OverloadSet:
    name: str
    members: list[Any] = field(default_factory=list)


class Env:
    """A lexical scope.  Child scopes share the class-instantiation memo."""

    def __init__(self, parent: Env | None = None):
        self.parent = parent
        self.names: dict[str, Any] = {}
        if parent is None:
            self._instances: dict[tuple[str, tuple[Type, ...]], ClassInstance] = {}
            self.names["size_t"] = TypeAlias(SIZE_T)
        else:
            self._instances = parent._instances

    def child(self) -> Env:
        return Env(self)

    def lookup(self, name: str) -> Any | None:
        scope: Env | None = self
        while scope is not None:
            if name in scope.names:
                return scope.names[name]
            scope = scope.parent
        return None

    def declare(self, name: str, entity: Any) -> None:
        if name in self.names and not (self.parent is None and name == "size_t"):
            raise Redeclaration(name)
        self.names[name] = entity

    def declare_function(self, name: str, fn: Any) -> None:
        """Add a plain function or template function to the overload set."""
        existing = self.names.get(name)
        if existing is None:
            self.names[name] = OverloadSet(name, [fn])
        elif isinstance(existing, OverloadSet):
            if isinstance(fn, FunctionDecl) and any(
                isinstance(m, FunctionDecl) and m.signature == fn.signature for m in existing.members
            ):
                return  # redeclaration of the same function is harmless
            existing.members.append(fn)
        else:
            raise Redeclaration(name)

    def declare_class(self, defn: ClassDef) -> None:
        existing = self.names.get(defn.name)
        if isinstance(existing, ClassTemplate) and not existing.defn.complete and defn.complete:
            if existing.defn.template_params != defn.template_params:
                raise InvalidDeclaration(f"'{defn.name}' redeclared with different template parameters")
            self.names[defn.name] = ClassTemplate(defn)
            return
        if isinstance(existing, ClassTemplate) and not defn.complete:
            return
        self.declare(defn.name, ClassTemplate(defn))

    def class_def(self, name: str) -> ClassDef:
        entity = self.lookup(name)
        if not isinstance(entity, ClassTemplate):
            raise NotAType(name)
        return entity.defn

    def instantiate(self, cls: Class) -> ClassInstance:
        key = (cls.name, cls.args)
        inst = self._instances.get(key)
        if inst is not None:
            return inst
        defn = self.class_def(cls.name)
        if len(defn.template_params) != len(cls.args):
            raise InvalidDeclaration(
                f"'{cls.name}' expects {len(defn.template_params)} template argument(s), got {len(cls.args)}"
            )
        from .deduce import resolve_type_expr

        scope = self._scope_of(cls.name).child()
        for pname, arg in zip(defn.template_params, cls.args):
            scope.names[pname] = TypeAlias(arg)
        fields = {n: resolve_type_expr(te, scope) for n, te in defn.fields.items()}
        statics = {n: resolve_type_expr(te, scope) for n, te in defn.static_fields.items()}
        ops = []
        for params, ret in defn.call_operators:
            ps = tuple(adjust_param(resolve_type_expr(p, scope)) for p in params)
            ops.append(Function(ps, resolve_type_expr(ret, scope)))
        inst = ClassInstance(Class(cls.name, cls.args), defn, fields, statics, tuple(ops))
        self._instances[key] = inst
        return inst

    def _scope_of(self, name: str) -> Env:
        scope: Env | None = self
        while scope is not None:
            if name in scope.names:
                return scope
            scope = scope.parent
        raise NotAType(name)


def adjust_param(t: Type) -> Type:
    """Parameter type adjustment: drop top-level cv, decay functions."""
    return strip_cv(decay(t))
