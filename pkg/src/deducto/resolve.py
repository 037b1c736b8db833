"""Template argument deduction, substitution with SFINAE, overload selection.

Argument types handed to this module use the decltype encoding: an lvalue
of ``T`` is passed as ``T&``, an xvalue as ``T&&`` and a prvalue as ``T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Union

from .ast import (
    TCv,
    TFunc,
    TLRef,
    TName,
    TPointer,
    TRRef,
    TypeExpr,
    from_reference,
)
from .deduce import resolve_type_expr
from .errors import (
    AmbiguousOverload,
    DeductionFailure,
    DeductoError,
    NonDeducibleTemplate,
    NotCallable,
    NoViableOverload,
    UnknownIdentifier,
)
from .traits import Ok, SubstFailure, SubstOutcome
from .typemodel import (
    Class,
    Env,
    Function,
    FunctionDecl,
    LValueRef,
    OverloadSet,
    Pointer,
    RValueRef,
    Scalar,
    ScalarKind,
    Type,
    TypeAlias,
    ValueCategory,
    Variable,
    adjust_param,
    cv_of,
    decay,
    is_arithmetic,
    spell,
    strip_cv,
    with_cv,
)

Binding = dict[str, Type]


@dataclass(frozen=True)
class TemplateFunction:
    name: str
    template_params: tuple[str, ...]
    params: tuple[tuple[Optional[str], TypeExpr], ...]
    return_type: TypeExpr
    style: Literal["leading", "trailing"] = "leading"

    def __post_init__(self) -> None:
        if len(set(self.template_params)) != len(self.template_params):
            raise NonDeducibleTemplate(f"duplicate template parameter in '{self.name}'")
        patterns = [te for _, te in self.params]
        for p in self.template_params:
            if not any(_mentions(te, (p,)) for te in patterns):
                raise NonDeducibleTemplate(
                    f"template parameter '{p}' of '{self.name}' is not deducible from any parameter"
                )


@dataclass(frozen=True)
class Candidate:
    decl: Union[TemplateFunction, FunctionDecl]
    binding: Binding
    resolved_signature: Function
    outcome: SubstOutcome

    @property
    def is_template(self) -> bool:
        return isinstance(self.decl, TemplateFunction)


# -- deduction ----------------------------------------------------------------


def _mentions(te: TypeExpr, names: tuple[str, ...]) -> bool:
    """Does ``te`` mention any of ``names`` in a deducible position?"""
    if isinstance(te, TName):
        return (te.name in names and not te.args) or any(_mentions(a, names) for a in te.args)
    if isinstance(te, (TCv, TPointer, TLRef, TRRef)):
        return _mentions(te.inner, names)
    if isinstance(te, TFunc):
        return _mentions(te.ret, names) or any(_mentions(p, names) for p in te.params)
    return False  # decltype, traits and concrete types are non-deduced contexts


def deduce_template_args(
    patterns: list[TypeExpr], arg_types: list[Type], template_params: tuple[str, ...]
) -> Binding:
    if len(patterns) != len(arg_types):
        raise DeductionFailure(f"expected {len(patterns)} argument(s), got {len(arg_types)}")
    binding: Binding = {}
    for pattern, arg in zip(patterns, arg_types):
        _deduce_param(pattern, arg, template_params, binding)
    for p in template_params:
        if p not in binding:
            raise DeductionFailure(f"could not deduce template parameter '{p}'")
    return binding


def _deduce_param(pattern: TypeExpr, arg: Type, tparams: tuple[str, ...], binding: Binding) -> None:
    t, cat = from_reference(arg)
    if isinstance(pattern, TLRef):
        _unify(pattern.inner, t, tparams, binding)
    elif isinstance(pattern, TRRef):
        inner = pattern.inner
        if isinstance(inner, TName) and inner.name in tparams and not inner.args:
            # forwarding reference: lvalues deduce T as an lvalue reference
            _bind(inner.name, LValueRef(t) if cat is ValueCategory.LVALUE else t, binding)
        else:
            _unify(inner, t, tparams, binding)
    else:
        while isinstance(pattern, TCv):
            pattern = pattern.inner
        _unify(pattern, strip_cv(decay(t)), tparams, binding)


def _bind(name: str, t: Type, binding: Binding) -> None:
    old = binding.get(name)
    if old is not None and old != t:
        raise DeductionFailure(
            f"conflicting deductions for '{name}' ('{spell(old)}' vs '{spell(t)}')"
        )
    binding[name] = t


def _unify(pattern: TypeExpr, t: Type, tparams: tuple[str, ...], binding: Binding) -> None:
    if not _mentions(pattern, tparams):
        return
    if isinstance(pattern, TName):
        if pattern.name in tparams and not pattern.args:
            _bind(pattern.name, t, binding)
            return
        if not (isinstance(t, Class) and t.name == pattern.name and len(t.args) == len(pattern.args)):
            raise DeductionFailure(
                f"'{spell(t)}' does not match '{pattern.name}<...>'"
            )
        for pa, ta in zip(pattern.args, t.args):
            _unify(pa, ta, tparams, binding)
        return
    if isinstance(pattern, TCv):
        tc, tv = cv_of(t)
        # missing qualifiers are fine: a qualification conversion adds them later
        _unify(pattern.inner, with_cv(t, tc and not pattern.const, tv and not pattern.volatile), tparams, binding)
        return
    if isinstance(pattern, TPointer):
        if not isinstance(t, Pointer):
            raise DeductionFailure(f"'{spell(t)}' is not a pointer")
        _unify(pattern.inner, t.pointee, tparams, binding)
        return
    if isinstance(pattern, TLRef):
        if not isinstance(t, LValueRef):
            raise DeductionFailure(f"'{spell(t)}' is not an lvalue reference")
        _unify(pattern.inner, t.referee, tparams, binding)
        return
    if isinstance(pattern, TRRef):
        if not isinstance(t, RValueRef):
            raise DeductionFailure(f"'{spell(t)}' is not an rvalue reference")
        _unify(pattern.inner, t.referee, tparams, binding)
        return
    if isinstance(pattern, TFunc):
        if not (isinstance(t, Function) and len(t.params) == len(pattern.params)):
            raise DeductionFailure(f"'{spell(t)}' does not match the function pattern")
        _unify(pattern.ret, t.ret, tparams, binding)
        for pp, tp in zip(pattern.params, t.params):
            _unify(pp, tp, tparams, binding)
        return
    raise DeductionFailure("unsupported pattern")


# -- substitution -------------------------------------------------------------


def substitute(te: TypeExpr, b: Binding, env: Env) -> SubstOutcome:
    scope = env.child()
    for name, t in b.items():
        scope.names[name] = TypeAlias(t)
    try:
        return Ok(resolve_type_expr(te, scope))
    except DeductoError as err:
        return SubstFailure(str(err))


# -- argument matching --------------------------------------------------------

EXACT = 0
CONVERSION = 1


def match_arg(arg: Type, param: Type) -> Optional[int]:
    """Rank of passing ``arg`` (decltype encoding) to ``param``; None if impossible."""
    t, cat = from_reference(arg)
    if isinstance(param, LValueRef):
        r = param.referee
        rc, rv = cv_of(r)
        binds_rvalues = rc and not rv
        if _same_unqualified(t, r) and _cv_subset(t, r):
            if cat is ValueCategory.LVALUE or binds_rvalues:
                return EXACT
            return None
        if binds_rvalues and _converts(t, r):
            return CONVERSION
        return None
    if isinstance(param, RValueRef):
        r = param.referee
        if _same_unqualified(t, r) and _cv_subset(t, r):
            return EXACT if cat.is_rvalue else None
        if _converts(t, r):
            return CONVERSION
        return None
    a = strip_cv(decay(t))
    p = strip_cv(param)
    if a == p:
        return EXACT
    if _qualification_ok(a, p):
        return EXACT
    if _converts(a, p):
        return CONVERSION
    return None


def _same_unqualified(a: Type, b: Type) -> bool:
    return strip_cv(a) == strip_cv(b)


def _cv_subset(a: Type, b: Type) -> bool:
    ac, av = cv_of(a)
    bc, bv = cv_of(b)
    return (not ac or bc) and (not av or bv)


def _qualification_ok(a: Type, p: Type) -> bool:
    return (
        isinstance(a, Pointer)
        and isinstance(p, Pointer)
        and _same_unqualified(a.pointee, p.pointee)
        and _cv_subset(a.pointee, p.pointee)
    )


def _converts(a: Type, p: Type) -> bool:
    a = strip_cv(a)
    p = strip_cv(p)
    if is_arithmetic(a) and is_arithmetic(p):
        return True
    if _qualification_ok(a, p):
        return True
    return (
        isinstance(a, Pointer)
        and isinstance(p, Pointer)
        and p.pointee == with_cv(Scalar(ScalarKind.VOID), *cv_of(p.pointee))
        and not isinstance(a.pointee, Function)
        and _cv_subset(a.pointee, p.pointee)
    )


def _score(params: tuple[Type, ...], args: list[Type]) -> tuple[Optional[int], str]:
    if len(params) != len(args):
        return None, f"expected {len(params)} argument(s), got {len(args)}"
    worst = EXACT
    for i, (a, p) in enumerate(zip(args, params)):
        rank = match_arg(a, p)
        if rank is None:
            t, cat = from_reference(a)
            return None, f"argument {i + 1}: no conversion from {cat.value} '{spell(t)}' to '{spell(p)}'"
        worst = max(worst, rank)
    return worst, ""


def select_signature(sigs: list[Function], args: list[Type]) -> Union[Function, str]:
    """Pick the single best-matching signature, or return a failure reason."""
    scored = []
    reasons = []
    for sig in sigs:
        score, reason = _score(sig.params, args)
        if score is None:
            reasons.append(f"'{spell(sig)}': {reason}")
        else:
            scored.append((score, sig))
    if not scored:
        return "no matching call: " + "; ".join(reasons)
    best = min(s for s, _ in scored)
    winners = [sig for s, sig in scored if s == best]
    if len(winners) > 1:
        return f"ambiguous call ({len(winners)} candidates)"
    return winners[0]


# -- overload resolution ------------------------------------------------------


def build_candidate(tf: TemplateFunction, arg_types: list[Type], env: Env) -> Union[Candidate, str]:
    """Deduce and substitute one template; returns a failure reason on SFINAE."""
    try:
        binding = deduce_template_args([te for _, te in tf.params], arg_types, tf.template_params)
    except DeductionFailure as err:
        return f"deduction failed: {err}"
    return substitute_candidate(tf, binding, env)


def substitute_candidate(tf: TemplateFunction, binding: Binding, env: Env) -> Union[Candidate, str]:
    """Substitute an explicit binding into parameters and return type (SFINAE step only)."""
    missing = [p for p in tf.template_params if p not in binding]
    if missing:
        return f"no binding for {', '.join(missing)}"
    declared = []
    for _, te in tf.params:
        out = substitute(te, binding, env)
        if isinstance(out, SubstFailure):
            return f"substitution failed: {out.reason}"
        declared.append(out.type)
    if tf.style == "trailing":
        scope = env.child()
        for (name, _), t in zip(tf.params, declared):
            if name is not None:
                scope.names[name] = Variable(t)
        outcome = substitute(tf.return_type, binding, scope)
    else:
        outcome = substitute(tf.return_type, binding, env)
    if isinstance(outcome, SubstFailure):
        return f"substitution failed: {outcome.reason}"
    sig = Function(tuple(adjust_param(t) for t in declared), outcome.type)
    return Candidate(tf, binding, sig, outcome)


def _describe(decl: Union[TemplateFunction, FunctionDecl], binding: Binding | None = None) -> str:
    if isinstance(decl, FunctionDecl):
        return f"'{spell(decl.signature)}'"
    if binding:
        inner = ", ".join(f"{k} = {spell(v)}" for k, v in binding.items())
        return f"template '{decl.name}' [{inner}]"
    return f"template '{decl.name}<{', '.join(decl.template_params)}>'"


def resolve_overload(name: str, arg_types: list[Type], env: Env) -> Candidate:
    entity = env.lookup(name)
    if entity is None:
        raise UnknownIdentifier(name)
    if not isinstance(entity, OverloadSet):
        raise NotCallable(f"'{name}' is not a function")
    viable: list[tuple[int, Candidate]] = []
    reasons: list[str] = []
    for decl in entity.members:
        if isinstance(decl, FunctionDecl):
            sig = decl.signature
            cand: Union[Candidate, str] = Candidate(decl, {}, sig, Ok(sig.ret))
        else:
            cand = build_candidate(decl, list(arg_types), env)
        if isinstance(cand, str):
            reasons.append(f"{_describe(decl)}: {cand}")
            continue
        score, reason = _score(cand.resolved_signature.params, list(arg_types))
        if score is None:
            reasons.append(f"{_describe(decl, cand.binding)}: {reason}")
            continue
        viable.append((score, cand))
    if not viable:
        raise NoViableOverload(name, reasons)
    best = min(s for s, _ in viable)
    winners = [c for s, c in viable if s == best]
    if len(winners) > 1:
        plain = [c for c in winners if not c.is_template]
        if len(plain) == 1:
            return plain[0]
        raise AmbiguousOverload(name, len(winners))
    return winners[0]
