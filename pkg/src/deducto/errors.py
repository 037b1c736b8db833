"""Exception hierarchy shared by every part of the engine."""

from __future__ import annotations


class DeductoError(Exception):
    """Base class for all engine errors."""


class UnknownIdentifier(DeductoError):
    def __init__(self, name: str):
        super().__init__(f"use of undeclared identifier '{name}'")
        self.name = name


class NotAType(DeductoError):
    def __init__(self, name: str):
        super().__init__(f"'{name}' does not name a type")
        self.name = name


class NoSuchField(DeductoError):
    pass


class NotAPointer(DeductoError):
    pass


class NotArithmetic(DeductoError):
    pass


class InvalidOperand(DeductoError):
    pass


class NotCallable(DeductoError):
    pass


class CannotBindNonConstRef(DeductoError):
    pass


class DeclvalInEvaluatedContext(DeductoError):
    def __init__(self) -> None:
        super().__init__("declval may only be used in an unevaluated operand")


class NonEvaluableExpr(DeductoError):
    pass


class UnknownTrait(DeductoError):
    def __init__(self, name: str):
        super().__init__(f"unknown trait '{name}'")
        self.name = name


class Redeclaration(DeductoError):
    def __init__(self, name: str):
        super().__init__(f"redeclaration of '{name}'")
        self.name = name


class InvalidDeclaration(DeductoError):
    pass


class SubstitutionFailure(DeductoError):
    """Raised while resolving a type-expression whose substitution fails.

    Inside template substitution this is caught and turned into a
    ``SubstFailure`` value; anywhere else it is a hard error.
    """


class DeductionFailure(DeductoError):
    pass


class NonDeducibleTemplate(DeductoError):
    pass


class NoViableOverload(DeductoError):
    def __init__(self, name: str, reasons: list[str]):
        detail = "; ".join(reasons) if reasons else "no declarations"
        super().__init__(f"no viable overload for '{name}': {detail}")
        self.name = name
        self.reasons = reasons


class AmbiguousOverload(DeductoError):
    def __init__(self, name: str, count: int):
        super().__init__(f"call to '{name}' is ambiguous ({count} viable candidates)")
        self.name = name
        self.count = count


class UnsupportedPattern(DeductoError):
    pass


class DslSyntaxError(DeductoError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class CompilerUnavailable(DeductoError):
    pass
