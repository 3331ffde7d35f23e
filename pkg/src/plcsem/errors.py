"""Exception hierarchy shared by every language front end and semantics."""

from __future__ import annotations


class PlcError(Exception):
    """Base class for all errors raised by plcsem.

    ``line`` is set for errors that can be attributed to a source line.
    """

    def __init__(self, message: str = "", line: int | None = None):
        self.message = message
        self.line = line
        super().__init__(message)

    def __str__(self) -> str:
        name = type(self).__name__
        where = f" at line {self.line}" if self.line is not None else ""
        return f"{name}{where}: {self.message}" if self.message else f"{name}{where}"


class PlcSyntaxError(PlcError):
    pass


class UnknownOpcode(PlcSyntaxError):
    pass


class UnboundLabel(PlcSyntaxError):
    pass


class UnbalancedParen(PlcSyntaxError):
    pass


class DuplicateDeclaration(PlcError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        super().__init__(f"variable {name!r} declared more than once", line)


class UndeclaredVariable(PlcError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        super().__init__(f"variable {name!r} is not declared", line)


class PlcTypeError(PlcError):
    pass


class TypeMismatch(PlcTypeError):
    def __init__(self, name: str, detail: str = "", line: int | None = None):
        self.name = name
        super().__init__(f"{name}: {detail}" if detail else name, line)


class NonBooleanContact(PlcTypeError):
    pass


class InvalidCoil(PlcError):
    pass


class DivisionByZero(PlcError):
    pass


class FuelExhausted(PlcError):
    def __init__(self, fuel: int):
        self.fuel = fuel
        super().__init__(f"no halt within {fuel} steps")


class NoInitialStep(PlcError):
    pass


class MultipleInitialSteps(PlcError):
    pass


class DanglingReference(PlcError):
    def __init__(self, ref: str, detail: str = ""):
        self.ref = ref
        super().__init__(f"{ref!r} {detail}".strip())


class DuplicateId(PlcError):
    pass


class AmbiguousPriority(PlcError):
    pass


class DeclarationMismatch(PlcError):
    pass


class InputMismatch(PlcError):
    """The input assignment of a scan does not cover exactly the INPUT variables."""


class DomainError(PlcError):
    """The requested checking mode cannot handle the system's variable types."""


class StateExplosion(PlcError):
    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f"visited-state count exceeded {limit}")
