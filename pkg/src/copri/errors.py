"""Exception hierarchy.

Compile-time problems (lexing, parsing, semantic checks) derive from
:class:`Diagnostic` and map to exit code 1.  Everything raised while a
program executes derives from :class:`RuntimeFault` and maps to exit code 2.
"""

from __future__ import annotations


class CopError(Exception):
    """Base class carrying an optional source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def located(self, line: int | None, column: int | None) -> "CopError":
        if self.line is None and line is not None:
            self.line = line
            self.column = column
        return self

    def format(self, filename: str = "<input>") -> str:
        if self.line is None:
            return f"{filename}: {self.message}"
        return f"{filename}:{self.line}:{self.column}: {self.message}"

    def __str__(self) -> str:
        return self.format()


class Diagnostic(CopError):
    pass


class LexError(Diagnostic):
    pass


class ParseError(Diagnostic):
    def __init__(self, line: int, column: int, expected: str, found: str):
        super().__init__(f"expected {expected}, found {found}", line, column)
        self.expected = expected
        self.found = found


class SemaError(Diagnostic):
    pass


class RuntimeFault(CopError):
    pass


class UndefinedNameError(RuntimeFault):
    pass


class UnknownMethodError(RuntimeFault):
    pass


class UnknownFieldError(RuntimeFault):
    pass


class ResolutionError(RuntimeFault):
    pass


class DeadObjectError(ResolutionError):
    pass


class MalformedReferenceError(RuntimeFault):
    pass


class StackOrderError(RuntimeFault):
    pass


class EmptyStackError(RuntimeFault):
    pass


class IllegalQualifierError(RuntimeFault):
    pass


class TypeOperatorError(RuntimeFault):
    pass


class TypeMismatchError(RuntimeFault):
    pass


class NullReferenceError(RuntimeFault):
    pass


class ArityError(RuntimeFault):
    pass


class PrintError(RuntimeFault):
    pass


class CastError(RuntimeFault):
    pass


class EmptyReferenceError(CastError):
    pass


class WideningUnavailableError(CastError):
    pass


class ConcatMismatchError(RuntimeFault):
    pass


class EvalError(RuntimeFault):
    """Ill-typed operands, division by zero and similar expression failures."""
