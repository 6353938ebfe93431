"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: input problems exit 2, resource caps exit 3.
"""

from __future__ import annotations


class TorsionKitError(Exception):
    """Base class for all library errors."""


class InputError(TorsionKitError):
    """Malformed or inconsistent input (exit code 2)."""


class ParseError(InputError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UndeclaredIdentifier(InputError):
    pass


class ContextMismatch(InputError):
    pass


class ExponentOverflow(InputError):
    pass


class CoefficientDivisionByZero(InputError):
    pass


class PreconditionError(InputError):
    """A construction or query violates a stated inequality."""


class ShapeError(InputError):
    """A polynomial does not have the shape an operation requires."""


class ResourceLimit(TorsionKitError):
    """A step or size cap was exceeded (exit code 3)."""


class StepLimitExceeded(ResourceLimit):
    pass


class TermLimitExceeded(ResourceLimit):
    pass
