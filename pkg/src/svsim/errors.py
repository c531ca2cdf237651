"""Exception vocabulary shared across the package.

The CLI maps these onto process exit codes: parse and validation problems
exit 2, capacity problems exit 3. Keeping the classes narrow lets library
callers tell "your input is malformed" apart from "this does not fit".
"""


class SvsimError(Exception):
    """Base class for all svsim errors."""


class ValidationError(SvsimError):
    """An argument violates a documented precondition or invariant."""


class ParseError(SvsimError):
    """A circuit file could not be parsed. Carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(SvsimError):
    """The requested size exceeds a configured or physical limit."""


class ContractViolation(SvsimError):
    """An operation was invoked in a state its contract forbids."""
