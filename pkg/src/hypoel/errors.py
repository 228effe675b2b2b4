"""Exception types shared across the package."""


class HypoelError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(HypoelError):
    """An argument's dimension does not match the object it is used with."""


class DomainError(HypoelError):
    """A point or box falls outside the region where an operation is defined."""


class ParseError(HypoelError):
    """A symbol, operator, sequence table, or config document is malformed."""


class PreconditionError(HypoelError):
    """A documented precondition of a verification run failed.

    `name` identifies which precondition, so callers (and the CLI) can
    report it without parsing the message.
    """

    def __init__(self, name: str, message: str):
        super().__init__(f"precondition '{name}' failed: {message}")
        self.name = name
