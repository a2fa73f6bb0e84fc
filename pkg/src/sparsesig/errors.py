"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument is outside the documented domain of an operation."""


class NumericFailure(ArithmeticError):
    """A computation is numerically undefined (rank deficiency, zero norm, ...)."""


class ParseError(ValueError):
    """An input file is malformed.

    Carries the byte offset of the first offending content when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset
