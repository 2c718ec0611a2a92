"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument violates a documented precondition."""


class InvalidState(RuntimeError):
    """An operation was invoked without the state it requires."""


class FormatError(ValueError):
    """A file does not conform to the binary array format.

    ``offset`` is the byte position at which the file stopped making sense.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
