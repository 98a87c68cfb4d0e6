"""Exception hierarchy shared across the language layers.

Every error raised by this package derives from LangstackError. Errors that
point at a place in some input carry ``position`` (a 0-based offset into the
token or character sequence) and, where line/column information is available,
``line`` and ``col`` (both 1-based). ``stage`` names the pipeline stage that
raised the error ("lex", "parse", "grammar", "compile", "eval", ...) so
drivers can map errors to exit codes without guessing.
"""


class LangstackError(Exception):
    """Base class for all errors raised by this package."""

    stage: str | None = None


class PositionedError(LangstackError):
    """An error anchored to a position in some source text or token stream."""

    def __init__(self, message: str, position: int | None = None,
                 line: int | None = None, col: int | None = None):
        super().__init__(message)
        self.position = position
        self.line = line
        self.col = col

    def __str__(self) -> str:
        msg = super().__str__()
        if self.line is not None and self.col is not None:
            return f"{self.line}:{self.col}: {msg}"
        if self.position is not None:
            return f"at {self.position}: {msg}"
        return msg


class DivisionByZeroError(LangstackError):
    """Exact division by zero, raised at whatever stage performs the division."""

    def __init__(self, message: str = "division by zero", rendered: str | None = None):
        if rendered is not None:
            message = f"{message} in {rendered}"
        super().__init__(message)
        self.rendered = rendered
