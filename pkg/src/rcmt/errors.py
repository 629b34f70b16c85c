class RcmtError(ValueError):
    """Base class for all input errors raised by this package."""


class GraphError(RcmtError):
    """A molecular graph invariant was violated."""


class SdfParseError(RcmtError):
    """Malformed SDF input; carries the 0-based record index and 1-based line."""

    def __init__(self, message: str, record: int, line: int):
        super().__init__(f"record {record}, line {line}: {message}")
        self.reason = message
        self.record = record
        self.line = line


class DecodeError(RcmtError):
    """Malformed compact text; ``column`` is 1-based within the line."""

    def __init__(self, message: str, column: int, line: int | None = None):
        where = f"column {column}" if line is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.reason = message
        self.column = column
        self.line = line
