"""Exception types shared across the toolkit."""


class SilverforgeError(Exception):
    """Base class for all toolkit errors."""


class DatasetError(SilverforgeError):
    """Raised when a dataset file or record violates the format contract.

    Carries the offending path and 1-based line number when known.
    """

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = path if line is None else f"{path}:{line}"
            prefix += ": "
        super().__init__(prefix + message)


class ScorerProtocolError(SilverforgeError):
    """Raised when a pair scorer or embedder violates its wire contract."""


class ContaminationError(SilverforgeError):
    """Raised when silver pairs collide with evaluation splits."""
