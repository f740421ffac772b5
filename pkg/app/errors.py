"""
Exception hierarchy shared by services and the command line
"""
from typing import Any, Optional


class StabringError(Exception):
    """Base class for all errors raised by the library"""
    exit_code = 1


class UsageError(StabringError):
    """Bad flags, malformed graph files or vectors"""
    exit_code = 64


class ResourceGuardError(StabringError):
    """An enumeration box exceeds the configured cell limit"""
    exit_code = 2

    def __init__(self, cells: int, limit: int, what: str = "enumeration"):
        super().__init__(f"{what} needs {cells} candidate cells, limit is {limit}")
        self.cells = cells
        self.limit = limit


class VerificationError(StabringError):
    """
    A mathematical check failed.

    The counterexample is kept JSON-serialisable so the CLI can print it.
    """
    exit_code = 1

    def __init__(self, message: str, counterexample: Optional[Any] = None):
        super().__init__(message)
        self.counterexample = counterexample
