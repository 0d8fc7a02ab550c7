"""Exception hierarchy shared by every workbench module."""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class ConstructionError(WorkbenchError, ValueError):
    """A value could not be built because its tables or fields are malformed."""


class ContractError(WorkbenchError, ValueError):
    """An operation was called outside its precondition."""


class ParseError(WorkbenchError, ValueError):
    """Text input did not match the expected grammar.

    ``position`` is a 0-based character offset (or line number for
    line-oriented formats, see ``line``).
    """

    def __init__(self, message: str, position: int | None = None, line: int | None = None):
        self.position = position
        self.line = line
        where = ""
        if line is not None:
            where = f" (line {line})"
        elif position is not None:
            where = f" (at position {position})"
        super().__init__(message + where)
