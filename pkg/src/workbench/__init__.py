"""Executable checks of diagonal arguments: Cantor's schema and its instances."""

from .errors import ConstructionError, ContractError, ParseError, WorkbenchError
from .outcome import BUDGET_EXCEEDED, UNRESOLVED, Outcome

__version__ = "0.1.0"

__all__ = [
    "BUDGET_EXCEEDED",
    "UNRESOLVED",
    "ConstructionError",
    "ContractError",
    "Outcome",
    "ParseError",
    "WorkbenchError",
]
