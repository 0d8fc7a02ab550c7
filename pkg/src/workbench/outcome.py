"""Markers for results that are neither a value nor an error."""

from __future__ import annotations

import enum


class Outcome(enum.Enum):
    BUDGET_EXCEEDED = "budget_exceeded"
    UNRESOLVED = "unresolved"

    def __repr__(self) -> str:
        return self.value


BUDGET_EXCEEDED = Outcome.BUDGET_EXCEEDED
UNRESOLVED = Outcome.UNRESOLVED
