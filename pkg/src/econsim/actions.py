"""Atomic agent actions.

One dataclass per activity kind; payload fields are validated structurally
here and semantically by the pre-execution validator.  Durations are
in-game seconds.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Eat:
    item: str
    quantity: int


@dataclass(frozen=True, slots=True)
class Sleep:
    duration: float


@dataclass(frozen=True, slots=True)
class SeeDoctor:
    pass


@dataclass(frozen=True, slots=True)
class Study:
    kind: str          # paid_learning | reading | self_study
    duration: float


@dataclass(frozen=True, slots=True)
class Work:
    duration: float


@dataclass(frozen=True, slots=True)
class Craft:
    commodity: str
    quantity: int


@dataclass(frozen=True, slots=True)
class Buy:
    commodity: str
    quantity: int


@dataclass(frozen=True, slots=True)
class Sell:
    commodity: str
    quantity: int


@dataclass(frozen=True, slots=True)
class Idle:
    pass


Action = Eat | Sleep | SeeDoctor | Study | Work | Craft | Buy | Sell | Idle


def describe(action: Action) -> str:
    """Compact human-readable form used in logs and failure contexts."""
    if isinstance(action, Eat):
        return f"eat {action.item} x{action.quantity}"
    if isinstance(action, Sleep):
        return f"sleep {action.duration:g}s"
    if isinstance(action, SeeDoctor):
        return "see doctor"
    if isinstance(action, Study):
        return f"study({action.kind}) {action.duration:g}s"
    if isinstance(action, Work):
        return f"work {action.duration:g}s"
    if isinstance(action, Craft):
        return f"craft {action.commodity} x{action.quantity}"
    if isinstance(action, Buy):
        return f"buy {action.commodity} x{action.quantity}"
    if isinstance(action, Sell):
        return f"sell {action.commodity} x{action.quantity}"
    return "idle"
