"""Exception types shared across the package."""

from __future__ import annotations


class GameError(Exception):
    """Base class for all package errors."""


class InvalidGame(GameError):
    """The game description violates a structural invariant."""


class DimensionMismatch(GameError):
    """An array or strategy does not match the game's shape."""


class PlayerOutOfRange(GameError):
    """A player index is not in ``range(n)``."""


class WrongMode(GameError):
    """The operation does not support the game's discount mode."""


class WrongClass(GameError):
    """The game is outside the class an algorithm requires."""


class NotTurnBased(WrongClass):
    """The algorithm requires a turn-based game."""


class SingularSystem(GameError):
    """A linear evaluation system could not be solved accurately."""


class NonConvergent(GameError):
    """An absorbing game's transient block is not contracting."""


class NotUnichain(GameError):
    """The induced chain has more than one recurrent class."""


class BudgetExceeded(GameError):
    """An enumeration would exceed its configured candidate budget."""

    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} candidates, budget is {budget}")
        self.required = required
        self.budget = budget


class HorizonTooShort(GameError):
    """The non-stationary horizon leaves a tail larger than eps/2."""


class NotPure(GameError):
    """A pure strategy was required."""


class DegenerateSegment(GameError):
    """The endpoints of a policy segment have (numerically) equal utility.

    ``report`` holds the probe's monotonicity information when available.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class InvalidCircuit(GameError):
    """The circuit description is malformed."""


class GraphTooSmall(GameError):
    """The graph has fewer vertices than the construction needs."""


class BadDiscountPair(GameError):
    """The requested discount factor does not exceed the original one."""


class NoConvergence(GameError):
    """An iterative heuristic stopped at its iteration cap."""


class LpUnbounded(GameError):
    """Internal error: the phase-1 program reported unboundedness."""
