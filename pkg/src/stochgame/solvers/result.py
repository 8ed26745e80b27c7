"""Common result type for equilibrium solvers."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

from ..certification import NeCertificate
from ..errors import NotTurnBased, WrongMode
from ..game import GameSpec, NonStationaryStrategy, Strategy


@dataclass
class SolveResult:
    """Solver output; ``certificate`` is always recomputed by the certification module."""

    strategy: Strategy | NonStationaryStrategy | None
    certificate: NeCertificate | None
    iterations: int
    wall_time: float
    method: str
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.certificate is not None and self.certificate.verdict


def require_discounted(spec: GameSpec) -> None:
    if spec.discount.mode != "discounted":
        raise WrongMode("solver requires a discounted game")


def require_tbsg(spec: GameSpec) -> None:
    if any(len(c) != 1 for c in spec.controllers):
        raise NotTurnBased("solver requires exactly one controller per state")


def worker_count(workers: int | None) -> int:
    """Explicit worker count, else SG_THREADS, else 1."""
    if workers is None:
        try:
            workers = int(os.environ.get("SG_THREADS", "1"))
        except ValueError:
            workers = 1
    return max(1, workers)
