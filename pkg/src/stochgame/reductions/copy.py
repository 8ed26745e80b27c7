"""Player-copy reduction from simultaneous games to games where each player controls one state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import WrongMode
from ..game import GameSpec, Strategy

PLACEHOLDER = "_"


@dataclass(frozen=True)
class CopyMap:
    """Bijection between original coordinates (i, s) and copy-players."""

    to_copy: dict[tuple[int, int], int]
    from_copy: dict[int, tuple[int, int]]

    def strategy_to_copy(self, strategy: Strategy, copy: GameSpec) -> Strategy:
        """Same per-state policies, re-keyed to copy-players; placeholders play their only action."""
        policies = {}
        for k in range(copy.n):
            i, s = self.from_copy[k]
            if (i, s) in strategy:
                policies[(k, s)] = strategy[(i, s)]
            else:
                policies[(k, s)] = np.ones(1)
        return Strategy(policies)

    def strategy_from_copy(self, copy_strategy: Strategy, spec: GameSpec) -> Strategy:
        return Strategy({(i, s): copy_strategy[(self.to_copy[(i, s)], s)] for i, s in spec.coords})


def simsg_to_ossg(spec: GameSpec) -> tuple[GameSpec, CopyMap]:
    """One copy-player per (player i, state s), controlling only s with i's actions.

    Copy-player (i, s) receives player i's rewards everywhere.  A copy of a
    player with no actions at s keeps a single placeholder action there, so
    it still controls exactly one state and the joint-action tables of s
    gain only size-one axes.  Copy-players are ordered state-major.
    """
    if spec.discount.mode != "discounted":
        raise WrongMode("the copy reduction expects a discounted game")
    S = spec.num_states
    pairs = [(i, s) for s in range(S) for i in range(spec.n)]
    to_copy = {p: k for k, p in enumerate(pairs)}
    from_copy = {k: p for k, p in enumerate(pairs)}
    actions = []
    for i, s in pairs:
        row = [[] for _ in range(S)]
        row[s] = list(spec.actions[i][s]) or [PLACEHOLDER]
        actions.append(row)
    rewards = [spec.rewards[s][[i for i, _ in pairs]] for s in range(S)]
    copy = GameSpec(len(pairs), spec.states, actions, spec.transitions, rewards, spec.discount)
    return copy, CopyMap(to_copy, from_copy)
