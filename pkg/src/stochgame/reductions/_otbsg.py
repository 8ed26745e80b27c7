"""Builder for games where every state is its own player's only state."""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from ..game import Discount, GameSpec


class OtbsgBuilder:
    """States double as players; player k (named str(k + 1)) controls state k only.

    Rewards accumulate, so gadgets that share an input state can each add
    their entries independently.
    """

    def __init__(self):
        self.states: list[str] = []
        self._index: dict[str, int] = {}
        self._actions: dict[str, list[str]] = {}
        self._moves: dict[str, list[dict[str, float]]] = {}
        self._rew: dict[tuple[str, str, int], float] = defaultdict(float)

    def add(self, name: str, moves: list[dict[str, float]] | None = None, action_names: list[str] | None = None) -> str:
        """Add a state; ``moves[a]`` is the successor distribution of action a (set later if None)."""
        if name in self._index:
            raise ValueError(f"duplicate state {name!r}")
        self._index[name] = len(self.states)
        self.states.append(name)
        if moves is not None:
            self.set_moves(name, moves, action_names)
        return name

    def set_moves(self, name: str, moves: list[dict[str, float]], action_names: list[str] | None = None) -> None:
        self._moves[name] = [dict(m) for m in moves]
        self._actions[name] = list(action_names) if action_names else [f"a{k + 1}" for k in range(len(moves))]

    def has_moves(self, name: str) -> bool:
        return name in self._moves

    def add_reward(self, player: str, state: str, action: int, r: float) -> None:
        self._rew[(player, state, action)] += r

    def chain(self, prefix: str, length: int, target: str) -> str:
        """Path of ``length`` edges ending at ``target`` through length-1 fresh dummies; returns its head."""
        head = target
        for k in range(length - 1, 0, -1):
            name = self.add(f"{prefix}{k}", [{head: 1.0}], ["next"])
            head = name
        return head

    def build(self, gamma: float) -> GameSpec:
        S = len(self.states)
        actions, trans, rews = [], [], []
        for k, s in enumerate(self.states):
            row = [[] for _ in range(S)]
            row[k] = self._actions[s]
            actions.append(row)
            t = np.zeros((len(self._moves[s]), S))
            for a, dist in enumerate(self._moves[s]):
                for target, p in dist.items():
                    t[a, self._index[target]] += p
            trans.append(t)
            rews.append(np.zeros((S, len(self._moves[s]))))
        for (player, state, a), r in self._rew.items():
            rews[self._index[state]][self._index[player], a] += r
        return GameSpec(S, self.states, actions, trans, rews, Discount.discounted(gamma))
