"""Game model: specifications, classification and strategy algebra.

Players and states are dense integer indices internally.  Human-readable
identifiers (strings) are kept alongside so reports can be written back in
the caller's vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidGame, NotPure, PlayerOutOfRange

SIMPLEX_TOL = 1e-12
RENORMALIZE_TOL = 1e-9

Coord = tuple[int, int]


@dataclass(frozen=True)
class Discount:
    """Discount mode of a game: discounted, absorbing (total reward) or average reward."""

    mode: str
    gamma: float | None = None
    absorbing_state: str | None = None

    @classmethod
    def discounted(cls, gamma: float) -> "Discount":
        return cls("discounted", float(gamma))

    @classmethod
    def absorbing(cls, state: str) -> "Discount":
        return cls("absorbing", None, state)

    @classmethod
    def average(cls) -> "Discount":
        return cls("average")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class GameSpec:
    """An n-player stochastic game with dense tables over (state, joint action).

    ``actions[i][s]`` is the (possibly empty) tuple of action names of player
    ``i`` at state ``s``.  The controllers of ``s`` are the players with a
    non-empty action list there, in increasing index order, and joint actions
    are the C-order cartesian product of their action lists.
    ``transitions[s]`` has shape ``(J_s, |S|)`` and ``rewards[s]`` has shape
    ``(n, J_s)``.
    """

    def __init__(
        self,
        n: int,
        states: Sequence[str],
        actions: Sequence[Sequence[Sequence[str]]],
        transitions: Sequence[np.ndarray],
        rewards: Sequence[np.ndarray],
        discount: Discount,
        player_names: Sequence[str] | None = None,
    ):
        self.n = int(n)
        self.states = tuple(str(s) for s in states)
        S = len(self.states)
        if len(set(self.states)) != S:
            raise InvalidGame("duplicate state identifiers")
        if len(actions) != self.n or any(len(row) != S for row in actions):
            raise DimensionMismatch("actions must be indexed [player][state]")
        self.actions = tuple(tuple(tuple(str(a) for a in acts) for acts in row) for row in actions)
        self.player_names = tuple(player_names) if player_names is not None else tuple(
            str(i + 1) for i in range(self.n)
        )
        if len(self.player_names) != self.n:
            raise DimensionMismatch("player_names has wrong length")
        self.controllers = tuple(
            tuple(i for i in range(self.n) if self.actions[i][s]) for s in range(S)
        )
        self.joint_shapes = tuple(
            tuple(len(self.actions[i][s]) for i in self.controllers[s]) for s in range(S)
        )
        if len(transitions) != S or len(rewards) != S:
            raise DimensionMismatch("one transition and reward table per state is required")
        trans, rews = [], []
        for s in range(S):
            J = int(np.prod(self.joint_shapes[s], dtype=int))
            t = np.asarray(transitions[s], dtype=float)
            r = np.asarray(rewards[s], dtype=float)
            if t.shape != (J, S):
                raise DimensionMismatch(f"transitions at state {self.states[s]!r} must have shape {(J, S)}")
            if r.shape != (self.n, J):
                raise DimensionMismatch(f"rewards at state {self.states[s]!r} must have shape {(self.n, J)}")
            trans.append(_readonly(t))
            rews.append(_readonly(r))
        self.transitions = tuple(trans)
        self.rewards = tuple(rews)
        self.discount = discount
        self._controlled = tuple(
            tuple(s for s in range(S) if self.actions[i][s]) for i in range(self.n)
        )
        self._state_index = {name: k for k, name in enumerate(self.states)}
        self._player_index = {name: k for k, name in enumerate(self.player_names)}

    # -- shape helpers -------------------------------------------------

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def gamma(self) -> float:
        """Discount factor; 1.0 for absorbing games."""
        if self.discount.mode == "discounted":
            return float(self.discount.gamma)
        if self.discount.mode == "absorbing":
            return 1.0
        raise InvalidGame("average-reward games have no discount factor")

    def state_index(self, name: str) -> int:
        try:
            return self._state_index[name]
        except KeyError:
            raise InvalidGame(f"unknown state {name!r}") from None

    def player_index(self, name: str) -> int:
        try:
            return self._player_index[name]
        except KeyError:
            raise InvalidGame(f"unknown player {name!r}") from None

    def controlled_states(self, i: int) -> tuple[int, ...]:
        if not 0 <= i < self.n:
            raise PlayerOutOfRange(f"player {i} not in range({self.n})")
        return self._controlled[i]

    def own_state(self, i: int) -> int:
        """The single state controlled by ``i`` (O-games only)."""
        states = self.controlled_states(i)
        if len(states) != 1:
            raise InvalidGame(f"player {self.player_names[i]} controls {len(states)} states")
        return states[0]

    @property
    def coords(self) -> tuple[Coord, ...]:
        """All (player, state) decision points, player-major."""
        return tuple((i, s) for i in range(self.n) for s in self._controlled[i])

    def num_joint(self, s: int) -> int:
        return int(np.prod(self.joint_shapes[s], dtype=int))

    def joint_actions(self, s: int) -> Iterator[tuple[int, ...]]:
        """Joint actions at ``s`` as tuples of per-controller indices, in storage order."""
        return product(*(range(k) for k in self.joint_shapes[s]))

    def joint_index(self, s: int, choice: Mapping[int, int]) -> int:
        """Flat index of the joint action where controller ``i`` plays ``choice[i]``."""
        idx = tuple(choice[i] for i in self.controllers[s])
        if not idx:
            return 0
        return int(np.ravel_multi_index(idx, self.joint_shapes[s]))

    @property
    def total_actions(self) -> int:
        return sum(len(self.actions[i][s]) for i, s in self.coords)

    @property
    def max_player_actions(self) -> int:
        """max_i |A_i| where A_i collects the player's actions over all its states."""
        return max(sum(len(self.actions[i][s]) for s in self._controlled[i]) for i in range(self.n))

    @property
    def max_state_actions(self) -> int:
        return max(len(self.actions[i][s]) for i, s in self.coords)

    def replace(self, **changes) -> "GameSpec":
        """Copy with some constructor arguments replaced."""
        args = dict(
            n=self.n,
            states=self.states,
            actions=self.actions,
            transitions=self.transitions,
            rewards=self.rewards,
            discount=self.discount,
            player_names=self.player_names,
        )
        args.update(changes)
        return GameSpec(**args)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GameSpec):
            return NotImplemented
        return (
            self.n == other.n
            and self.states == other.states
            and self.actions == other.actions
            and self.player_names == other.player_names
            and self.discount == other.discount
            and all(np.array_equal(a, b) for a, b in zip(self.transitions, other.transitions))
            and all(np.array_equal(a, b) for a, b in zip(self.rewards, other.rewards))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"GameSpec(n={self.n}, states={len(self.states)}, discount={self.discount})"


class GameBuilder:
    """Incremental construction of a :class:`GameSpec` from named pieces.

    Unset transitions default to a self-loop and unset rewards to zero, which
    keeps the gadget and graph constructions short.
    """

    def __init__(self, n: int = 0):
        self.n = n
        self.states: list[str] = []
        self._actions: dict[tuple[int, str], list[str]] = {}
        self._trans: dict[tuple[str, tuple[int, ...]], dict[str, float]] = {}
        self._rew: dict[tuple[int, str, tuple[int, ...]], float] = {}

    def add_player(self) -> int:
        self.n += 1
        return self.n - 1

    def add_state(self, name: str) -> str:
        self.states.append(name)
        return name

    def set_actions(self, player: int, state: str, names: Sequence[str]) -> None:
        self._actions[(player, state)] = list(names)

    def set_transition(self, state: str, joint: Sequence[int], dist: Mapping[str, float]) -> None:
        self._trans[(state, tuple(joint))] = dict(dist)

    def set_reward(self, player: int, state: str, joint: Sequence[int], r: float) -> None:
        self._rew[(player, state, tuple(joint))] = float(r)

    def build(self, discount: Discount) -> GameSpec:
        S = len(self.states)
        index = {name: k for k, name in enumerate(self.states)}
        actions = [[self._actions.get((i, s), []) for s in self.states] for i in range(self.n)]
        trans, rews = [], []
        for k, s in enumerate(self.states):
            ctrl = [i for i in range(self.n) if actions[i][k]]
            shape = tuple(len(actions[i][k]) for i in ctrl)
            J = int(np.prod(shape, dtype=int))
            t = np.zeros((J, S))
            r = np.zeros((self.n, J))
            for j, joint in enumerate(product(*(range(m) for m in shape))):
                dist = self._trans.get((s, joint), {s: 1.0})
                for target, p in dist.items():
                    t[j, index[target]] += p
                for i in range(self.n):
                    r[i, j] = self._rew.get((i, s, joint), 0.0)
            trans.append(t)
            rews.append(r)
        return GameSpec(self.n, self.states, actions, trans, rews, discount)


# -- validation and classification ---------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()


def validate_game(spec: GameSpec) -> ValidationReport:
    """Check every GameSpec invariant; failures are reported, not raised."""
    problems: list[str] = []
    for i in range(spec.n):
        if not spec.controlled_states(i):
            problems.append(f"player {spec.player_names[i]} controls no state")
    for s, name in enumerate(spec.states):
        if not spec.controllers[s]:
            problems.append(f"state {name} has no controller")
        t = spec.transitions[s]
        if np.any(t < 0) or np.any(np.abs(t.sum(axis=1) - 1.0) > SIMPLEX_TOL):
            problems.append(f"transition not stochastic at state {name}")
        if np.any(np.abs(spec.rewards[s]) > 1.0) or not np.all(np.isfinite(spec.rewards[s])):
            problems.append(f"reward out of range at state {name}")
    d = spec.discount
    if d.mode == "discounted":
        if d.gamma is None or not 0.0 < d.gamma < 1.0:
            problems.append("discount factor must lie in (0, 1)")
    elif d.mode == "absorbing":
        if d.absorbing_state not in spec.states:
            problems.append("absorbing state missing or unknown")
    elif d.mode != "average":
        problems.append(f"unknown discount mode {d.mode!r}")
    return ValidationReport(not problems, tuple(problems))


def require_valid(spec: GameSpec) -> None:
    report = validate_game(spec)
    if not report.ok:
        raise InvalidGame("; ".join(report.violations))


@dataclass(frozen=True)
class GameClass:
    is_tbsg: bool
    is_ossg: bool
    is_otbsg: bool
    is_locreward: bool
    reward_sign: str
    deterministic_transitions: bool
    action_independent_rewards: bool


def _sign(values: Iterable[float]) -> str:
    vals = np.fromiter(values, dtype=float)
    if np.all(vals >= 0):
        return "NonNegative"
    if np.all(vals <= 0):
        return "NonPositive"
    return "Mixed"


def classify_game(spec: GameSpec) -> GameClass:
    """Recompute the subclass flags from the raw tables."""
    require_valid(spec)
    S = spec.num_states
    is_tbsg = all(len(c) == 1 for c in spec.controllers)
    is_ossg = all(len(spec.controlled_states(i)) == 1 for i in range(spec.n))
    locreward = is_ossg and all(
        not np.any(spec.rewards[s][i]) for i in range(spec.n) for s in range(S) if s != spec.own_state(i)
    )
    if locreward:
        sign = _sign(v for i in range(spec.n) for v in spec.rewards[spec.own_state(i)][i])
    else:
        sign = _sign(v for s in range(S) for v in spec.rewards[s].ravel())
    deterministic = all(np.all((t == 0.0) | (t == 1.0)) for t in spec.transitions)
    action_indep = all(np.all(r == r[:, :1]) for r in spec.rewards)
    return GameClass(
        is_tbsg=is_tbsg,
        is_ossg=is_ossg,
        is_otbsg=is_tbsg and is_ossg,
        is_locreward=locreward,
        reward_sign=sign,
        deterministic_transitions=deterministic,
        action_independent_rewards=action_indep,
    )


# -- strategies ------------------------------------------------------------


class Strategy:
    """Stationary strategy: one distribution per (player, controlled state)."""

    __slots__ = ("_p",)

    def __init__(self, policies: Mapping[Coord, Sequence[float] | np.ndarray]):
        self._p = {tuple(k): _readonly(v) for k, v in policies.items()}

    def __getitem__(self, key: Coord) -> np.ndarray:
        return self._p[key]

    def __contains__(self, key: object) -> bool:
        return key in self._p

    def keys(self):
        return self._p.keys()

    def items(self):
        return self._p.items()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Strategy):
            return NotImplemented
        return self._p.keys() == other._p.keys() and all(
            np.array_equal(v, other._p[k]) for k, v in self._p.items()
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {np.round(v, 4).tolist()}" for k, v in sorted(self._p.items()))
        return f"Strategy({body})"

    @classmethod
    def uniform(cls, spec: GameSpec) -> "Strategy":
        return cls({(i, s): np.full(len(spec.actions[i][s]), 1.0 / len(spec.actions[i][s])) for i, s in spec.coords})

    @classmethod
    def pure(cls, spec: GameSpec, choice: Mapping[Coord, int] | None = None) -> "Strategy":
        """Pure strategy; coordinates missing from ``choice`` take their first action."""
        choice = choice or {}
        policies = {}
        for i, s in spec.coords:
            e = np.zeros(len(spec.actions[i][s]))
            e[choice.get((i, s), 0)] = 1.0
            policies[(i, s)] = e
        return cls(policies)

    @classmethod
    def from_vector(cls, spec: GameSpec, vec: np.ndarray) -> "Strategy":
        vec = np.asarray(vec, dtype=float)
        out, k = {}, 0
        for i, s in spec.coords:
            m = len(spec.actions[i][s])
            out[(i, s)] = vec[k : k + m]
            k += m
        if k != vec.size:
            raise DimensionMismatch("strategy vector has the wrong length")
        return cls(out)

    def to_vector(self, spec: GameSpec) -> np.ndarray:
        return np.concatenate([self._p[c] for c in spec.coords])

    def with_policy(self, i: int, s: int, dist: Sequence[float] | np.ndarray) -> "Strategy":
        p = dict(self._p)
        p[(i, s)] = np.asarray(dist, dtype=float)
        return Strategy(p)

    def with_player(self, i: int, policy: Mapping[int, Sequence[float] | np.ndarray]) -> "Strategy":
        p = dict(self._p)
        for s, dist in policy.items():
            p[(i, s)] = np.asarray(dist, dtype=float)
        return Strategy(p)

    def player_policy(self, i: int) -> dict[int, np.ndarray]:
        return {s: v for (j, s), v in self._p.items() if j == i}

    def is_pure(self) -> bool:
        return all(np.count_nonzero(v) == 1 and v.max() == 1.0 for v in self._p.values())

    def pure_choice(self) -> dict[Coord, int]:
        """Chosen action index at every coordinate; raises NotPure otherwise."""
        if not self.is_pure():
            raise NotPure("strategy is not pure")
        return {k: int(np.argmax(v)) for k, v in self._p.items()}

    def check(self, spec: GameSpec) -> None:
        """Raise DimensionMismatch unless the strategy is a valid strategy for ``spec``."""
        if set(self._p) != set(spec.coords):
            raise DimensionMismatch("strategy coordinates do not match the game's controlled states")
        for (i, s), v in self._p.items():
            if v.shape != (len(spec.actions[i][s]),):
                raise DimensionMismatch(f"policy at player {i}, state {s} has the wrong length")
            if np.any(v < 0) or np.any(v > 1) or abs(v.sum() - 1.0) > SIMPLEX_TOL:
                raise DimensionMismatch(f"policy at player {i}, state {s} is not a distribution")


@dataclass(frozen=True)
class NonStationaryStrategy:
    """Time-indexed strategy: ``steps[h-1]`` is played at time h, ``tail`` after the horizon."""

    steps: tuple[Strategy, ...]
    tail: Strategy

    @property
    def horizon(self) -> int:
        return len(self.steps)

    def at(self, t: int) -> Strategy:
        """Strategy used at (1-based) time ``t``."""
        return self.steps[t - 1] if t <= len(self.steps) else self.tail


def mix_strategy(base: Strategy, player: int, alt_policy: Mapping[int, Sequence[float] | np.ndarray], theta: float, spec: GameSpec | None = None) -> Strategy:
    """Return base with player's policy replaced by theta*alt + (1-theta)*base."""
    if spec is not None and not 0 <= player < spec.n:
        raise PlayerOutOfRange(f"player {player} not in range({spec.n})")
    own = base.player_policy(player)
    if not own:
        raise PlayerOutOfRange(f"player {player} has no policy in the strategy")
    if set(alt_policy) != set(own):
        raise DimensionMismatch("alternative policy must cover the player's controlled states")
    mixed = {}
    for s, cur in own.items():
        alt = np.asarray(alt_policy[s], dtype=float)
        mixed[s] = (1.0 - theta) * cur + theta * alt
    return base.with_player(player, mixed)


# -- induced chain ---------------------------------------------------------


@dataclass(frozen=True)
class InducedChain:
    """Transition matrix P^pi (|S| x |S|) and rewards r^pi (n x |S|)."""

    P: np.ndarray
    r: np.ndarray


def joint_weights(spec: GameSpec, strategy: Strategy, s: int) -> np.ndarray:
    """Probability of each joint action at ``s`` under ``strategy``."""
    w = np.ones(1)
    for i in spec.controllers[s]:
        w = np.outer(w, strategy[(i, s)]).ravel()
    return w


def induced_chain(spec: GameSpec, strategy: Strategy) -> InducedChain:
    """Markov chain and per-player reward vector induced by a stationary strategy."""
    S = spec.num_states
    P = np.empty((S, S))
    r = np.empty((spec.n, S))
    try:
        for s in range(S):
            w = joint_weights(spec, strategy, s)
            P[s] = w @ spec.transitions[s]
            r[:, s] = spec.rewards[s] @ w
    except (KeyError, ValueError) as exc:
        raise DimensionMismatch(f"strategy does not fit the game: {exc}") from None
    return InducedChain(P, r)


def _contract(table: np.ndarray, shape: tuple[int, ...], dists: list[np.ndarray], keep: int) -> np.ndarray:
    """Average a (J, m) joint-action table over every controller except ``keep``."""
    t = table.reshape(shape + (table.shape[1],))
    for ax in reversed(range(len(shape))):
        if ax != keep:
            t = np.tensordot(dists[ax], t, axes=([0], [ax]))
    return t


def deviation_kernel(spec: GameSpec, strategy: Strategy, i: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows of P and r when player ``i`` plays each pure action at ``s`` and others follow ``strategy``.

    Returns ``(P_dev, r_dev)`` with shapes ``(|A_{i,s}|, |S|)`` and ``(n, |A_{i,s}|)``.
    """
    ctrl = spec.controllers[s]
    keep = ctrl.index(i)
    shape = spec.joint_shapes[s]
    dists = [strategy[(c, s)] for c in ctrl]
    P_dev = _contract(spec.transitions[s], shape, dists, keep)
    r_dev = _contract(spec.rewards[s].T, shape, dists, keep).T
    return P_dev, r_dev
