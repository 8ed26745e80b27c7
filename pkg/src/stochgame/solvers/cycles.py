"""Exact pure NE for deterministic, action-independent LocReward O-TBSGs via cycles."""

from __future__ import annotations

import time
from collections import deque

import numpy as np

from ..certification import deviation_gap
from ..errors import WrongClass
from ..game import GameSpec, Strategy, classify_game
from .result import SolveResult, require_discounted


def _require_graph_game(spec: GameSpec, sign: str) -> None:
    cls = classify_game(spec)
    own = [spec.rewards[spec.own_state(i)][i] for i in range(spec.n)] if cls.is_ossg else []
    sign_ok = all(np.all(r >= 0) for r in own) if sign == "NonNegative" else all(np.all(r <= 0) for r in own)
    if not (
        cls.is_otbsg
        and cls.is_locreward
        and cls.deterministic_transitions
        and cls.action_independent_rewards
        and sign_ok
    ):
        raise WrongClass(
            "requires a LocReward O-TBSG with deterministic transitions, action-independent rewards "
            f"and {sign.lower()} rewards"
        )


def _successors(spec: GameSpec) -> list[list[int]]:
    """Target state of each action at each state, in action order."""
    return [[int(np.argmax(row)) for row in spec.transitions[s]] for s in range(spec.num_states)]


def _shortest_cycle_from(v: int, succ: list[list[int]], alive: list[bool]) -> list[int] | None:
    """Shortest cycle through ``v`` using out-edges of live vertices only, as a vertex list."""
    if not alive[v]:
        return None
    parent = {v: None}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        if not alive[u]:
            continue
        for w in succ[u]:
            if w == v:
                path = [u]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            if w not in parent:
                parent[w] = u
                queue.append(w)
    return None


def shortest_cycle_solution(spec: GameSpec) -> dict[int, int]:
    """Action choice per state from repeatedly fixing a globally shortest cycle.

    Ties go to the lowest start vertex; within a cycle each vertex takes the
    first action reaching its successor.  Vertices on no cycle take their
    first action.
    """
    succ = _successors(spec)
    S = spec.num_states
    alive = [True] * S
    choice: dict[int, int] = {}
    while True:
        best = None
        for v in range(S):
            cyc = _shortest_cycle_from(v, succ, alive)
            if cyc is not None and (best is None or len(cyc) < len(best)):
                best = cyc
        if best is None:
            break
        for k, u in enumerate(best):
            nxt = best[(k + 1) % len(best)]
            choice[u] = succ[u].index(nxt)
            alive[u] = False
    for v in range(S):
        choice.setdefault(v, 0)
    return choice


def _return_time(start: int, choice: dict[int, int], succ: list[list[int]]) -> float:
    """Steps until the walk from ``start`` first revisits it; inf if it never does."""
    seen = set()
    u = succ[start][choice[start]]
    t = 1
    while u != start:
        if u in seen:
            return float("inf")
        seen.add(u)
        u = succ[u][choice[u]]
        t += 1
    return float(t)


def longest_cycle_solution(spec: GameSpec, max_rounds: int | None = None) -> tuple[dict[int, int], int]:
    """Local improvement toward longer own-return times (or none) for negative-reward owners.

    Each round scans states in order; the first state whose owner has a
    strictly negative reward and an action with strictly longer return time
    switches to the longest such action (lowest index on ties) and the scan
    restarts.  Returns the fixed point and the number of switches.
    """
    succ = _successors(spec)
    S = spec.num_states
    owner = {s: spec.controllers[s][0] for s in range(S)}
    choice = {s: 0 for s in range(S)}
    cap = max_rounds if max_rounds is not None else 10 * S * S * max(len(x) for x in succ) + 10
    switches = 0
    while switches < cap:
        moved = False
        for s in range(S):
            if spec.rewards[s][owner[s]].max() >= 0:
                continue
            current = _return_time(s, choice, succ)
            best_a, best_t = None, current
            for a in range(len(succ[s])):
                trial = dict(choice)
                trial[s] = a
                t = _return_time(s, trial, succ)
                if t > best_t:
                    best_a, best_t = a, t
            if best_a is not None:
                choice[s] = best_a
                moved = True
                switches += 1
                break
        if not moved:
            break
    return choice, switches


def cycle_ne_graph(spec: GameSpec, sign: str) -> SolveResult:
    """Exact pure NE via shortest cycles (non-negative) or longest cycles (non-positive)."""
    require_discounted(spec)
    if sign not in ("NonNegative", "NonPositive"):
        raise ValueError("sign must be NonNegative or NonPositive")
    _require_graph_game(spec, sign)
    t0 = time.perf_counter()
    if sign == "NonNegative":
        choice, iters = shortest_cycle_solution(spec), 0
    else:
        choice, iters = longest_cycle_solution(spec)
    pi = Strategy.pure(spec, {(spec.controllers[s][0], s): a for s, a in choice.items()})
    cert = deviation_gap(spec, pi, q="own", epsilon=1e-12)
    return SolveResult(pi, cert, iters, time.perf_counter() - t0, "cycle", {"sign": sign})
