"""Strategy iteration for fixed-sign LocReward O-TBSGs and the log-det potential."""

from __future__ import annotations

import math
import time

import numpy as np

from ..certification import deviation_gap
from ..errors import WrongClass
from ..evaluation import value_function
from ..game import GameSpec, Strategy, classify_game, induced_chain
from .result import SolveResult, require_discounted


def require_locreward(spec: GameSpec, signs: tuple[str, ...] = ("NonNegative", "NonPositive")) -> str:
    """Check the LocReward O-TBSG preconditions and return the reward sign."""
    cls = classify_game(spec)
    if not (cls.is_otbsg and cls.is_locreward and cls.reward_sign in signs):
        raise WrongClass(
            "requires a LocReward O-TBSG with "
            + " or ".join(signs).lower()
            + f" rewards (got otbsg={cls.is_otbsg}, locreward={cls.is_locreward}, sign={cls.reward_sign})"
        )
    return cls.reward_sign


def padded_game(spec: GameSpec, epsilon: float, sign: str) -> GameSpec:
    """Push own-state rewards away from zero by (1-gamma) eps / 2, keeping their sign."""
    pad = (1 - spec.gamma) * epsilon / 2
    rewards = [r.copy() for r in spec.rewards]
    for i in range(spec.n):
        s = spec.own_state(i)
        rewards[s][i] = np.maximum(rewards[s][i], pad) if sign == "NonNegative" else np.minimum(rewards[s][i], -pad)
    return spec.replace(rewards=rewards)


def potential(spec: GameSpec, strategy: Strategy) -> float:
    """Phi(pi) = sum_i log|r_i^pi(s_i)| - log det(I - gamma P^pi).

    For a single player's switch, the change in Phi equals the change in
    log|upsilon_i|; it rises with upsilon_i for positive rewards and falls
    for negative ones.
    """
    chain = induced_chain(spec, strategy)
    logr = sum(math.log(abs(chain.r[i, spec.own_state(i)])) for i in range(spec.n))
    sign, logdet = np.linalg.slogdet(np.eye(spec.num_states) - spec.gamma * chain.P)
    return logr - logdet


def switch_bound(n: int, gamma: float, epsilon: float) -> float:
    """Explicit cap on accepted switches from the potential's range and per-switch step."""
    span = n * math.log(2 * (1 + gamma) / ((1 - gamma) ** 2 * epsilon))
    return span / math.log(1 + (1 - gamma) * epsilon / 2)


REFINE_TOL = 1e-12
DEFAULT_REFINE_CAP = 10_000


def _first_switch(game: GameSpec, choice: dict, ups: np.ndarray, threshold: float):
    """First pure switch (players, then actions, in order) raising its own-state value by ``threshold``."""
    for i in range(game.n):
        s = game.own_state(i)
        for a in range(len(game.actions[i][s])):
            if a == choice[(i, s)]:
                continue
            trial = dict(choice)
            trial[(i, s)] = a
            cand = Strategy.pure(game, trial)
            if value_function(game, cand, "own").u[i] >= ups[i] + threshold:
                return trial, cand
    return None


def strategy_iteration_locreward(
    spec: GameSpec,
    epsilon: float,
    max_switches: int | None = None,
    refine: bool = True,
    max_refine: int = DEFAULT_REFINE_CAP,
) -> SolveResult:
    """Approximate best-response dynamics on the padded game, then optional exact refinement.

    Starting from every player's first action, each pass scans players in
    order and their actions in order, accepts the first pure switch raising
    the padded own-state value by at least eps/2 and restarts.  These
    switches are the reported iteration count.  With ``refine`` the
    dynamics then continue on the original game accepting any strict
    improvement; the log-det potential is ordinal, so this ends at an exact
    pure NE (or stops after ``max_refine`` switches).  The result is
    certified on the original game with own-state utilities.
    """
    require_discounted(spec)
    sign = require_locreward(spec)
    t0 = time.perf_counter()
    padded = padded_game(spec, epsilon, sign)
    choice = {c: 0 for c in spec.coords}
    pi = Strategy.pure(spec, choice)
    phi = [potential(padded, pi)]
    cap = max_switches if max_switches is not None else int(switch_bound(spec.n, spec.gamma, epsilon)) + 1
    switches = 0
    sweeps = 0
    while switches <= cap:
        sweeps += 1
        hit = _first_switch(padded, choice, value_function(padded, pi, "own").u, epsilon / 2)
        if hit is None:
            break
        choice, pi = hit
        switches += 1
        phi.append(potential(padded, pi))
    refined = 0
    if refine:
        while refined < max_refine:
            ups = value_function(spec, pi, "own").u
            hit = _first_switch(spec, choice, ups, REFINE_TOL * max(1.0, float(np.max(np.abs(ups)))))
            if hit is None:
                break
            choice, pi = hit
            refined += 1
    cert = deviation_gap(spec, pi, q="own", epsilon=epsilon)
    return SolveResult(
        pi,
        cert,
        switches,
        time.perf_counter() - t0,
        "strategy-iter",
        {
            "sweeps": sweeps,
            "potential": phi,
            "sign": sign,
            "switch_bound": switch_bound(spec.n, spec.gamma, epsilon),
            "refine_switches": refined,
        },
    )
