"""Brouwer maps whose fixed points are Nash equilibria, and a damped iteration on them."""

from __future__ import annotations

import math
import time

import numpy as np

from ..certification import deviation_gap
from ..errors import WrongClass
from ..evaluation import bellman_errors, value_function
from ..game import GameSpec, Strategy
from .result import SolveResult, require_discounted

MODES = ("value", "bellman")


def _is_ossg(spec: GameSpec) -> bool:
    return all(len(spec.controlled_states(i)) == 1 for i in range(spec.n))


def _gains(spec: GameSpec, strategy: Strategy, mode: str) -> dict[tuple[int, int], np.ndarray]:
    """Upsilon per coordinate: clipped utility gains (value) or clipped Bellman errors (bellman)."""
    if mode == "bellman":
        return dict(bellman_errors(spec, strategy).upsilon)
    if mode != "value":
        raise ValueError(f"unknown map {mode!r}")
    if not _is_ossg(spec):
        raise WrongClass("the value map requires every player to control exactly one state")
    base = value_function(spec, strategy, "own").u
    out = {}
    for i, s in spec.coords:
        m = len(spec.actions[i][s])
        g = np.empty(m)
        for a in range(m):
            e = np.zeros(m)
            e[a] = 1.0
            g[a] = value_function(spec, strategy.with_policy(i, s, e), "own").u[i] - base[i]
        out[(i, s)] = np.maximum(g, 0.0)
    return out


def brouwer_map(spec: GameSpec, strategy: Strategy, mode: str) -> Strategy:
    """y_{i,s}(a) = (pi_{i,s}(a) + Upsilon(a)) / (1 + sum_a' Upsilon(a')).

    ``mode="value"`` uses own-state utility gains of pure deviations
    (O-SSG only); ``mode="bellman"`` uses clipped Bellman errors.
    """
    require_discounted(spec)
    gains = _gains(spec, strategy, mode)
    return Strategy({c: (strategy[c] + g) / (1.0 + g.sum()) for c, g in gains.items()})


def residual(spec: GameSpec, strategy: Strategy, mode: str) -> float:
    """Sup-norm distance between a strategy and its image."""
    return float(np.max(np.abs(strategy.to_vector(spec) - brouwer_map(spec, strategy, mode).to_vector(spec))))


def implied_epsilon(spec: GameSpec, mode: str, res: float) -> float:
    """NE accuracy implied by a fixed-point residual through the map's accuracy bound."""
    gamma = spec.gamma
    if mode == "value":
        A = spec.max_player_actions
        rho = U = 1.0 / (1.0 - gamma)
        return (8 * rho**2 * A**2 + rho * A * U) * math.sqrt(res * (1 + A * U))
    A = spec.max_state_actions
    return (8 * A**2 / (1 - gamma) ** 2) * math.sqrt(res * A)


def brouwer_fixed_point_solve(
    spec: GameSpec,
    mode: str,
    eta: float = 0.5,
    max_iters: int = 100_000,
    target_residual: float = 1e-8,
    init: Strategy | None = None,
    epsilon: float | None = None,
) -> SolveResult:
    """Damped iteration pi <- (1 - eta) pi + eta f(pi); a heuristic that may not converge.

    Stops once ||pi - f(pi)||_inf <= target_residual or after ``max_iters``
    updates, returning the iterate with the smallest residual seen.  The
    certificate is an independent deviation-gap check, judged against
    ``epsilon`` when given.
    """
    require_discounted(spec)
    if mode == "value" and not _is_ossg(spec):
        raise WrongClass("the value map requires every player to control exactly one state")
    t0 = time.perf_counter()
    pi = init if init is not None else Strategy.uniform(spec)
    best = (math.inf, pi, 0)
    it = 0
    trace = []
    while True:
        image = brouwer_map(spec, pi, mode)
        x, y = pi.to_vector(spec), image.to_vector(spec)
        res = float(np.max(np.abs(x - y)))
        if res < best[0]:
            best = (res, pi, it)
        if it % 100 == 0:
            trace.append(res)
        if res <= target_residual or it >= max_iters:
            break
        pi = Strategy.from_vector(spec, (1 - eta) * x + eta * y)
        it += 1
    res, pi, at = best
    q = "own" if mode == "value" else None
    cert = deviation_gap(spec, pi, q=q, epsilon=epsilon)
    converged = res <= target_residual
    return SolveResult(
        pi,
        cert,
        it,
        time.perf_counter() - t0,
        f"brouwer-{mode}",
        {
            "residual": res,
            "best_iteration": at,
            "converged": converged,
            "implied_epsilon": implied_epsilon(spec, mode, res),
            "residual_trace": trace,
        },
    )
