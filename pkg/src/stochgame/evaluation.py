"""Strategy evaluation, Bellman errors and best responses."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import InvalidGame, NonConvergent, NotUnichain, SingularSystem, WrongMode
from .game import (
    GameSpec,
    Strategy,
    deviation_kernel,
    induced_chain,
)

RESIDUAL_TOL = 1e-10
BR_TOL = 1e-12

QSpec = Union[None, str, Sequence[float], np.ndarray]


def resolve_q(spec: GameSpec, q: QSpec) -> np.ndarray:
    """Per-player initial distributions as an (n, |S|) matrix.

    ``None`` means uniform, ``"own"`` means the point mass on each player's own
    state (O-games), and an explicit vector is shared by all players.
    """
    S = spec.num_states
    if q is None or (isinstance(q, str) and q == "uniform"):
        return np.full((spec.n, S), 1.0 / S)
    if isinstance(q, str):
        if q != "own":
            raise InvalidGame(f"unknown initial distribution {q!r}")
        Q = np.zeros((spec.n, S))
        for i in range(spec.n):
            Q[i, spec.own_state(i)] = 1.0
        return Q
    arr = np.asarray(q, dtype=float)
    if arr.ndim == 1:
        arr = np.broadcast_to(arr, (spec.n, S)).copy()
    if arr.shape != (spec.n, S) or np.any(arr < 0) or np.any(np.abs(arr.sum(axis=1) - 1.0) > 1e-9):
        raise InvalidGame("initial distribution must be a probability vector over states")
    return arr


@dataclass(frozen=True)
class ValueProfile:
    """Values ``V[i, s]``, utilities ``u[i] = <q_i, V_i>`` and own-state values for O-games."""

    V: np.ndarray
    u: np.ndarray
    q: np.ndarray
    upsilon: np.ndarray | None = None
    residual: float = 0.0

    def rows(self, spec: GameSpec) -> list[dict]:
        return [
            {"player": spec.player_names[i], "state": spec.states[s], "value": float(self.V[i, s])}
            for i in range(spec.n)
            for s in range(spec.num_states)
        ]


def _profile(spec: GameSpec, V: np.ndarray, q: QSpec, residual: float) -> ValueProfile:
    Q = resolve_q(spec, q)
    u = np.einsum("is,is->i", Q, V)
    upsilon = None
    if all(len(spec.controlled_states(i)) == 1 for i in range(spec.n)):
        upsilon = np.array([V[i, spec.own_state(i)] for i in range(spec.n)])
    return ValueProfile(V, u, Q, upsilon, residual)


def solve_discounted(P: np.ndarray, r: np.ndarray, gamma: float) -> tuple[np.ndarray, float]:
    """Solve (I - gamma P) V_i = r_i for every row of ``r``; returns (V, residual)."""
    M = np.eye(P.shape[0]) - gamma * P
    try:
        V = np.linalg.solve(M, r.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    residual = float(np.max(np.abs(V @ M.T - r))) if V.size else 0.0
    if not np.isfinite(residual) or residual > RESIDUAL_TOL * max(1.0, float(np.max(np.abs(V)))):
        raise SingularSystem(f"linear solve residual {residual:.3e} too large")
    return V, residual


def _require_mode(spec: GameSpec, mode: str) -> None:
    if spec.discount.mode != mode:
        raise WrongMode(f"operation requires a {mode} game, got {spec.discount.mode}")


def value_function(spec: GameSpec, strategy: Strategy, q: QSpec = None) -> ValueProfile:
    """Exact discounted values V_i = (I - gamma P^pi)^{-1} r_i^pi."""
    _require_mode(spec, "discounted")
    chain = induced_chain(spec, strategy)
    V, res = solve_discounted(chain.P, chain.r, spec.gamma)
    return _profile(spec, V, q, res)


def absorbing_value(spec: GameSpec, strategy: Strategy, q: QSpec = None) -> ValueProfile:
    """Total reward until absorption; zero at the absorbing state."""
    _require_mode(spec, "absorbing")
    z = spec.state_index(spec.discount.absorbing_state)
    if spec.transitions[z][:, z].min() < 1.0 or np.any(spec.rewards[z] != 0.0):
        raise InvalidGame("absorbing state must self-loop with zero reward")
    chain = induced_chain(spec, strategy)
    T = [s for s in range(spec.num_states) if s != z]
    V = np.zeros((spec.n, spec.num_states))
    res = 0.0
    if T:
        Pt = chain.P[np.ix_(T, T)]
        rho = float(np.max(np.abs(np.linalg.eigvals(Pt))))
        if rho >= 1.0 - 1e-9:
            raise NonConvergent(f"transient block has spectral radius {rho:.12f}")
        Vt, res = solve_discounted(Pt, chain.r[:, T], 1.0)
        V[:, T] = Vt
    return _profile(spec, V, q, res)


def stationary_distribution(P: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Stationary distribution of a unichain by repeated squaring of the lazy chain."""
    M = 0.5 * (np.eye(P.shape[0]) + P)
    for _ in range(64):
        M2 = M @ M
        M2 /= M2.sum(axis=1, keepdims=True)  # keep rounding from compounding
        done = np.max(np.abs(M2 - M)) < 1e-15
        M = M2
        if done:
            break
    if np.max(np.ptp(M, axis=0)) > tol:
        raise NotUnichain("induced chain has more than one recurrent class")
    lam = M.mean(axis=0)
    return lam / lam.sum()


def average_reward_value(spec: GameSpec, strategy: Strategy) -> ValueProfile:
    """Long-run average reward of a unichain strategy; constant across start states."""
    _require_mode(spec, "average")
    chain = induced_chain(spec, strategy)
    lam = stationary_distribution(chain.P)
    residual = float(np.max(np.abs(lam @ chain.P - lam)))
    g = chain.r @ lam
    V = np.repeat(g[:, None], spec.num_states, axis=1)
    return _profile(spec, V, None, residual)


def evaluate(spec: GameSpec, strategy: Strategy, q: QSpec = None) -> ValueProfile:
    """Dispatch on the discount mode."""
    mode = spec.discount.mode
    if mode == "discounted":
        return value_function(spec, strategy, q)
    if mode == "absorbing":
        return absorbing_value(spec, strategy, q)
    return average_reward_value(spec, strategy)


# -- Bellman errors ----------------------------------------------------------


@dataclass(frozen=True)
class BellmanReport:
    """Bellman errors ``psi[(i, s)][a]`` and their positive parts ``upsilon``."""

    psi: Mapping[tuple[int, int], np.ndarray]
    upsilon: Mapping[tuple[int, int], np.ndarray]
    max_upsilon: float

    def rows(self, spec: GameSpec) -> list[dict]:
        out = []
        for (i, s), psi in sorted(self.psi.items()):
            for a, name in enumerate(spec.actions[i][s]):
                out.append(
                    {
                        "player": spec.player_names[i],
                        "state": spec.states[s],
                        "action": name,
                        "psi": float(psi[a]),
                        "upsilon": float(self.upsilon[(i, s)][a]),
                    }
                )
        return out


def bellman_errors(spec: GameSpec, strategy: Strategy, values: ValueProfile | None = None) -> BellmanReport:
    """One-step deviation improvements Psi and Upsilon = max(Psi, 0)."""
    if values is None:
        values = evaluate(spec, strategy)
    gamma = spec.gamma
    V = values.V
    psi, ups = {}, {}
    for i, s in spec.coords:
        P_dev, r_dev = deviation_kernel(spec, strategy, i, s)
        p = r_dev[i] + gamma * (P_dev @ V[i]) - V[i, s]
        psi[(i, s)] = p
        ups[(i, s)] = np.maximum(p, 0.0)
    m = max((float(u.max()) for u in ups.values()), default=0.0)
    return BellmanReport(psi, ups, m)


# -- best response -----------------------------------------------------------


def best_response(
    spec: GameSpec, player: int, strategy: Strategy, q: QSpec = None
) -> tuple[dict[int, np.ndarray], ValueProfile]:
    """Exact pure best response of ``player`` by Howard policy iteration.

    Starts from the first action everywhere, switches a state only on an
    improvement above 1e-12 and breaks argmax ties by the lowest index.
    Returns the policy (state -> one-hot vector) and the values of the
    deviated profile.
    """
    _require_mode(spec, "discounted")
    gamma = spec.gamma
    states = spec.controlled_states(player)
    kernels = {s: deviation_kernel(spec, strategy, player, s) for s in states}
    base = induced_chain(spec, strategy)
    P = base.P.copy()
    r = base.r.copy()
    choice = {s: 0 for s in states}

    def load(s: int, a: int) -> None:
        P_dev, r_dev = kernels[s]
        P[s] = P_dev[a]
        r[:, s] = r_dev[:, a]

    for s in states:
        load(s, 0)
    for _ in range(10_000):
        Vi, _ = solve_discounted(P, r[player : player + 1], gamma)
        Vi = Vi[0]
        changed = False
        for s in states:
            P_dev, r_dev = kernels[s]
            Q = r_dev[player] + gamma * (P_dev @ Vi)
            best = int(np.flatnonzero(Q >= Q.max() - BR_TOL)[0])
            if Q[best] > Q[choice[s]] + BR_TOL:
                choice[s] = best
                load(s, best)
                changed = True
        if not changed:
            break
    else:  # pragma: no cover - policy iteration is finite
        raise NonConvergent("policy iteration did not terminate")
    V, res = solve_discounted(P, r, gamma)
    policy = {}
    for s in states:
        e = np.zeros(len(spec.actions[player][s]))
        e[choice[s]] = 1.0
        policy[s] = e
    return policy, _profile(spec, V, q, res)
