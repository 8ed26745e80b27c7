"""Brute force over a value net plus per-candidate policy LPs, for turn-based games."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..certification import deviation_gap
from ..errors import BudgetExceeded
from ..game import GameSpec, Strategy
from ..lp import LpProblem, lp_feasibility
from .result import SolveResult, require_discounted, require_tbsg, worker_count

DEFAULT_BUDGET = 10_000_000
CHUNK = 1 << 16


@dataclass(frozen=True)
class ValueNet:
    """Candidate value levels shared by every (player, state) coordinate."""

    eps1: float
    eps2: float
    levels: np.ndarray
    dims: int

    @property
    def size(self) -> int:
        return len(self.levels) ** self.dims

    def candidate(self, index: int, n: int, S: int) -> np.ndarray:
        digits = np.unravel_index(index, (len(self.levels),) * self.dims)
        return self.levels[np.array(digits)].reshape(n, S)


def value_net(spec: GameSpec, epsilon: float) -> ValueNet:
    """Net with step eps' = eps (1-gamma)^2/(1+gamma) up to ceil(1/(1-gamma)).

    The upper level is always included.  When the game has negative rewards
    the net is mirrored to the negative side so it still covers every value.
    """
    gamma = spec.gamma
    eps1 = epsilon * (1 - gamma) ** 2 / (1 + gamma)
    top = math.ceil(1.0 / (1.0 - gamma))
    k = int(math.floor(top / eps1 + 1e-9))
    pos = [j * eps1 for j in range(k + 1)]
    if pos[-1] < top - 1e-12:
        pos.append(float(top))
    has_neg = any(np.any(r < 0) for r in spec.rewards)
    has_pos = any(np.any(r > 0) for r in spec.rewards)
    levels = []
    if has_neg:
        levels.extend(-v for v in reversed(pos[1:]))
    if has_pos or not has_neg:
        levels.extend(pos)
    else:
        levels.append(0.0)
    return ValueNet(eps1, eps1 * (1 + gamma), np.array(levels), spec.n * spec.num_states)


def _state_tables(spec: GameSpec) -> list[tuple[int, np.ndarray, np.ndarray]]:
    return [(spec.controllers[s][0], spec.transitions[s], spec.rewards[s]) for s in range(spec.num_states)]


def _state_lp(q: np.ndarray, v: np.ndarray, eps2: float) -> np.ndarray | None:
    """Distribution x over actions with |v_j - q_j . x| <= eps2 for every player j.

    A pure action meeting the rows is preferred; candidates are tried in
    decreasing order of the LP's own weights.
    """
    A = q.shape[1]
    res = lp_feasibility(
        LpProblem(
            A,
            A_ub=np.vstack([q, -q]),
            b_ub=np.concatenate([v + eps2, -(v - eps2)]),
            A_eq=np.ones((1, A)),
            b_eq=np.ones(1),
        )
    )
    if not res.feasible:
        return None
    x = np.maximum(res.x, 0.0)
    x = x / x.sum()
    for a in np.argsort(-x, kind="stable"):
        if np.all(np.abs(v - q[:, a]) <= eps2 + 1e-12):
            return np.eye(A)[a]
    return x


def lp_policies_for_values(spec: GameSpec, values: np.ndarray, eps2: float) -> Strategy | None:
    """Policy satisfying the fixed-value feasibility program, or None if infeasible.

    For fixed V the program separates by state: the controller's
    best-response rows involve V only, and the evaluation rows at s involve
    only pi(s, .).  Each state is therefore solved as its own small LP.
    """
    require_discounted(spec)
    require_tbsg(spec)
    gamma = spec.gamma
    V = np.asarray(values, dtype=float).reshape(spec.n, spec.num_states)
    policies = {}
    for s, (c, P, R) in enumerate(_state_tables(spec)):
        q = R + gamma * (V @ P.T)  # (n, A)
        if V[c, s] < q[c].max() - eps2:
            return None
        x = _state_lp(q, V[:, s], eps2)
        if x is None:
            return None
        policies[(c, s)] = x
    return Strategy(policies)


def _prefilter(spec: GameSpec, net: ValueNet, start: int, stop: int) -> np.ndarray:
    """Indices in [start, stop) passing the necessary per-state interval tests.

    Feasibility at s needs V_c(s) >= max_a q_c - eps2 for the controller and
    V_j(s) within eps2 of [min_a q_j, max_a q_j] for every player, since the
    evaluation rows are convex combinations of the q_j.  For one player this
    is also sufficient.
    """
    gamma = spec.gamma
    n, S = spec.n, spec.num_states
    idx = np.arange(start, stop)
    digits = np.stack(np.unravel_index(idx, (len(net.levels),) * net.dims), axis=1)
    V = net.levels[digits].reshape(-1, n, S)
    mask = np.ones(len(idx), dtype=bool)
    e2 = net.eps2 + 1e-12
    for s, (c, P, R) in enumerate(_state_tables(spec)):
        q = R[None] + gamma * np.einsum("cjt,at->cja", V, P)
        hi = q.max(axis=2)
        lo = q.min(axis=2)
        v = V[:, :, s]
        mask &= v[:, c] >= hi[:, c] - e2
        mask &= np.all(v >= lo - e2, axis=1) & np.all(v <= hi + e2, axis=1)
    return idx[mask]


def brute_force_value_net(
    spec: GameSpec,
    epsilon: float,
    budget: int = DEFAULT_BUDGET,
    workers: int | None = None,
) -> SolveResult:
    """Scan the value net lexicographically and return the first LP-feasible candidate.

    The net order is mixed-radix over coordinates (i, s), player-major, with
    the first coordinate most significant.  A feasible candidate's policy is
    certified by deviation gap under the uniform initial distribution;
    feasible candidates whose policy does not certify at ``epsilon`` are
    skipped and counted.
    """
    require_discounted(spec)
    require_tbsg(spec)
    t0 = time.perf_counter()
    net = value_net(spec, epsilon)
    total = net.size
    if total > budget:
        raise BudgetExceeded(total, budget)
    n, S = spec.n, spec.num_states
    workers = worker_count(workers)
    chunks = [(a, min(a + CHUNK, total)) for a in range(0, total, CHUNK)]
    survivors = lp_calls = rejected = 0
    best = None
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for b in range(0, len(chunks), workers):
            batch = chunks[b : b + workers]
            if pool is None:
                found = [_prefilter(spec, net, *c) for c in batch]
            else:
                found = list(pool.map(lambda c: _prefilter(spec, net, *c), batch))
            for idx in found:
                survivors += len(idx)
                for k in idx:
                    V = net.candidate(int(k), n, S)
                    lp_calls += 1
                    pi = lp_policies_for_values(spec, V, net.eps2)
                    if pi is None:
                        continue
                    cert = deviation_gap(spec, pi, epsilon=epsilon)
                    if best is None or cert.max_gap < best[1].max_gap:
                        best = (pi, cert, int(k))
                    if cert.verdict:
                        return SolveResult(
                            pi,
                            cert,
                            int(k) + 1,
                            time.perf_counter() - t0,
                            "lp-net",
                            {
                                "net_size": total,
                                "levels": len(net.levels),
                                "eps1": net.eps1,
                                "eps2": net.eps2,
                                "candidate_index": int(k),
                                "candidate_values": V.tolist(),
                                "prefilter_survivors": survivors,
                                "lp_calls": lp_calls,
                                "feasible_uncertified": rejected,
                            },
                        )
                    rejected += 1
    finally:
        if pool is not None:
            pool.shutdown()
    diagnostics = {
        "net_size": total,
        "levels": len(net.levels),
        "prefilter_survivors": survivors,
        "lp_calls": lp_calls,
        "feasible_uncertified": rejected,
        "infeasible": best is None,
    }
    strategy, cert = (best[0], best[1]) if best else (None, None)
    return SolveResult(strategy, cert, total, time.perf_counter() - t0, "lp-net", diagnostics)
