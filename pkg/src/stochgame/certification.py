"""Nash-equilibrium certificates: deviation gaps, Bellman conditions, pseudo-linearity probes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateSegment, HorizonTooShort, WrongMode
from .evaluation import QSpec, bellman_errors, best_response, evaluate, value_function
from .game import GameSpec, NonStationaryStrategy, Strategy, deviation_kernel, induced_chain, mix_strategy

CERT_SLACK = 1e-10
# Bellman errors below this are treated as "no improving action".
_PSI_ZERO = 1e-14


@dataclass(frozen=True)
class NeCertificate:
    """Outcome of an NE check.

    ``gaps[i]`` is player i's worst violation in the units of the mode
    (utility gain for DeviationGap, Bellman error for the Bellman modes,
    per-step slack for NonStationary).  ``witness`` names an offending
    (player, state, action) on failure, prefixed by the time step for
    non-stationary strategies.
    """

    mode: str
    epsilon: float
    gaps: tuple[float, ...]
    verdict: bool
    witness: tuple | None = None

    @property
    def max_gap(self) -> float:
        return max(self.gaps, default=0.0)

    def to_dict(self, spec: GameSpec) -> dict:
        witness = None
        if self.witness is not None:
            *head, i, s, a = self.witness
            witness = {"player": spec.player_names[i], "state": spec.states[s], "action": spec.actions[i][s][a]}
            if head:
                witness["step"] = int(head[0])
        return {
            "mode": self.mode,
            "epsilon": float(self.epsilon),
            "gaps": {spec.player_names[i]: float(g) for i, g in enumerate(self.gaps)},
            "max_gap": float(self.max_gap),
            "verdict": "pass" if self.verdict else "fail",
            "witness": witness,
        }


def _require_discounted(spec: GameSpec) -> None:
    if spec.discount.mode != "discounted":
        raise WrongMode("certification requires a discounted game")


def _witness_for(spec: GameSpec, psi: Mapping, player: int) -> tuple[int, int, int]:
    best = None
    for s in spec.controlled_states(player):
        a = int(np.argmax(psi[(player, s)]))
        if best is None or psi[(player, s)][a] > best[0]:
            best = (psi[(player, s)][a], s, a)
    return (player, best[1], best[2])


def player_gaps(
    spec: GameSpec, strategy: Strategy, q: QSpec = None, stop_above: float | None = None
) -> tuple[np.ndarray, dict]:
    """Per-player deviation gaps plus the Bellman errors used to shortcut them.

    With ``stop_above`` set, a player whose gap provably exceeds it gets a
    lower bound instead of the exact gap.  The bound uses that deviating at a
    single state s to action a gains at least q_i(s) * Psi_{i,s}(a).
    """
    _require_discounted(spec)
    values = value_function(spec, strategy, q)
    report = bellman_errors(spec, strategy, values)
    gaps = np.zeros(spec.n)
    for i in range(spec.n):
        states = spec.controlled_states(i)
        if all(len(spec.actions[i][s]) == 1 for s in states):
            continue
        top = max(float(report.psi[(i, s)].max()) for s in states)
        if top <= _PSI_ZERO:
            continue
        if stop_above is not None:
            lower = max(float(values.q[i, s] * report.psi[(i, s)].max()) for s in states)
            if lower > stop_above:
                gaps[i] = lower
                continue
        _, dev = best_response(spec, i, strategy, q)
        gaps[i] = max(dev.u[i] - values.u[i], 0.0)
    return gaps, report.psi


def deviation_gap(
    spec: GameSpec,
    strategy: Strategy,
    q: QSpec = None,
    epsilon: float | None = None,
    stop_above: float | None = None,
) -> NeCertificate:
    """Exact best-response gaps u_i(BR_i, pi_-i) - u_i(pi) for every player.

    Without ``epsilon`` the certificate's epsilon is the maximum gap itself and
    the verdict passes.  With ``epsilon`` the verdict is max gap <= epsilon + 1e-10.
    """
    gaps, psi = player_gaps(spec, strategy, q, stop_above)
    worst = float(gaps.max()) if gaps.size else 0.0
    eps = worst if epsilon is None else float(epsilon)
    ok = worst <= eps + CERT_SLACK
    witness = None if ok else _witness_for(spec, psi, int(np.argmax(gaps)))
    return NeCertificate("DeviationGap", eps, tuple(float(g) for g in gaps), ok, witness)


_BELLMAN_MODES = {"exact": "Exact", "necessary": "BellmanNecessary", "sufficient": "BellmanSufficient"}


def check_bellman_ne(spec: GameSpec, strategy: Strategy, epsilon: float, mode: str) -> NeCertificate:
    """Bellman-condition NE checks.

    exact: V_i(s) >= max_a backup - 1e-10.  necessary: slack |S| eps.
    sufficient: slack (1 - gamma) eps.  The necessary and sufficient slacks
    relate to deviation gaps under the uniform initial distribution.
    """
    _require_discounted(spec)
    key = mode.lower()
    if key not in _BELLMAN_MODES:
        raise ValueError(f"unknown Bellman mode {mode!r}")
    slack = {"exact": 0.0, "necessary": spec.num_states * epsilon, "sufficient": (1 - spec.gamma) * epsilon}[key]
    report = bellman_errors(spec, strategy, value_function(spec, strategy))
    gaps = np.zeros(spec.n)
    for (i, s), p in report.psi.items():
        gaps[i] = max(gaps[i], float(p.max()))
    ok = bool(np.all(gaps <= slack + CERT_SLACK))
    witness = None if ok else _witness_for(spec, report.psi, int(np.argmax(gaps)))
    eps = 0.0 if key == "exact" else float(epsilon)
    return NeCertificate(_BELLMAN_MODES[key], eps, tuple(float(g) for g in gaps), ok, witness)


# -- pseudo-linearity --------------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    thetas: tuple[float, ...]
    utilities: tuple[float, ...]
    ratios: tuple[float | None, ...]
    in_bounds: tuple[bool | None, ...]
    u_start: float
    u_end: float
    monotone: bool
    degenerate: bool = False

    @property
    def all_in_bounds(self) -> bool:
        return all(b for b in self.in_bounds if b is not None)


def pseudo_linearity_probe(
    spec: GameSpec,
    player: int,
    pi_a: Mapping[int, Sequence[float]],
    pi_b: Mapping[int, Sequence[float]],
    context: Strategy,
    theta_grid: Sequence[float],
    q: QSpec = None,
    tol: float = 1e-8,
) -> ProbeReport:
    """Utility of ``player`` along theta*pi_b + (1-theta)*pi_a with others fixed by ``context``.

    Each ratio (u(theta) - u(0)) / (u(1) - u(0)) is tested against
    [(1-gamma) theta, theta/(1-gamma)] with tolerance ``tol``.  The default
    initial distribution is the player's own state for O-games and uniform
    otherwise.  Raises DegenerateSegment (carrying the report) when
    |u(1) - u(0)| <= 1e-8.
    """
    if q is None and all(len(spec.controlled_states(j)) == 1 for j in range(spec.n)):
        q = "own"
    gamma = spec.gamma
    base = context.with_player(player, pi_a)

    def u(theta: float) -> float:
        return float(evaluate(spec, mix_strategy(base, player, pi_b, theta), q).u[player])

    u0, u1 = u(0.0), u(1.0)
    thetas = tuple(float(t) for t in theta_grid)
    utils = tuple(u(t) for t in thetas)
    denom = u1 - u0
    degenerate = abs(denom) <= 1e-8
    ratios, flags = [], []
    for t, ut in zip(thetas, utils):
        if degenerate:
            ratios.append(None)
            flags.append(None)
            continue
        ratio = (ut - u0) / denom
        ratios.append(ratio)
        flags.append((1 - gamma) * t - tol <= ratio <= t / (1 - gamma) + tol)
    path = sorted(zip((0.0, 1.0) + thetas, (u0, u1) + utils))
    seq = np.array([v for _, v in path])
    steps = np.diff(seq)
    sign = 1.0 if denom >= 0 else -1.0
    monotone = bool(np.all(sign * steps >= -1e-12))
    report = ProbeReport(thetas, utils, tuple(ratios), tuple(flags), u0, u1, monotone, degenerate)
    if degenerate:
        raise DegenerateSegment("endpoint utilities coincide", report=report)
    return report


# -- non-stationary strategies -----------------------------------------------


def nonstationary_certify(spec: GameSpec, strategy: NonStationaryStrategy, epsilon: float) -> NeCertificate:
    """Check finite-horizon backward-induction optimality of every step and the tail bound.

    Step values are recomputed from W^{H+1} = 0 using each step's strategy;
    every one-step deviation at every step must gain at most 1e-10.
    """
    _require_discounted(spec)
    gamma = spec.gamma
    H = strategy.horizon
    if gamma**H / (1 - gamma) > epsilon / 2:
        raise HorizonTooShort(f"gamma^H/(1-gamma) = {gamma**H / (1 - gamma):.3e} exceeds eps/2 = {epsilon / 2:.3e}")
    W = np.zeros((spec.n, spec.num_states))
    gaps = np.zeros(spec.n)
    witness = None
    worst = -np.inf
    for t in range(H, 0, -1):
        pi = strategy.at(t)
        chain = induced_chain(spec, pi)
        W_next = W
        W = chain.r + gamma * W_next @ chain.P.T
        for i, s in spec.coords:
            P_dev, r_dev = deviation_kernel(spec, pi, i, s)
            Q = r_dev[i] + gamma * (P_dev @ W_next[i])
            a = int(np.argmax(Q))
            slack = float(Q[a] - W[i, s])
            gaps[i] = max(gaps[i], slack)
            if slack > CERT_SLACK and slack > worst:
                worst = slack
                witness = (t, i, s, a)
    ok = witness is None
    return NeCertificate("NonStationary", float(epsilon), tuple(float(g) for g in gaps), ok, witness)
