"""Backward induction for approximate non-stationary NE in turn-based games."""

from __future__ import annotations

import math
import time

import numpy as np

from ..certification import NeCertificate, nonstationary_certify
from ..errors import HorizonTooShort
from ..game import GameSpec, NonStationaryStrategy, Strategy
from .result import SolveResult, require_discounted, require_tbsg


def horizon(gamma: float, epsilon: float) -> int:
    """H = ceil(ln(1/((1-gamma) eps)) / (1-gamma))."""
    return max(1, math.ceil(math.log(1.0 / ((1.0 - gamma) * epsilon)) / (1.0 - gamma)))


def backward_induction(spec: GameSpec, epsilon: float) -> SolveResult:
    """Greedy finite-horizon backups, played in reverse order of computation.

    Step h computes Q^h = r + gamma p V^{h-1} from V^0 = 0; the controller of
    each state picks the first maximizer and every player's V^h is the
    backup at that action.  The returned strategy plays pi^{H-h+1} at time h
    and pi^1 after the horizon.
    """
    require_discounted(spec)
    require_tbsg(spec)
    t0 = time.perf_counter()
    gamma = spec.gamma
    H = horizon(gamma, epsilon)
    V = np.zeros((spec.n, spec.num_states))
    steps = []
    for _ in range(H):
        V_new = np.empty_like(V)
        choice = {}
        for s in range(spec.num_states):
            (c,) = spec.controllers[s]
            Q = spec.rewards[s] + gamma * (V @ spec.transitions[s].T)  # (n, A)
            a = int(np.argmax(Q[c]))
            choice[(c, s)] = a
            V_new[:, s] = Q[:, a]
        V = V_new
        steps.append(Strategy.pure(spec, choice))
    ns = NonStationaryStrategy(tuple(reversed(steps)), steps[0])
    try:
        cert = nonstationary_certify(spec, ns, epsilon)
        note = None
    except HorizonTooShort as exc:
        cert = NeCertificate("NonStationary", float(epsilon), tuple([float("nan")] * spec.n), False, None)
        note = str(exc)
    diagnostics = {"horizon": H}
    if note:
        diagnostics["horizon_too_short"] = note
    return SolveResult(ns, cert, H, time.perf_counter() - t0, "bi", diagnostics)
