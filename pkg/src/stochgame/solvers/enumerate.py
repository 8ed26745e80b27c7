"""Exhaustive pure-strategy NE enumeration (test oracle)."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from itertools import islice, product

import numpy as np

from ..certification import NeCertificate, deviation_gap
from ..errors import BudgetExceeded
from ..evaluation import QSpec
from ..game import GameSpec, Strategy
from .result import require_discounted, worker_count

DEFAULT_BUDGET = 1_000_000
_BATCH = 256


def count_pure(spec: GameSpec) -> int:
    return int(np.prod([len(spec.actions[i][s]) for i, s in spec.coords], dtype=object))


def pure_ne_enumerate(
    spec: GameSpec,
    delta: float,
    q: QSpec = None,
    budget: int = DEFAULT_BUDGET,
    workers: int | None = None,
) -> list[tuple[Strategy, NeCertificate]]:
    """All pure strategies with deviation gap <= delta, in lexicographic order.

    The order is the product over coordinates (player-major) of action
    indices, first coordinate most significant.
    """
    require_discounted(spec)
    total = count_pure(spec)
    if total > budget:
        raise BudgetExceeded(total, budget)
    coords = spec.coords
    ranges = [range(len(spec.actions[i][s])) for i, s in coords]

    def check(combo: tuple[int, ...]):
        pi = Strategy.pure(spec, dict(zip(coords, combo)))
        cert = deviation_gap(spec, pi, q=q, epsilon=delta, stop_above=delta + 1e-9)
        return (pi, cert) if cert.verdict else None

    workers = worker_count(workers)
    it = product(*ranges)
    out = []
    if workers == 1:
        for combo in it:
            hit = check(combo)
            if hit:
                out.append(hit)
        return out
    with ThreadPoolExecutor(workers) as pool:
        while True:
            batch = list(islice(it, _BATCH * workers))
            if not batch:
                break
            out.extend(h for h in pool.map(check, batch) if h)
    return out
