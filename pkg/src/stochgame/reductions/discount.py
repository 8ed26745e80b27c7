"""Discount-mode transforms: discounted to absorbing (or larger discount) and average to discounted."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BadDiscountPair, WrongMode
from ..game import Discount, GameSpec, Strategy, induced_chain
from ..evaluation import stationary_distribution

SINK = "s0"


def discounted_to_absorbing(spec: GameSpec, gamma_prime: float = 1.0) -> tuple[GameSpec, dict[str, str]]:
    """Rescale transitions by gamma/gamma' and send the rest to a new zero-reward sink.

    The sink is controlled by a new last player with one action.  The result
    is absorbing when gamma' = 1 and discounted with gamma' otherwise; in
    both cases values from every original state are unchanged.
    """
    if spec.discount.mode != "discounted":
        raise WrongMode("input must be discounted")
    gamma = spec.gamma
    if not gamma < gamma_prime <= 1.0:
        raise BadDiscountPair(f"need gamma={gamma} < gamma'={gamma_prime} <= 1")
    sink = SINK
    while sink in spec.states:
        sink = "_" + sink
    S = spec.num_states
    ratio = gamma / gamma_prime
    trans, rews = [], []
    for s in range(S):
        t = np.zeros((spec.num_joint(s), S + 1))
        t[:, :S] = ratio * spec.transitions[s]
        t[:, S] += 1.0 - ratio
        trans.append(t)
        rews.append(np.vstack([spec.rewards[s], np.zeros((1, spec.num_joint(s)))]))
    trans.append(np.eye(S + 1)[S:])
    rews.append(np.zeros((spec.n + 1, 1)))
    actions = [list(row) + [[]] for row in spec.actions]
    actions.append([[] for _ in range(S)] + [["a0"]])
    discount = Discount.absorbing(sink) if gamma_prime == 1.0 else Discount.discounted(gamma_prime)
    out = GameSpec(spec.n + 1, list(spec.states) + [sink], actions, trans, rews, discount)
    return out, {s: s for s in spec.states} | {"sink": sink}


def extend_strategy(strategy: Strategy, spec: GameSpec) -> Strategy:
    """Strategy for the transformed game: original policies plus the sink player's only action."""
    p = dict(strategy.items())
    p[(spec.n, spec.num_states)] = np.ones(1)
    return Strategy(p)


@dataclass(frozen=True)
class DiscountAdvice:
    gamma: float
    required_epsilon: float
    target_epsilon: float

    def text(self) -> str:
        return (
            f"an {self.required_epsilon:.6g}-approximate NE of the discounted game "
            f"is an {self.target_epsilon:.6g}-approximate NE of the average-reward game"
        )


def average_to_discounted(spec: GameSpec, t_mix: float, epsilon: float) -> tuple[GameSpec, DiscountAdvice]:
    """Same game with discount 1 - eps/(9 t_mix) and the accuracy needed there."""
    if spec.discount.mode != "average":
        raise WrongMode("input must be an average-reward game")
    if t_mix <= 0 or epsilon <= 0:
        raise ValueError("t_mix and epsilon must be positive")
    gamma = 1.0 - epsilon / (9.0 * t_mix)
    out = spec.replace(discount=Discount.discounted(gamma))
    return out, DiscountAdvice(gamma, epsilon / (3.0 * (1.0 - gamma)), epsilon)


def mixing_time(spec: GameSpec, strategy: Strategy, max_t: int = 100_000) -> int:
    """Smallest t with max_s ||P^t(s, .) - lambda||_1 <= 1/2 for the induced chain."""
    P = induced_chain(spec, strategy).P
    lam = stationary_distribution(P)
    M = np.eye(P.shape[0])
    for t in range(1, max_t + 1):
        M = M @ P
        if np.max(np.abs(M - lam).sum(axis=1)) <= 0.5:
            return t
    raise ValueError("chain did not mix within max_t steps")
