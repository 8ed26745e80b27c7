"""Small named games used in examples, tests and the CLI."""

from __future__ import annotations

from fractions import Fraction

from .game import Discount, GameBuilder, GameSpec, Strategy


def single_state_game(reward: float = 1.0, gamma: float = 0.5) -> GameSpec:
    """One player, one state, one action with reward ``reward``."""
    b = GameBuilder(1)
    b.add_state("s")
    b.set_actions(0, "s", ["a"])
    b.set_reward(0, "s", (0,), reward)
    return b.build(Discount.discounted(gamma))


def bandit(rewards=(1.0, 0.0), gamma: float = 0.5) -> GameSpec:
    """One player, one state, self-looping actions with the given rewards.

    ``gamma=0`` is allowed here to model a one-shot bandit even though
    validate_game requires gamma in (0, 1).
    """
    b = GameBuilder(1)
    b.add_state("s")
    b.set_actions(0, "s", [f"a{k + 1}" for k in range(len(rewards))])
    for k, r in enumerate(rewards):
        b.set_reward(0, "s", (k,), r)
    return b.build(Discount.discounted(gamma))


def g2(gamma: float = 0.5, sign: float = 1.0) -> GameSpec:
    """Two players, each owning one state with actions stay/move and own-state reward ``sign``."""
    b = GameBuilder(2)
    states = ["s1", "s2"]
    for s in states:
        b.add_state(s)
    for i, s in enumerate(states):
        other = states[1 - i]
        b.set_actions(i, s, ["stay", "move"])
        b.set_transition(s, (0,), {s: 1.0})
        b.set_transition(s, (1,), {other: 1.0})
        b.set_reward(i, s, (0,), sign)
        b.set_reward(i, s, (1,), sign)
    return b.build(Discount.discounted(gamma))


def counterexample_game() -> GameSpec:
    """Two-player TBSG where player 1 controls {A, B}; pseudo-linearity fails along a segment.

    Rewards of player 1 at A are (1.1, 1) for actions (1, 2), scaled by
    (1 - gamma) = 1/6 so values stay within the reward bound.  With this
    choice V_1(A) along lambda*pi + (1 - lambda)*pi' equals
    (63 - 37 lambda)(1 + 0.1 lambda)/(4 lambda^2 - 84 lambda + 147).
    """
    f = lambda a, b: float(Fraction(a, b))  # noqa: E731
    b = GameBuilder(2)
    for s in "ABC":
        b.add_state(s)
    b.set_actions(0, "A", ["1", "2"])
    b.set_actions(0, "B", ["1", "2"])
    b.set_actions(1, "C", ["1", "2"])
    b.set_transition("A", (0,), {"A": f(2, 5), "B": f(1, 5), "C": f(2, 5)})
    b.set_transition("A", (1,), {"A": f(1, 5), "B": f(2, 5), "C": f(2, 5)})
    b.set_transition("B", (0,), {"A": f(1, 15), "B": f(4, 5), "C": f(2, 15)})
    b.set_transition("B", (1,), {"A": f(2, 5), "B": f(1, 5), "C": f(2, 5)})
    b.set_transition("C", (0,), {"A": f(2, 5), "B": f(2, 5), "C": f(1, 5)})
    b.set_transition("C", (1,), {"A": f(2, 5), "B": f(2, 5), "C": f(1, 5)})
    b.set_reward(0, "A", (0,), 1.1 / 6)
    b.set_reward(0, "A", (1,), 1.0 / 6)
    return b.build(Discount.discounted(5 / 6))


def counterexample_policies(spec: GameSpec) -> tuple[Strategy, Strategy]:
    """The two strategies pi = (e1, e1, e2) and pi' = (e2, e2, e2)."""
    A, B, C = (spec.state_index(s) for s in "ABC")
    pi = Strategy.pure(spec, {(0, A): 0, (0, B): 0, (1, C): 1})
    pi_prime = Strategy.pure(spec, {(0, A): 1, (0, B): 1, (1, C): 1})
    return pi, pi_prime


def counterexample_formula(lam: float) -> float:
    return (63 - 37 * lam) * (1 + 0.1 * lam) / (4 * lam**2 - 84 * lam + 147)
