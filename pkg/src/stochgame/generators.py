"""Seeded random instances for tests, benchmarks and the CLI."""

from __future__ import annotations

import numpy as np

from .game import Discount, GameSpec, Strategy


def _rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _dist(rng: np.random.Generator, size: int, sparse: bool = False) -> np.ndarray:
    """Random point of the simplex; ``sparse`` zeroes out a random subset first."""
    x = rng.dirichlet(np.ones(size))
    if sparse and size > 1:
        keep = rng.random(size) < 0.5
        keep[rng.integers(size)] = True
        x = np.where(keep, x, 0.0)
        x /= x.sum()
    return x


def _assemble(
    rng: np.random.Generator,
    n: int,
    S: int,
    action_counts: list[list[int]],
    discount: Discount,
    reward_fn,
    trans_fn,
) -> GameSpec:
    actions = [[[f"a{k + 1}" for k in range(action_counts[i][s])] for s in range(S)] for i in range(n)]
    trans, rews = [], []
    for s in range(S):
        J = int(np.prod([c[s] for c in action_counts if c[s]], dtype=int))
        trans.append(np.array([trans_fn(s) for _ in range(J)]).reshape(J, S))
        rews.append(reward_fn(s, J))
    return GameSpec(n, [f"s{s + 1}" for s in range(S)], actions, trans, rews, discount)


def random_simsg(
    seed=None, n: int = 2, S: int = 2, max_actions: int = 2, gamma: float = 0.5, sparse: bool = True
) -> GameSpec:
    """Every player acts at every state with 1..max_actions actions; rewards in [-1, 1]."""
    rng = _rng(seed)
    counts = [[int(rng.integers(1, max_actions + 1)) for _ in range(S)] for _ in range(n)]
    return _assemble(
        rng, n, S, counts, Discount.discounted(gamma),
        lambda s, J: rng.uniform(-1, 1, (n, J)),
        lambda s: _dist(rng, S, sparse),
    )


def random_tbsg(
    seed=None, n: int = 2, S: int = 3, max_actions: int = 2, gamma: float = 0.5, sparse: bool = True
) -> GameSpec:
    """One random controller per state (every player owns at least one state when S >= n)."""
    rng = _rng(seed)
    owner = list(range(n)) + [int(rng.integers(n)) for _ in range(max(0, S - n))]
    owner = [owner[k] for k in rng.permutation(len(owner))][:S]
    counts = [[int(rng.integers(1, max_actions + 1)) if owner[s] == i else 0 for s in range(S)] for i in range(n)]
    return _assemble(
        rng, n, S, counts, Discount.discounted(gamma),
        lambda s, J: rng.uniform(-1, 1, (n, J)),
        lambda s: _dist(rng, S, sparse),
    )


def random_ossg(
    seed=None, n: int = 3, max_actions: int = 3, gamma: float = 0.5, shared: bool = True, sparse: bool = True
) -> GameSpec:
    """Each player controls exactly one state.

    With ``shared`` the players are spread over fewer states so that some
    states are controlled simultaneously; otherwise player i owns state i.
    """
    rng = _rng(seed)
    S = max(1, int(rng.integers(1, n + 1))) if shared else n
    home = [i % S for i in range(n)] if shared else list(range(n))
    counts = [[int(rng.integers(1, max_actions + 1)) if home[i] == s else 0 for s in range(S)] for i in range(n)]
    return _assemble(
        rng, n, S, counts, Discount.discounted(gamma),
        lambda s, J: rng.uniform(-1, 1, (n, J)),
        lambda s: _dist(rng, S, sparse),
    )


def random_otbsg(seed=None, n: int = 3, max_actions: int = 3, gamma: float = 0.5, sparse: bool = True) -> GameSpec:
    return random_ossg(seed, n, max_actions, gamma, shared=False, sparse=sparse)


def random_locreward(
    seed=None,
    n: int = 3,
    max_actions: int = 3,
    gamma: float = 0.5,
    sign: str = "NonNegative",
    deterministic: bool = False,
    action_independent: bool = False,
) -> GameSpec:
    """Player i owns state i and is rewarded only there, with the given sign."""
    rng = _rng(seed)
    counts = [[int(rng.integers(1, max_actions + 1)) if i == s else 0 for s in range(n)] for i in range(n)]
    scale = 1.0 if sign == "NonNegative" else -1.0

    def rewards(s: int, J: int) -> np.ndarray:
        r = np.zeros((n, J))
        r[s] = rng.uniform(0.05, 1, 1 if action_independent else J) * scale
        return r

    def step(s: int) -> np.ndarray:
        if deterministic:
            return np.eye(n)[rng.integers(n)]
        return _dist(rng, n, sparse=True)

    return _assemble(rng, n, n, counts, Discount.discounted(gamma), rewards, step)


def random_graph_game(
    seed=None, n: int = 5, max_out: int = 3, gamma: float = 0.5, sign: str = "NonNegative"
) -> GameSpec:
    """Deterministic LocReward game on a random digraph; each action follows a distinct out-edge."""
    rng = _rng(seed)
    targets = [rng.choice(n, size=int(rng.integers(1, min(max_out, n) + 1)), replace=False) for _ in range(n)]
    scale = 1.0 if sign == "NonNegative" else -1.0
    actions = [[[f"to_s{t + 1}" for t in targets[i]] if i == s else [] for s in range(n)] for i in range(n)]
    trans, rews = [], []
    for s in range(n):
        trans.append(np.eye(n)[targets[s]])
        r = np.zeros((n, len(targets[s])))
        r[s] = scale * rng.uniform(0.05, 1)
        rews.append(r)
    return GameSpec(n, [f"s{s + 1}" for s in range(n)], actions, trans, rews, Discount.discounted(gamma))


def random_unichain(seed=None, n: int = 2, S: int = 3, max_actions: int = 2) -> GameSpec:
    """Average-reward SimSG with strictly positive transitions, hence unichain under every strategy."""
    rng = _rng(seed)
    counts = [[int(rng.integers(1, max_actions + 1)) for _ in range(S)] for _ in range(n)]
    return _assemble(
        rng, n, S, counts, Discount.average(),
        lambda s, J: rng.uniform(-1, 1, (n, J)),
        lambda s: 0.5 * _dist(rng, S) + 0.5 / S,
    )


def random_strategy(seed, spec: GameSpec, pure: bool = False) -> Strategy:
    """Uniformly random mixed (or pure) stationary strategy."""
    rng = _rng(seed)
    policies = {}
    for i, s in spec.coords:
        m = len(spec.actions[i][s])
        policies[(i, s)] = np.eye(m)[rng.integers(m)] if pure else rng.dirichlet(np.ones(m))
    return Strategy(policies)
