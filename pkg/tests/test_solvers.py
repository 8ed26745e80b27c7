import math
import numpy as np
import pytest
from hypothesis import given, settings

from oracles import own_q, utility
from oracles import pure_ne as oracle_pure_ne
from stochgame import generators as G
from stochgame.errors import BudgetExceeded, NotTurnBased, WrongClass
from stochgame.game import Discount, GameBuilder, Strategy
from stochgame.instances import bandit, g2
from stochgame.solvers import (
    backward_induction,
    brouwer_fixed_point_solve,
    brouwer_map,
    brute_force_value_net,
    cycle_ne_graph,
    horizon,
    lp_policies_for_values,
    potential,
    pure_ne_enumerate,
    strategy_iteration_locreward,
    switch_bound,
)
from stochgame.solvers.brouwer import residual
from stochgame.solvers.locreward import padded_game
from strategies import seeds

STAY = {(0, 0): 0, (1, 1): 0}
MOVE = {(0, 0): 1, (1, 1): 1}


def choices(spec, pi):
    return tuple(int(np.argmax(pi[c])) for c in spec.coords)


# -- value net ---------------------------------------------------------------


def test_lp_policies_single_state():
    spec = bandit((1.0, 0.0))
    pi = lp_policies_for_values(spec, np.array([[2.0]]), 1e-6)
    assert pi is not None and pi[(0, 0)][0] == pytest.approx(1.0)
    assert lp_policies_for_values(spec, np.array([[0.0]]), 1e-6) is None


def test_lp_policies_at_exact_ne_values():
    spec = g2()
    V = np.array([[2.0, 0.0], [0.0, 2.0]])
    pi = lp_policies_for_values(spec, V, 1e-6)
    assert pi is not None
    assert choices(spec, pi) == (0, 0)


@settings(max_examples=20)
@given(seeds)
def test_planted_ne_values_are_lp_feasible(seed):
    spec = G.random_tbsg(seed, n=2, S=2, max_actions=2)
    hits = pure_ne_enumerate(spec, 0.0)
    for pi, _ in hits:
        from stochgame.evaluation import value_function

        V = value_function(spec, pi).V
        assert lp_policies_for_values(spec, V, 1e-9) is not None


def test_value_net_single_state():
    res = brute_force_value_net(bandit((1.0, 0.0)), 0.2)
    assert res.ok
    assert res.strategy[(0, 0)][0] == pytest.approx(1.0)


def test_value_net_recovers_stay_stay_on_g2():
    spec = g2()
    res = brute_force_value_net(spec, 0.25)
    assert res.ok
    assert choices(spec, res.strategy) == (0, 0)


def test_value_net_budget():
    spec = G.random_tbsg(3, n=1, S=3)
    with pytest.raises(BudgetExceeded) as info:
        brute_force_value_net(spec, 0.25, budget=10)
    assert info.value.required > 10


def test_value_net_rejects_simultaneous_games():
    with pytest.raises(NotTurnBased):
        brute_force_value_net(G.random_simsg(0, n=2, S=1, max_actions=2), 0.25)


# -- backward induction ------------------------------------------------------------


def test_horizon_formula():
    assert horizon(0.5, 0.1) == 6
    for gamma, eps in [(0.5, 0.01), (0.3, 0.2), (0.9, 0.05)]:
        assert horizon(gamma, eps) == math.ceil(math.log(1 / ((1 - gamma) * eps)) / (1 - gamma))


def test_backward_induction_on_g2_stays():
    spec = g2()
    res = backward_induction(spec, 0.1)
    assert res.ok and res.diagnostics["horizon"] == 6
    for step in res.strategy.steps:
        assert choices(spec, step) == (0, 0)


def test_backward_induction_single_player_chain_is_greedy():
    b = GameBuilder(1)
    for s in ("x", "y"):
        b.add_state(s)
    b.set_actions(0, "x", ["stay", "go"])
    b.set_actions(0, "y", ["stay"])
    b.set_transition("x", (0,), {"x": 1.0})
    b.set_transition("x", (1,), {"y": 1.0})
    b.set_transition("y", (0,), {"y": 1.0})
    b.set_reward(0, "x", (0,), 0.1)
    b.set_reward(0, "y", (0,), 1.0)
    spec = b.build(Discount.discounted(0.5))
    res = backward_induction(spec, 0.1)
    assert res.ok
    # one step before the end the myopic reward wins; earlier, moving to y pays off
    assert res.strategy.steps[-1][(0, 0)][0] == 1.0
    assert all(step[(0, 0)][1] == 1.0 for step in res.strategy.steps[:-1])


# -- strategy iteration --------------------------------------------------------------


def test_strategy_iteration_g2():
    spec = g2()
    res = strategy_iteration_locreward(spec, 0.1)
    assert res.ok and choices(spec, res.strategy) == (0, 0)
    assert res.diagnostics["sweeps"] <= 3


def test_strategy_iteration_g2_negative():
    spec = g2(sign=-1.0)
    res = strategy_iteration_locreward(spec, 0.1)
    assert res.ok
    exact = oracle_pure_ne(spec, 0.0, q="own")
    assert choices(spec, res.strategy) in exact


def test_strategy_iteration_from_fixed_point_has_no_switch():
    res = strategy_iteration_locreward(g2(), 0.1)
    assert res.iterations == 0 and res.diagnostics["sweeps"] == 1


@settings(max_examples=25)
@given(seeds)
def test_potential_rises_and_switches_respect_bound(seed):
    rng = np.random.default_rng(seed)
    sign = "NonNegative" if rng.random() < 0.5 else "NonPositive"
    spec = G.random_locreward(rng, n=3, sign=sign)
    eps = 0.05
    res = strategy_iteration_locreward(spec, eps)
    assert res.ok
    phi = res.diagnostics["potential"]
    step = math.log(1 + (1 - spec.gamma) * eps / 2)
    for a, b in zip(phi, phi[1:]):
        assert (b - a if sign == "NonNegative" else a - b) >= step - 1e-9
    assert res.iterations <= switch_bound(spec.n, spec.gamma, eps)


def test_potential_tracks_own_value_changes():
    spec = padded_game(G.random_locreward(1, n=3), 0.1, "NonNegative")
    pi = G.random_strategy(2, spec)
    for i in range(spec.n):
        s = spec.own_state(i)
        alt = dict(pi.items())
        alt[(i, s)] = np.eye(len(spec.actions[i][s]))[0]
        alt = Strategy(alt)
        dv = math.log(utility(spec, alt, own_q(spec, i))[i]) - math.log(utility(spec, pi, own_q(spec, i))[i])
        assert potential(spec, alt) - potential(spec, pi) == pytest.approx(dv, abs=1e-9)


# -- graph games ------------------------------------------------------------------


def graph_game(succ, sign=1.0, gamma=0.5):
    b = GameBuilder(len(succ))
    names = list(succ)
    for v in names:
        b.add_state(v)
    for i, v in enumerate(names):
        b.set_actions(i, v, [f"to_{w}" for w in succ[v]])
        for k, w in enumerate(succ[v]):
            b.set_transition(v, (k,), {w: 1.0})
            b.set_reward(i, v, (k,), sign)
    return b.build(Discount.discounted(gamma))


def test_cycle_shortest_on_small_graph():
    spec = graph_game({"A": ["A", "B"], "B": ["A"]})
    res = cycle_ne_graph(spec, "NonNegative")
    assert res.ok and res.certificate.max_gap <= 1e-12
    assert choices(spec, res.strategy) == (0, 0)
    assert choices(spec, res.strategy) in oracle_pure_ne(spec, 0.0, q="own")


def test_cycle_on_g2_graph():
    spec = g2()
    assert choices(spec, cycle_ne_graph(spec, "NonNegative").strategy) == (0, 0)
    neg = g2(sign=-1.0)
    res = cycle_ne_graph(neg, "NonPositive")
    assert res.ok and choices(neg, res.strategy) == (1, 1)


def test_cycle_rejects_wrong_class():
    with pytest.raises(WrongClass):
        cycle_ne_graph(G.random_locreward(0, n=3, sign="NonNegative"), "NonNegative")


@settings(max_examples=30)
@given(seeds)
def test_cycle_solvers_match_enumeration(seed):
    rng = np.random.default_rng(seed)
    sign = "NonNegative" if rng.random() < 0.5 else "NonPositive"
    spec = G.random_graph_game(rng, n=int(rng.integers(2, 6)), sign=sign)
    res = cycle_ne_graph(spec, sign)
    assert res.certificate.max_gap <= 1e-12
    hits = [choices(spec, pi) for pi, _ in pure_ne_enumerate(spec, 1e-12, q="own")]
    assert choices(spec, res.strategy) in hits


# -- Brouwer maps --------------------------------------------------------------------


def test_brouwer_map_fixed_at_exact_ne():
    spec = g2()
    pi = Strategy.pure(spec, STAY)
    for mode in ("value", "bellman"):
        assert residual(spec, pi, mode) == 0.0


def test_brouwer_map_moves_toward_stay():
    spec = g2()
    pi = Strategy.pure(spec, MOVE)
    for mode in ("value", "bellman"):
        y = brouwer_map(spec, pi, mode)
        assert y[(0, 0)][0] > 0 and y[(1, 1)][0] > 0


def test_brouwer_map_bandit_uniform():
    spec = bandit((1.0, 0.0), gamma=0.0)
    y = brouwer_map(spec, Strategy.uniform(spec), "value")
    assert y[(0, 0)][0] == pytest.approx(2 / 3, abs=1e-15)


def test_brouwer_solve_examples():
    spec = g2()
    res = brouwer_fixed_point_solve(spec, "value", init=Strategy.pure(spec, STAY))
    assert res.iterations == 0 and res.diagnostics["residual"] == 0.0
    res = brouwer_fixed_point_solve(spec, "value", eta=0.5)
    assert res.diagnostics["converged"] and res.ok
    assert choices(spec, res.strategy) == (0, 0)
    band = bandit((1.0, 0.0), gamma=0.0)
    res = brouwer_fixed_point_solve(band, "bellman", epsilon=1e-3)
    # mass on the optimal action approaches 1 only sublinearly as the gains vanish
    assert res.ok and res.strategy[(0, 0)][0] > 0.999


def test_brouwer_value_map_needs_ossg():
    with pytest.raises(WrongClass):
        brouwer_fixed_point_solve(G.random_simsg(0, n=2, S=2), "value", max_iters=1)


# -- enumeration ----------------------------------------------------------------------


def test_enumerate_g2():
    spec = g2()
    assert [choices(spec, pi) for pi, _ in pure_ne_enumerate(spec, 0.0)] == [(0, 0)]


def test_enumerate_zero_rewards():
    spec = g2()
    spec = spec.replace(rewards=[np.zeros_like(r) for r in spec.rewards])
    assert len(pure_ne_enumerate(spec, 0.0)) == 4


def test_enumerate_budget():
    with pytest.raises(BudgetExceeded):
        pure_ne_enumerate(g2(), 0.0, budget=3)


@settings(max_examples=20)
@given(seeds)
def test_enumerate_matches_oracle(seed):
    spec = G.random_tbsg(seed, n=2, S=3, max_actions=2)
    got = [choices(spec, pi) for pi, _ in pure_ne_enumerate(spec, 0.05)]
    assert got == oracle_pure_ne(spec, 0.05)


def test_enumerate_threads_match_serial():
    spec = G.random_tbsg(7, n=3, S=4, max_actions=3)
    a = [choices(spec, pi) for pi, _ in pure_ne_enumerate(spec, 0.1, workers=1)]
    b = [choices(spec, pi) for pi, _ in pure_ne_enumerate(spec, 0.1, workers=4)]
    assert a == b


@settings(max_examples=20)
@given(seeds)
def test_refinement_reaches_exact_ne(seed):
    spec = G.random_locreward(seed, n=3, sign="NonNegative")
    res = strategy_iteration_locreward(spec, 0.05)
    assert choices(spec, res.strategy) in oracle_pure_ne(spec, 0.0, q="own")
    plain = strategy_iteration_locreward(spec, 0.05, refine=False)
    assert plain.ok and plain.iterations == res.iterations
    assert plain.diagnostics["refine_switches"] == 0
