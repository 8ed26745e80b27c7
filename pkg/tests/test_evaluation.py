import numpy as np
import pytest
from hypothesis import given, settings

from oracles import chain, simulate_average, stationary_by_eig, values_by_iteration, with_player
from stochgame import generators as G
from stochgame.errors import NonConvergent, NotUnichain, WrongMode
from stochgame.evaluation import (
    absorbing_value,
    average_reward_value,
    bellman_errors,
    best_response,
    evaluate,
    stationary_distribution,
    value_function,
)
from stochgame.game import Discount, GameBuilder, GameSpec, Strategy
from stochgame.instances import counterexample_formula, counterexample_game, counterexample_policies, bandit, g2, single_state_game
from stochgame.reductions import GadgetParams, CircuitSpec, Gate, gcircuit_build, node_strategy
from strategies import simsg_and_strategy, tbsg_and_strategy


def test_single_state_value_is_geometric_sum():
    spec = single_state_game()
    prof = value_function(spec, Strategy.uniform(spec))
    assert prof.V[0, 0] == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_counterexample_endpoint_values(lam):
    spec = counterexample_game()
    pi, pi_prime = counterexample_policies(spec)
    x = pi.to_vector(spec) * lam + pi_prime.to_vector(spec) * (1 - lam)
    V = value_function(spec, Strategy.from_vector(spec, x)).V
    assert V[0, spec.state_index("A")] == pytest.approx(counterexample_formula(lam), abs=1e-9)
    # closed forms quoted for the two endpoints
    assert counterexample_formula(0.0) == pytest.approx(63 / 147)
    assert counterexample_formula(1.0) == pytest.approx(28.6 / 67)


@given(simsg_and_strategy())
def test_value_matches_iteration_oracle_and_bound(case):
    spec, pi = case
    prof = value_function(spec, pi)
    assert np.allclose(prof.V, values_by_iteration(spec, pi), atol=1e-9)
    assert prof.residual <= 1e-10
    assert np.all(np.abs(prof.V) <= 1 / (1 - spec.gamma) + 1e-12)
    assert np.allclose(prof.u, prof.V.mean(axis=1))


def _absorbing_one_step(reward: float) -> GameSpec:
    b = GameBuilder(1)
    b.add_state("s")
    b.add_state("end")
    b.set_actions(0, "s", ["go"])
    b.set_actions(0, "end", ["stay"])
    b.set_transition("s", (0,), {"end": 1.0})
    b.set_reward(0, "s", (0,), reward)
    return b.build(Discount.absorbing("end"))


def test_absorbing_value_one_step_and_zero():
    for r in (1.0, 0.0):
        spec = _absorbing_one_step(r)
        V = absorbing_value(spec, Strategy.uniform(spec)).V
        assert V[0, 0] == pytest.approx(r)
        assert V[0, 1] == 0.0


def test_absorbing_value_rejects_trapped_mass():
    b = GameBuilder(1)
    for s in ("s", "end"):
        b.add_state(s)
        b.set_actions(0, s, ["a"])
    spec = b.build(Discount.absorbing("end"))
    with pytest.raises(NonConvergent):
        absorbing_value(spec, Strategy.uniform(spec))


def test_average_reward_constant_and_cycle():
    spec = single_state_game().replace(discount=Discount.average())
    assert average_reward_value(spec, Strategy.uniform(spec)).V[0, 0] == pytest.approx(1.0)
    b = GameBuilder(1)
    b.add_state("x")
    b.add_state("y")
    b.set_actions(0, "x", ["a"])
    b.set_actions(0, "y", ["a"])
    b.set_transition("x", (0,), {"y": 1.0})
    b.set_transition("y", (0,), {"x": 1.0})
    b.set_reward(0, "x", (0,), 1.0)
    spec = b.build(Discount.average())
    V = average_reward_value(spec, Strategy.uniform(spec)).V
    assert np.allclose(V, 0.5, atol=1e-9)


def test_average_reward_matches_simulation():
    spec = G.random_unichain(11, n=2, S=3)
    pi = G.random_strategy(12, spec)
    V = average_reward_value(spec, pi).V
    sim = simulate_average(spec, pi, 100_000, seed=5)
    assert np.allclose(V[:, 0], sim, atol=1e-2)
    P, _ = chain(spec, pi)
    assert np.allclose(stationary_distribution(P), stationary_by_eig(P), atol=1e-9)


def test_average_reward_multichain_rejected():
    b = GameBuilder(1)
    for s in ("x", "y"):
        b.add_state(s)
        b.set_actions(0, s, ["a"])
    spec = b.build(Discount.average())
    with pytest.raises(NotUnichain):
        average_reward_value(spec, Strategy.uniform(spec))


def test_evaluate_dispatch_and_mode_errors():
    spec = single_state_game()
    assert evaluate(spec, Strategy.uniform(spec)).V[0, 0] == pytest.approx(2.0)
    with pytest.raises(WrongMode):
        absorbing_value(spec, Strategy.uniform(spec))


def test_g2_bellman_error_of_move_at_stay_stay():
    spec = g2()
    pi = Strategy.pure(spec, {(0, 0): 0, (1, 1): 0})
    rep = bellman_errors(spec, pi)
    for i in range(2):
        psi = rep.psi[(i, i)]
        assert psi[0] == pytest.approx(0.0, abs=1e-12)
        assert psi[1] == pytest.approx(-1.0, abs=1e-12)
    assert rep.max_upsilon == pytest.approx(0.0, abs=1e-12)


def test_mdp_optimum_has_no_positive_bellman_error():
    spec = bandit((1.0, 0.3))
    policy, _ = best_response(spec, 0, Strategy.uniform(spec))
    pi = Strategy({(0, 0): policy[0]})
    assert max(p.max() for p in bellman_errors(spec, pi).psi.values()) <= 1e-10


def test_improvable_strategy_has_positive_upsilon():
    spec = g2()
    assert bellman_errors(spec, Strategy.pure(spec, {(0, 0): 1, (1, 1): 1})).max_upsilon > 0


@given(simsg_and_strategy())
def test_bellman_on_policy_identity(case):
    spec, pi = case
    rep = bellman_errors(spec, pi)
    for (i, s), psi in rep.psi.items():
        assert abs(float(pi[(i, s)] @ psi)) <= 1e-10
        assert np.array_equal(rep.upsilon[(i, s)], np.maximum(psi, 0))


def test_best_response_in_g2():
    spec = g2()
    policy, prof = best_response(spec, 0, Strategy.pure(spec, {(0, 0): 1, (1, 1): 0}))
    assert np.array_equal(policy[0], [1.0, 0.0])
    assert prof.V[0, 0] == pytest.approx(2.0)


def test_best_response_single_action():
    spec = single_state_game()
    policy, _ = best_response(spec, 0, Strategy.uniform(spec))
    assert np.array_equal(policy[0], [1.0])


def test_best_response_of_equal_gadget_out_player():
    params = GadgetParams(0.5, 0.25)
    spec, gmap = gcircuit_build(CircuitSpec(("x", "y"), (Gate("eq", ("x",), "y"),)), params)
    pi = node_strategy(spec, gmap, {"x": 0.5, "y": 0.5}, {0: 1.0})
    out = gmap.node_state["y"]
    policy, prof = best_response(spec, out, pi, "own")
    assert np.array_equal(policy[out], [1.0, 0.0])
    g, L = params.gamma, params.L
    assert prof.u[out] == pytest.approx(g ** (L + 1) / 4 / (1 - g**L), rel=1e-9)


@settings(max_examples=15)
@given(tbsg_and_strategy(max_n=2, max_S=3))
def test_best_response_beats_random_alternatives(case):
    spec, pi = case
    rng = np.random.default_rng(0)
    for i in range(spec.n):
        policy, prof = best_response(spec, i, pi)
        for _ in range(100):
            alt = {s: rng.dirichlet(np.ones(len(spec.actions[i][s]))) for s in spec.controlled_states(i)}
            other = values_by_iteration(spec, with_player(pi, i, alt))[i].mean()
            assert prof.u[i] >= other - 1e-9


@given(simsg_and_strategy())
def test_utility_lipschitz_bound(case):
    spec, pi = case
    rng = np.random.default_rng(1)
    other = _perturb(pi, 1e-3, rng)
    dist = np.max(np.abs(other.to_vector(spec) - pi.to_vector(spec)))
    A = spec.max_player_actions
    gap = np.max(np.abs(value_function(spec, other).u - value_function(spec, pi).u))
    assert gap <= A * dist / (1 - spec.gamma) ** 2 + 1e-12


def _perturb(pi, delta, rng):
    out = {}
    for c, x in pi.items():
        y = np.clip(x + rng.uniform(-delta, delta, len(x)), 0, None)
        out[c] = y / y.sum() if y.sum() > 0 else x
    return Strategy(out)
