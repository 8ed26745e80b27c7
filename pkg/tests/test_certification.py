import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import deviation_gaps as oracle_gaps
from stochgame import generators as G
from stochgame.certification import (
    check_bellman_ne,
    deviation_gap,
    nonstationary_certify,
    pseudo_linearity_probe,
)
from stochgame.errors import DegenerateSegment, HorizonTooShort
from stochgame.game import NonStationaryStrategy, Strategy
from stochgame.instances import counterexample_formula, counterexample_game, counterexample_policies, bandit, g2
from stochgame.solvers import backward_induction, pure_ne_enumerate
from strategies import ossg_and_strategy, seeds, tbsg_and_strategy

STAY = {(0, 0): 0, (1, 1): 0}
MOVE = {(0, 0): 1, (1, 1): 1}


def test_g2_stay_stay_is_exact():
    spec = g2()
    cert = deviation_gap(spec, Strategy.pure(spec, STAY))
    assert cert.max_gap <= 1e-12 and cert.verdict
    assert check_bellman_ne(spec, Strategy.pure(spec, STAY), 0.0, "exact").verdict


def test_g2_move_move_has_positive_gaps():
    spec = g2()
    cert = deviation_gap(spec, Strategy.pure(spec, MOVE), epsilon=0.1)
    assert all(g > 0 for g in cert.gaps)
    assert not cert.verdict
    assert cert.witness is not None
    assert cert.to_dict(spec)["witness"]["action"] == "stay"


def test_single_player_optimum_has_zero_gap():
    spec = bandit((0.2, 0.9))
    assert deviation_gap(spec, Strategy({(0, 0): [0.0, 1.0]})).max_gap == 0.0


def test_verdict_threshold_includes_slack():
    spec = g2()
    pi = Strategy.pure(spec, MOVE)
    gap = deviation_gap(spec, pi).max_gap
    assert deviation_gap(spec, pi, epsilon=gap - 5e-11).verdict
    assert not deviation_gap(spec, pi, epsilon=gap - 2e-10).verdict


@settings(max_examples=25)
@given(tbsg_and_strategy(max_n=2, max_S=3))
def test_deviation_gap_matches_enumeration_oracle(case):
    spec, pi = case
    cert = deviation_gap(spec, pi)
    assert np.allclose(cert.gaps, oracle_gaps(spec, pi), atol=1e-9)


@settings(max_examples=25)
@given(ossg_and_strategy(max_n=3))
def test_deviation_gap_own_state_matches_oracle(case):
    spec, pi = case
    cert = deviation_gap(spec, pi, q="own")
    assert np.allclose(cert.gaps, oracle_gaps(spec, pi, q="own"), atol=1e-9)


@given(tbsg_and_strategy(), st.sampled_from([0.01, 0.1, 0.5]))
def test_bellman_conditions_sandwich_deviation_gap(case, eps):
    spec, pi = case
    gap = deviation_gap(spec, pi).max_gap
    if check_bellman_ne(spec, pi, eps, "sufficient").verdict:
        assert gap <= eps + 1e-8
    if gap <= eps:
        assert check_bellman_ne(spec, pi, eps, "necessary").verdict


def test_necessary_failure_implies_large_gap():
    spec = g2()
    pi = Strategy.pure(spec, MOVE)
    assert not check_bellman_ne(spec, pi, 0.1, "necessary").verdict
    assert deviation_gap(spec, pi).max_gap > 0.1


def test_enumerated_exact_ne_certify():
    for seed in range(5):
        spec = G.random_otbsg(seed, n=3, max_actions=2)
        for pi, _ in pure_ne_enumerate(spec, 0.0):
            assert deviation_gap(spec, pi).max_gap <= 1e-10


@settings(max_examples=20)
@given(seeds, st.sampled_from([0.05, 0.2]))
def test_ne_notion_equivalence_on_otbsg(seed, eps):
    spec = G.random_otbsg(seed, n=3, max_actions=2)
    pi = G.random_strategy(seed, spec)
    uni = deviation_gap(spec, pi).max_gap
    own = deviation_gap(spec, pi, q="own").max_gap
    S = spec.num_states
    if uni <= eps:
        assert own <= S * eps + 1e-9
    if own <= eps:
        assert uni <= eps / (1 - spec.gamma) + 1e-9


@settings(max_examples=30)
@given(ossg_and_strategy(), seeds)
def test_pseudo_linearity_on_ossg(case, seed):
    spec, ctx = case
    rng = np.random.default_rng(seed)
    i = int(rng.integers(spec.n))
    s = spec.own_state(i)
    m = len(spec.actions[i][s])
    a, b = {s: rng.dirichlet(np.ones(m))}, {s: rng.dirichlet(np.ones(m))}
    try:
        rep = pseudo_linearity_probe(spec, i, a, b, ctx, np.linspace(0.1, 0.9, 9))
    except DegenerateSegment as exc:
        assert exc.report.degenerate
        return
    assert rep.all_in_bounds and rep.monotone


def test_probe_ratio_at_theta_one_is_one():
    spec = g2()
    ctx = Strategy.uniform(spec)
    rep = pseudo_linearity_probe(spec, 0, {0: [1.0, 0.0]}, {0: [0.0, 1.0]}, ctx, [1.0])
    assert rep.ratios[0] == pytest.approx(1.0, abs=1e-15)


def test_probe_degenerate_segment():
    spec = g2()
    with pytest.raises(DegenerateSegment):
        pseudo_linearity_probe(spec, 0, {0: [1.0, 0.0]}, {0: [1.0, 0.0]}, Strategy.uniform(spec), [0.5])


def test_probe_exhibits_counterexample_failure():
    spec = counterexample_game()
    pi, pi_prime = counterexample_policies(spec)
    A = spec.state_index("A")
    rep = pseudo_linearity_probe(
        spec, 0, pi_prime.player_policy(0), pi.player_policy(0), pi, [0.25, 0.5, 0.75], q=np.eye(3)[A]
    )
    assert rep.utilities[1] == pytest.approx(counterexample_formula(0.5), abs=1e-9)
    assert rep.utilities[1] == pytest.approx(0.440801, abs=1e-6)
    assert rep.utilities[1] > max(rep.u_start, rep.u_end)
    assert not rep.monotone


def test_nonstationary_certify_examples():
    spec = g2()
    res = backward_induction(spec, 0.1)
    assert nonstationary_certify(spec, res.strategy, 0.1).verdict
    short = NonStationaryStrategy(res.strategy.steps[:1], res.strategy.tail)
    with pytest.raises(HorizonTooShort):
        nonstationary_certify(spec, short, 1e-6)
    bad_first = Strategy.pure(spec, MOVE)
    broken = NonStationaryStrategy((bad_first,) + res.strategy.steps[1:], res.strategy.tail)
    cert = nonstationary_certify(spec, broken, 0.1)
    assert not cert.verdict
    assert cert.witness[0] == 1
    assert cert.to_dict(spec)["witness"]["step"] == 1
