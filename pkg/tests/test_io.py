import json

import numpy as np
import pytest
from hypothesis import given, settings

from stochgame import io
from stochgame.errors import DimensionMismatch, InvalidCircuit, InvalidGame
from stochgame.game import Strategy, validate_game
from stochgame.instances import counterexample_game, g2
from stochgame.reductions import CircuitSpec, DirectedGraph, Gate
from strategies import simsg_and_strategy, tbsg_and_strategy


def same_game(a, b):
    assert a.n == b.n and a.states == b.states and a.discount == b.discount
    assert [list(map(list, r)) for r in a.actions] == [list(map(list, r)) for r in b.actions]
    for s in range(a.num_states):
        assert np.array_equal(a.transitions[s], b.transitions[s])
        assert np.array_equal(a.rewards[s], b.rewards[s])


@settings(max_examples=40)
@given(simsg_and_strategy())
def test_game_round_trip_is_bit_exact(case):
    spec, pi = case
    text = io.dumps(io.game_to_dict(spec))
    back = io.game_from_dict(json.loads(text))
    same_game(spec, back)
    assert io.dumps(io.game_to_dict(back)) == text
    pdoc = json.loads(io.dumps(io.strategy_to_dict(spec, pi)))
    assert io.strategy_from_dict(back, pdoc) == pi


@settings(max_examples=20)
@given(tbsg_and_strategy())
def test_turn_based_round_trip(case):
    spec, _ = case
    same_game(spec, io.game_from_dict(io.game_to_dict(spec)))


def test_fraction_game_round_trip():
    spec = counterexample_game()
    same_game(spec, io.game_from_dict(json.loads(io.dumps(io.game_to_dict(spec)))))


def test_sparse_output():
    doc = io.game_to_dict(g2())
    assert all(all(p > 0 for p in t["dist"].values()) for t in doc["transitions"])
    assert all(r["r"] != 0 for r in doc["rewards"])
    assert doc["discount"] == {"mode": "discounted", "gamma": 0.5}


def test_slightly_off_rows_are_renormalized():
    doc = io.game_to_dict(g2())
    entry = doc["transitions"][0]
    (t,) = entry["dist"]
    entry["dist"] = {t: 1.0 + 5e-10}
    spec = io.game_from_dict(doc)
    assert spec.transitions[0][0].sum() == 1.0
    assert validate_game(spec).ok


def test_badly_off_rows_are_kept_for_validation():
    doc = io.game_to_dict(g2())
    entry = doc["transitions"][0]
    (t,) = entry["dist"]
    entry["dist"] = {t: 0.9}
    spec = io.game_from_dict(doc)
    assert not validate_game(spec).ok


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("transitions"),
        lambda d: d["actions"].update({"7": {"s1": ["x"]}}),
        lambda d: d["transitions"].pop(),
        lambda d: d["transitions"][0]["joint"].update({"1": "fly"}),
        lambda d: d["transitions"][0]["dist"].update({"nowhere": 0.1}),
        lambda d: d.update(discount={"mode": "weird"}),
        lambda d: d["controllers"].update({"s1": ["1", "2"]}),
    ],
)
def test_malformed_games(mutate):
    doc = io.game_to_dict(g2())
    mutate(doc)
    with pytest.raises(InvalidGame):
        io.game_from_dict(doc)


def test_strategy_errors():
    spec = g2()
    with pytest.raises(InvalidGame):
        io.strategy_from_dict(spec, {"policies": [{"player": "1", "state": "s2", "dist": {"stay": 1}}]})
    with pytest.raises(InvalidGame):
        io.strategy_from_dict(spec, {"policies": [{"player": "1", "state": "s1", "dist": {"fly": 1}}]})
    with pytest.raises(DimensionMismatch):
        io.strategy_from_dict(spec, {"policies": [{"player": "1", "state": "s1", "dist": {"stay": 1}}]})


def test_strategy_missing_actions_default_to_zero():
    spec = g2()
    doc = {"policies": [{"player": "1", "state": "s1", "dist": {"move": 1}}, {"player": "2", "state": "s2", "dist": {"stay": 1}}]}
    pi = io.strategy_from_dict(spec, doc)
    assert pi == Strategy.pure(spec, {(0, 0): 1, (1, 1): 0})


def test_circuit_and_graph_round_trip():
    c = CircuitSpec(("a", "b"), (Gate("mul", ("a",), "b", 0.5),))
    assert io.circuit_from_dict(io.circuit_to_dict(c)) == c
    g = DirectedGraph(("1", "2"), (("1", "2"), ("2", "1")))
    assert io.graph_from_dict(io.graph_to_dict(g)) == g
    with pytest.raises(InvalidCircuit):
        io.circuit_from_dict({"nodes": ["a"]})


def test_dumps_is_canonical():
    text = io.dumps({"b": 1, "a": [0.1]})
    assert text.endswith("\n") and text.index('"a"') < text.index('"b"')
    with pytest.raises(ValueError):
        io.dumps({"x": float("nan")})
