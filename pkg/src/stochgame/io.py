"""JSON formats for games, strategies, circuits, graphs and reports."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InvalidCircuit, InvalidGame
from .game import RENORMALIZE_TOL, SIMPLEX_TOL, Discount, GameSpec, Strategy
from .reductions.gadgets import CircuitSpec, Gate
from .reductions.hamiltonian import DirectedGraph

SCHEMA_VERSION = 1


def dumps(doc: Any) -> str:
    """Canonical text: sorted keys, shortest round-trip floats, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _pid(i: int) -> str:
    return str(i + 1)


# -- games ---------------------------------------------------------------


def game_to_dict(spec: GameSpec) -> dict:
    """Game document; only non-zero rewards and positive transition entries are written."""
    d = spec.discount
    discount: dict[str, Any] = {"mode": d.mode}
    if d.mode == "discounted":
        discount["gamma"] = float(d.gamma)
    if d.mode == "absorbing":
        discount["absorbing_state"] = d.absorbing_state
    controllers = {spec.states[s]: [_pid(i) for i in spec.controllers[s]] for s in range(spec.num_states)}
    actions = {
        _pid(i): {spec.states[s]: list(spec.actions[i][s]) for s in spec.controlled_states(i)}
        for i in range(spec.n)
    }
    transitions, rewards = [], []
    for s, name in enumerate(spec.states):
        ctrl = spec.controllers[s]
        for j, joint in enumerate(spec.joint_actions(s)):
            jd = {_pid(i): spec.actions[i][s][a] for i, a in zip(ctrl, joint)}
            row = spec.transitions[s][j]
            dist = {spec.states[t]: float(row[t]) for t in np.flatnonzero(row)}
            transitions.append({"state": name, "joint": jd, "dist": dist})
            for i in range(spec.n):
                r = float(spec.rewards[s][i, j])
                if r != 0.0:
                    rewards.append({"player": _pid(i), "state": name, "joint": dict(jd), "r": r})
    return {
        "players": spec.n,
        "states": list(spec.states),
        "controllers": controllers,
        "actions": actions,
        "transitions": transitions,
        "rewards": rewards,
        "discount": discount,
    }


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidGame(msg)


def game_from_dict(doc: dict) -> GameSpec:
    """Parse a game document.

    Transition rows whose sum is off by more than 1e-12 but at most 1e-9
    are renormalized; rows already within 1e-12 are kept bit-for-bit and
    larger deviations are kept so that validation can report them.
    """
    try:
        n = int(doc["players"])
        states = [str(s) for s in doc["states"]]
        S = len(states)
        sidx = {s: k for k, s in enumerate(states)}
        _require(len(sidx) == S, "duplicate state identifiers")
        actions = [[[] for _ in range(S)] for _ in range(n)]
        for p, per_state in doc["actions"].items():
            i = int(p) - 1
            _require(0 <= i < n, f"unknown player {p!r}")
            for s, names in per_state.items():
                _require(s in sidx, f"unknown state {s!r}")
                actions[i][sidx[s]] = [str(a) for a in names]
        for s, ctrl in doc.get("controllers", {}).items():
            _require(s in sidx, f"unknown state {s!r}")
            listed = sorted(int(p) - 1 for p in ctrl)
            actual = [i for i in range(n) if actions[i][sidx[s]]]
            _require(listed == actual, f"controllers of state {s!r} disagree with the action sets")
        shapes = [[i for i in range(n) if actions[i][s]] for s in range(S)]

        def joint_index(s: int, joint: dict) -> int:
            ctrl = shapes[s]
            _require(sorted(int(p) - 1 for p in joint) == ctrl, f"joint action at state {states[s]!r} names the wrong players")
            idx = 0
            for i in ctrl:
                a = str(joint[_pid(i)])
                _require(a in actions[i][s], f"unknown action {a!r} at state {states[s]!r}")
                idx = idx * len(actions[i][s]) + actions[i][s].index(a)
            return idx

        trans = [np.full((int(np.prod([len(actions[i][s]) for i in shapes[s]], dtype=int)), S), np.nan) for s in range(S)]
        for entry in doc["transitions"]:
            s = sidx[entry["state"]]
            j = joint_index(s, entry["joint"])
            row = np.zeros(S)
            for t, p in entry["dist"].items():
                _require(t in sidx, f"unknown state {t!r}")
                row[sidx[t]] += float(p)
            total = row.sum()
            if np.all(row >= -SIMPLEX_TOL) and SIMPLEX_TOL < abs(total - 1.0) <= RENORMALIZE_TOL:
                row = np.maximum(row, 0.0) / total
            trans[s][j] = row
        for s in range(S):
            _require(not np.isnan(trans[s]).any(), f"missing transition at state {states[s]!r}")
        rews = [np.zeros((n, t.shape[0])) for t in trans]
        for entry in doc.get("rewards", []):
            i = int(entry["player"]) - 1
            _require(0 <= i < n, f"unknown player {entry['player']!r}")
            s = sidx[entry["state"]]
            rews[s][i, joint_index(s, entry["joint"])] = float(entry["r"])
        dd = doc["discount"]
        mode = dd["mode"]
        if mode == "discounted":
            discount = Discount.discounted(float(dd["gamma"]))
        elif mode == "absorbing":
            discount = Discount.absorbing(str(dd["absorbing_state"]))
        elif mode == "average":
            discount = Discount.average()
        else:
            raise InvalidGame(f"unknown discount mode {mode!r}")
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InvalidGame(f"malformed game document: {exc!r}") from exc
    return GameSpec(n, states, actions, trans, rews, discount)


def load_game(path: str | Path) -> GameSpec:
    return game_from_dict(load_json(path))


# -- strategies ----------------------------------------------------------


def strategy_to_dict(spec: GameSpec, strategy: Strategy) -> dict:
    policies = []
    for i, s in spec.coords:
        names = spec.actions[i][s]
        policies.append(
            {"player": _pid(i), "state": spec.states[s], "dist": {a: float(p) for a, p in zip(names, strategy[(i, s)])}}
        )
    return {"schema_version": SCHEMA_VERSION, "policies": policies}


def strategy_from_dict(spec: GameSpec, doc: dict) -> Strategy:
    """Parse a strategy document; missing actions get probability 0."""
    try:
        policies = {}
        for entry in doc["policies"]:
            i = int(entry["player"]) - 1
            s = spec.state_index(str(entry["state"]))
            names = spec.actions[i][s] if 0 <= i < spec.n else ()
            _require(bool(names), f"player {entry['player']} has no actions at {entry['state']!r}")
            x = np.zeros(len(names))
            for a, p in entry["dist"].items():
                _require(a in names, f"unknown action {a!r}")
                x[names.index(a)] = float(p)
            policies[(i, s)] = x
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidGame(f"malformed strategy document: {exc!r}") from exc
    pi = Strategy(policies)
    pi.check(spec)
    return pi


def load_strategy(spec: GameSpec, path: str | Path) -> Strategy:
    return strategy_from_dict(spec, load_json(path))


# -- circuits and graphs -------------------------------------------------


def circuit_from_dict(doc: dict) -> CircuitSpec:
    try:
        gates = [
            Gate(
                str(g["kind"]).lower(),
                tuple(str(v) for v in g.get("in", [])),
                str(g["out"]),
                None if g.get("alpha") is None else float(g["alpha"]),
            )
            for g in doc["gates"]
        ]
        return CircuitSpec(tuple(str(v) for v in doc["nodes"]), tuple(gates))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidCircuit(f"malformed circuit document: {exc!r}") from exc


def circuit_to_dict(circuit: CircuitSpec) -> dict:
    gates = []
    for g in circuit.gates:
        d = {"kind": g.kind, "in": list(g.inputs), "out": g.output}
        if g.alpha is not None:
            d["alpha"] = g.alpha
        gates.append(d)
    return {"nodes": list(circuit.nodes), "gates": gates}


def graph_from_dict(doc: dict) -> DirectedGraph:
    try:
        return DirectedGraph(tuple(doc["vertices"]), tuple((a, b) for a, b in doc["edges"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidGame(f"malformed graph document: {exc!r}") from exc


def graph_to_dict(graph: DirectedGraph) -> dict:
    return {"vertices": list(graph.vertices), "edges": [list(e) for e in graph.edges]}
