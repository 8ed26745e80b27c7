"""Compile generalized circuits into one-state-per-player turn-based games."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidCircuit
from ..game import GameSpec, Strategy
from ._otbsg import OtbsgBuilder

ARITY = {"eq": 1, "const": 0, "mul": 1, "sum": 2, "sub": 2, "gt": 2, "and": 2, "or": 2, "not": 1}
LOGIC = ("and", "or", "not")


@dataclass(frozen=True)
class Gate:
    kind: str
    inputs: tuple[str, ...]
    output: str
    alpha: float | None = None


@dataclass(frozen=True)
class CircuitSpec:
    """Nodes and gates of a generalized circuit; node values live in [0, 1]."""

    nodes: tuple[str, ...]
    gates: tuple[Gate, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "gates", tuple(self.gates))
        validate_circuit(self)

    @property
    def has_logic(self) -> bool:
        return any(g.kind in LOGIC for g in self.gates)


def validate_circuit(circuit: CircuitSpec) -> None:
    """Raise InvalidCircuit on unknown kinds, wrong arity, bad alpha, unknown or repeated outputs."""
    names = set(circuit.nodes)
    if len(names) != len(circuit.nodes):
        raise InvalidCircuit("duplicate node names")
    outputs = set()
    for g in circuit.gates:
        if g.kind not in ARITY:
            raise InvalidCircuit(f"unknown gate kind {g.kind!r}")
        if len(g.inputs) != ARITY[g.kind]:
            raise InvalidCircuit(f"{g.kind} gate needs {ARITY[g.kind]} inputs, got {len(g.inputs)}")
        for v in (*g.inputs, g.output):
            if v not in names:
                raise InvalidCircuit(f"unknown node {v!r}")
        if g.output in g.inputs:
            raise InvalidCircuit(f"gate output {g.output!r} is also one of its inputs")
        if g.output in outputs:
            raise InvalidCircuit(f"node {g.output!r} is the output of two gates")
        outputs.add(g.output)
        if g.kind in ("const", "mul"):
            if g.alpha is None or not math.isfinite(g.alpha):
                raise InvalidCircuit(f"{g.kind} gate needs a finite alpha")
            if g.kind == "mul" and not 0 < g.alpha <= 2:
                raise InvalidCircuit("mul gate needs alpha in (0, 2]")
        elif g.alpha is not None:
            raise InvalidCircuit(f"{g.kind} gate takes no alpha")


@dataclass(frozen=True)
class GadgetParams:
    """Discount, gate accuracy and the derived chain length and NE tolerances."""

    gamma: float
    eps: float

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")

    @property
    def L(self) -> int:
        return math.ceil(4.0 / (1.0 - self.gamma) * math.log(1.0 / self.eps))

    @property
    def delta(self) -> float:
        return (1 - self.gamma) * self.gamma ** (self.L + 1) * self.eps / 8

    @property
    def delta_gt(self) -> float:
        return (1 - self.gamma) * self.gamma**self.L * self.eps**2 / 2


@dataclass(frozen=True)
class GadgetMap:
    """Where each circuit node lives in the compiled game.

    ``node_state`` maps every node (including internal ones introduced for
    logic gates) to its state/player index; action 0 is a1.  ``primitive``
    lists the compiled gates, ``aux`` maps a primitive gate index to its aux
    state, and ``expansion`` records which primitives implement each
    original gate.
    """

    circuit: CircuitSpec
    params: GadgetParams
    node_state: dict[str, int]
    primitive: tuple[Gate, ...]
    aux: dict[int, int]
    expansion: tuple[tuple[int, ...], ...] = field(default=())


def _expand(circuit: CircuitSpec) -> tuple[list[str], list[Gate], list[tuple[int, ...]]]:
    """Rewrite logic gates as arithmetic/comparison gates on fresh internal nodes.

    not p = 1 - p, or = sum, and = gt(mul_1/2(a) + mul_1/2(b), 3/4).
    """
    nodes = list(circuit.nodes)
    taken = set(nodes)
    prims: list[Gate] = []
    expansion = []

    def fresh(base: str) -> str:
        k = 0
        while f"{base}#{k}" in taken:
            k += 1
        name = f"{base}#{k}"
        taken.add(name)
        nodes.append(name)
        return name

    for g in circuit.gates:
        start = len(prims)
        if g.kind == "not":
            one = fresh(g.output + ".one")
            prims.append(Gate("const", (), one, 1.0))
            prims.append(Gate("sub", (one, g.inputs[0]), g.output))
        elif g.kind == "or":
            prims.append(Gate("sum", g.inputs, g.output))
        elif g.kind == "and":
            h1, h2 = fresh(g.output + ".half"), fresh(g.output + ".half")
            s, c = fresh(g.output + ".sum"), fresh(g.output + ".thr")
            prims += [
                Gate("mul", (g.inputs[0],), h1, 0.5),
                Gate("mul", (g.inputs[1],), h2, 0.5),
                Gate("sum", (h1, h2), s),
                Gate("const", (), c, 0.75),
                Gate("gt", (s, c), g.output),
            ]
        else:
            prims.append(g)
        expansion.append(tuple(range(start, len(prims))))
    return nodes, prims, expansion


def gcircuit_build(circuit: CircuitSpec, params: GadgetParams) -> tuple[GameSpec, GadgetMap]:
    """One player per node, one aux player per non-comparison gate, dummy chains of length L.

    Each node state has actions a1/a2.  Output nodes route a1 through an
    L-cycle back to themselves and a2 through an L-path to their aux state
    (comparison: L-paths to the two inputs).  Nodes that no gate outputs
    are free: both actions are L-cycles back to themselves.  Every dummy
    chain state has one action and zero reward, and no chain is shared.
    """
    validate_circuit(circuit)
    if circuit.has_logic and params.eps > 1 / 12:
        raise InvalidCircuit("logic gates need eps <= 1/12")
    g, L = params.gamma, params.L
    nodes, prims, expansion = _expand(circuit)
    b = OtbsgBuilder()
    for v in nodes:
        b.add(v)
    driven = {gate.output: k for k, gate in enumerate(prims)}
    aux_names = {}
    for k, gate in enumerate(prims):
        if gate.kind != "gt":
            aux_names[k] = b.add(f"{gate.output}.aux")

    for v in nodes:
        if v not in driven:
            b.set_moves(v, [{b.chain(f"{v}.c1.", L, v): 1.0}, {b.chain(f"{v}.c2.", L, v): 1.0}])

    for k, gate in enumerate(prims):
        out = gate.output
        if gate.kind == "gt":
            in1, in2 = gate.inputs
            b.set_moves(out, [{b.chain(f"{out}.p1.", L, in1): 1.0}, {b.chain(f"{out}.p2.", L, in2): 1.0}])
            b.add_reward(out, in1, 0, 1.0)
            b.add_reward(out, in2, 0, 1.0)
            continue
        aux = aux_names[k]
        b.set_moves(out, [{b.chain(f"{out}.c.", L, out): 1.0}, {b.chain(f"{out}.p.", L, aux): 1.0}])
        # entries at the aux and out states shared by every aux-based gadget
        b.add_reward(aux, aux, 1, -g / 2)
        b.add_reward(aux, out, 0, 1.0)
        b.add_reward(aux, out, 1, 0.5)
        b.add_reward(out, aux, 1, 3 * g / 4)
        b.add_reward(out, out, 0, g ** (L + 1) / 4)
        if gate.kind == "const":
            b.set_moves(aux, [{aux: 1.0}, {out: 1.0}])
            b.add_reward(aux, aux, 0, g * (1 - g) * gate.alpha / 2)
            b.add_reward(out, aux, 0, -g / 4)
        elif gate.kind in ("eq", "mul"):
            (inp,) = gate.inputs
            b.set_moves(aux, [{inp: 1.0}, {out: 1.0}])
            b.add_reward(aux, inp, 0, (gate.alpha if gate.kind == "mul" else 1.0) / 2)
            for a in (0, 1):
                b.add_reward(out, inp, a, -0.25)
        else:
            in1, in2 = gate.inputs
            step = {in1: 0.5}
            step[in2] = step.get(in2, 0.0) + 0.5
            b.set_moves(aux, [step, {out: 1.0}])
            b.add_reward(aux, in1, 0, 1.0)
            b.add_reward(aux, in2, 0, 1.0 if gate.kind == "sum" else -1.0)
            for inp in (in1, in2):
                for a in (0, 1):
                    b.add_reward(out, inp, a, -0.25)

    spec = b.build(g)
    node_state = {v: spec.state_index(v) for v in nodes}
    aux = {k: spec.state_index(name) for k, name in aux_names.items()}
    return spec, GadgetMap(circuit, params, node_state, tuple(prims), aux, tuple(expansion))


def _med(a: float, b: float, c: float) -> float:
    return float(np.median([a, b, c]))


def gate_band(gate: Gate, p: dict[str, float], eps: float) -> tuple[float, float] | None:
    """Allowed interval for the output value; None when the gate imposes nothing."""
    x = [p[v] for v in gate.inputs]
    k = gate.kind
    if k == "eq":
        return x[0] - eps, x[0] + eps
    if k == "const":
        a = gate.alpha
        return _med(0, a - eps, 1 - eps), _med(1, a + eps, eps)
    if k == "mul":
        a = gate.alpha
        return _med(0, a * (x[0] - eps), 1 - eps), _med(1, a * (x[0] + eps), eps)
    if k == "sum":
        return _med(0, x[0] + x[1] - eps, 1 - eps), min(1.0, x[0] + x[1] + eps)
    if k == "sub":
        return max(0.0, x[0] - x[1] - eps), _med(1, x[0] - x[1] + eps, eps)
    high, low = (1 - eps, 1.0), (0.0, eps)
    if k == "gt":
        return high if x[0] >= x[1] + eps else low if x[0] <= x[1] - eps else None
    if k == "and":
        return high if min(x) >= 1 - eps else low if min(x) <= eps else None
    if k == "or":
        return high if max(x) >= 1 - eps else low if max(x) <= eps else None
    if k == "not":
        return low if x[0] >= 1 - eps else high if x[0] <= eps else None
    raise InvalidCircuit(f"unknown gate kind {k!r}")


@dataclass(frozen=True)
class GateCheck:
    gate: Gate
    value: float
    band: tuple[float, float] | None
    ok: bool


@dataclass(frozen=True)
class Assignment:
    values: dict[str, float]
    checks: tuple[GateCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def circuit_assignment(game_map: GadgetMap, strategy: Strategy, tol: float = 1e-12) -> Assignment:
    """Node values p(v) = pi_v(a1) and the output-band check of every original gate."""
    values = {}
    for v, s in game_map.node_state.items():
        values[v] = float(strategy[(s, s)][0])
    eps = game_map.params.eps
    checks = []
    for gate in game_map.circuit.gates:
        band = gate_band(gate, values, eps)
        y = values[gate.output]
        ok = band is None or band[0] - tol <= y <= band[1] + tol
        checks.append(GateCheck(gate, y, band, ok))
    return Assignment({v: values[v] for v in game_map.circuit.nodes}, tuple(checks))


def node_strategy(spec: GameSpec, game_map: GadgetMap, node_values: dict[str, float], aux_values: dict[int, float] | None = None) -> Strategy:
    """Strategy playing a1 with the given probability at node states (and aux states), dummies fixed."""
    policies = {}
    for s in range(spec.num_states):
        m = len(spec.actions[s][s])
        policies[(s, s)] = np.ones(1) if m == 1 else np.array([0.5, 0.5])
    for v, p in node_values.items():
        s = game_map.node_state[v]
        policies[(s, s)] = np.array([p, 1 - p])
    for k, p in (aux_values or {}).items():
        s = game_map.aux[k]
        policies[(s, s)] = np.array([p, 1 - p])
    return Strategy(policies)
