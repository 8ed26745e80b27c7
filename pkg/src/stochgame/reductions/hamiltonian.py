"""Mixed-sign LocReward game whose pure NE correspond to Hamiltonian cycles."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import GraphTooSmall, InvalidGame
from ..game import GameSpec, Strategy
from ._otbsg import OtbsgBuilder

DEFAULT_GAMMA = 0.5


@dataclass(frozen=True)
class DirectedGraph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple((str(a), str(b)) for a, b in self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidGame("duplicate vertices")
        if len(set(self.edges)) != len(self.edges):
            raise InvalidGame("duplicate edges")
        names = set(self.vertices)
        for a, b in self.edges:
            if a not in names or b not in names:
                raise InvalidGame(f"edge ({a}, {b}) has an unknown endpoint")

    def successors(self, v: str) -> list[str]:
        return [b for a, b in self.edges if a == v]

    def is_hamiltonian_cycle(self) -> bool:
        """True iff the edge set is one directed cycle through every vertex."""
        n = len(self.vertices)
        if len(self.edges) != n:
            return False
        nxt = {}
        for a, b in self.edges:
            if a in nxt or a == b:
                return False
            nxt[a] = b
        if len(set(nxt.values())) != n:
            return False
        v, seen = self.vertices[0], set()
        while v not in seen:
            seen.add(v)
            v = nxt[v]
        return len(seen) == n


@dataclass(frozen=True)
class HamiltonianMap:
    """State indices of the long and short states per vertex; action 0 of long_i at long_i lists edges first."""

    graph: DirectedGraph
    long: dict[str, int]
    short: dict[str, int]
    long_targets: dict[str, tuple[str, ...]]
    short_targets: dict[str, tuple[str, ...]]


def hamiltonian_game_build(graph: DirectedGraph, gamma: float = DEFAULT_GAMMA) -> tuple[GameSpec, HamiltonianMap]:
    """Long/short state pair per vertex joined by single-action chains, L = |V|.

    long_i may move to short_j for each edge (i, j), to short_i, or into its
    chain of 2L-2 states back to long_i.  short_i may enter a chain of 2L-1
    states ending at long_j for each j != i, move to long_i, or enter its
    chain of 2L+1 states back to short_i.  Short players earn +1 and long
    players -1 at their own state; every other reward is 0.
    """
    V = graph.vertices
    L = len(V)
    if L < 2:
        raise GraphTooSmall("the construction needs at least two vertices")
    b = OtbsgBuilder()
    long = {v: b.add(f"long_{v}") for v in V}
    short = {v: b.add(f"short_{v}") for v in V}
    long_targets, short_targets = {}, {}
    for v in V:
        targets = [w for w in graph.successors(v) if w != v]
        long_targets[v] = tuple(targets)
        moves = [{short[w]: 1.0} for w in targets] + [{short[v]: 1.0}]
        names = [f"to_short_{w}" for w in targets] + [f"to_short_{v}"]
        moves.append({b.chain(f"auxlong_{v}_", 2 * L - 1, long[v]): 1.0})
        names.append("aux_long")
        b.set_moves(long[v], moves, names)
        others = [w for w in V if w != v]
        short_targets[v] = tuple(others)
        moves = [{b.chain(f"sl_{v}_{w}_", 2 * L, long[w]): 1.0} for w in others]
        names = [f"via_sl_{w}" for w in others]
        moves += [{long[v]: 1.0}, {b.chain(f"auxshort_{v}_", 2 * L + 2, short[v]): 1.0}]
        names += [f"to_long_{v}", "aux_short"]
        b.set_moves(short[v], moves, names)
    for v in V:
        for a in range(len(long_targets[v]) + 2):
            b.add_reward(long[v], long[v], a, -1.0)
        for a in range(len(short_targets[v]) + 2):
            b.add_reward(short[v], short[v], a, 1.0)
    spec = b.build(gamma)
    idx = spec.state_index
    return spec, HamiltonianMap(
        graph,
        {v: idx(long[v]) for v in V},
        {v: idx(short[v]) for v in V},
        long_targets,
        short_targets,
    )


def cycle_strategy(spec: GameSpec, game_map: HamiltonianMap, cycle: DirectedGraph | list[tuple[str, str]]) -> Strategy:
    """Pure strategy long_i -> short_next(i), short_i -> long_i for a cycle's edges."""
    edges = cycle.edges if isinstance(cycle, DirectedGraph) else cycle
    nxt = dict(edges)
    choice = {}
    for s in range(spec.num_states):
        choice[(s, s)] = 0
    for v in game_map.graph.vertices:
        s = game_map.long[v]
        choice[(s, s)] = game_map.long_targets[v].index(nxt[v])
        s = game_map.short[v]
        choice[(s, s)] = len(game_map.short_targets[v])
    return Strategy.pure(spec, choice)


def induced_subgraph(graph: DirectedGraph, game_map: HamiltonianMap, strategy: Strategy) -> tuple[DirectedGraph, bool]:
    """Edges (i, j) where long_i plays its move to short_j; also whether they form a Hamiltonian cycle."""
    choice = strategy.pure_choice()
    edges = []
    for v in graph.vertices:
        s = game_map.long[v]
        a = choice[(s, s)]
        if a < len(game_map.long_targets[v]):
            edges.append((v, game_map.long_targets[v][a]))
    sub = DirectedGraph(graph.vertices, tuple(edges))
    return sub, sub.is_hamiltonian_cycle()


def separation_delta(L: int, gamma: float) -> float:
    """gamma^(2L+2) (1-gamma) / ((1 - gamma^(2L+2)) (1 - gamma^(2L+3)))."""
    g2 = gamma ** (2 * L + 2)
    return g2 * (1 - gamma) / ((1 - g2) * (1 - gamma ** (2 * L + 3)))
