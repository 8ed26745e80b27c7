"""Constructions mapping games, circuits and graphs to other games."""

from .copy import CopyMap, simsg_to_ossg
from .discount import average_to_discounted, discounted_to_absorbing, extend_strategy, mixing_time
from .gadgets import CircuitSpec, GadgetMap, GadgetParams, Gate, circuit_assignment, gcircuit_build, node_strategy
from .hamiltonian import (
    DirectedGraph,
    HamiltonianMap,
    cycle_strategy,
    hamiltonian_game_build,
    induced_subgraph,
    separation_delta,
)

__all__ = [
    "CircuitSpec",
    "CopyMap",
    "DirectedGraph",
    "GadgetMap",
    "GadgetParams",
    "Gate",
    "HamiltonianMap",
    "average_to_discounted",
    "circuit_assignment",
    "cycle_strategy",
    "discounted_to_absorbing",
    "extend_strategy",
    "gcircuit_build",
    "hamiltonian_game_build",
    "induced_subgraph",
    "mixing_time",
    "node_strategy",
    "separation_delta",
    "simsg_to_ossg",
]
