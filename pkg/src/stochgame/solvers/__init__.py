"""Equilibrium solvers."""

from .backward import backward_induction, horizon
from .brouwer import brouwer_fixed_point_solve, brouwer_map, implied_epsilon
from .cycles import cycle_ne_graph
from .enumerate import pure_ne_enumerate
from .locreward import potential, strategy_iteration_locreward, switch_bound
from .result import SolveResult
from .valuenet import brute_force_value_net, lp_policies_for_values, value_net

__all__ = [
    "SolveResult",
    "backward_induction",
    "brouwer_fixed_point_solve",
    "brouwer_map",
    "brute_force_value_net",
    "cycle_ne_graph",
    "horizon",
    "implied_epsilon",
    "lp_policies_for_values",
    "potential",
    "pure_ne_enumerate",
    "strategy_iteration_locreward",
    "switch_bound",
    "value_net",
]
