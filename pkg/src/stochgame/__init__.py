"""Stochastic games: evaluation, Nash-equilibrium certification, solvers and reductions."""
