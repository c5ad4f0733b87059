"""Exact solver and verification tools for the Maker-Breaker domination game."""

from .engine import Outcome, Player, Position
from .graph import Graph, cartesian_product, complete_bipartite, disjoint_union, path, star
from .solver import INF, GameValueReport, solve, solve_outcome, staller_value_bounded

__all__ = [
    "INF", "GameValueReport", "Graph", "Outcome", "Player", "Position",
    "cartesian_product", "complete_bipartite", "disjoint_union", "path", "solve",
    "solve_outcome", "staller_value_bounded", "star",
]
