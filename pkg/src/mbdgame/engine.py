"""Positions, moves, win detection and the residual hypergraph.

Staller's winning sets are the closed neighborhoods ``N[v]``. Dominator wins
once he has hit all of them; Staller wins once she owns one of them.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DecidedPosition, IllegalMove
from .graph import Graph, VertexSet, bits


class Player(enum.Enum):
    DOMINATOR = "D"
    STALLER = "S"

    @property
    def other(self) -> "Player":
        return Player.STALLER if self is Player.DOMINATOR else Player.DOMINATOR


class Outcome(enum.Enum):
    D = "D"
    S = "S"
    N = "N"


@dataclass(frozen=True)
class Position:
    dominator_set: VertexSet
    staller_set: VertexSet
    to_move: Player

    def __post_init__(self):
        if self.dominator_set & self.staller_set:
            raise IllegalMove("a vertex is claimed by both players")

    @property
    def claimed(self) -> VertexSet:
        return self.dominator_set | self.staller_set

    def key(self) -> tuple[int, int, str]:
        return (self.dominator_set, self.staller_set, self.to_move.value)


def initial_position(g: Graph, first: Player = Player.DOMINATOR) -> Position:
    return Position(0, 0, first)


def dominator_won(g: Graph, pos: Position) -> bool:
    return g.closed_neighborhood_of_set(pos.dominator_set) == g.full


def staller_won(g: Graph, pos: Position) -> bool:
    s = pos.staller_set
    return any(nb & s == nb for nb in g.closed_nbhd)


def is_decided(g: Graph, pos: Position) -> bool:
    return dominator_won(g, pos) or staller_won(g, pos)


def legal_moves(g: Graph, pos: Position) -> VertexSet:
    if is_decided(g, pos):
        raise DecidedPosition("the game is already decided")
    return g.full & ~pos.claimed


def apply_move(g: Graph, pos: Position, v: int) -> Position:
    if not 0 <= v < g.order:
        raise IllegalMove(f"vertex {v} out of range")
    if pos.claimed >> v & 1:
        raise IllegalMove(f"vertex {v} is already claimed")
    if pos.to_move is Player.DOMINATOR:
        return Position(pos.dominator_set | 1 << v, pos.staller_set, Player.STALLER)
    return Position(pos.dominator_set, pos.staller_set | 1 << v, Player.DOMINATOR)


def _canonical(s: int) -> tuple[int, int]:
    return (s.bit_count(), s)


def minimize(sets) -> tuple[int, ...]:
    """Drop duplicates and strict supersets.

    The result is ordered by (size, mask), so the smallest sets come first and
    equal families always produce equal tuples.
    """
    kept: list[int] = []
    for s in sorted(set(sets), key=_canonical):
        for t in kept:
            if t & s == t:
                break
        else:
            kept.append(s)
    return tuple(kept)


@dataclass(frozen=True)
class ResidualHypergraph:
    live_sets: tuple[int, ...]

    @property
    def dominator_won(self) -> bool:
        return not self.live_sets

    @property
    def staller_won(self) -> bool:
        return 0 in self.live_sets

    @property
    def board(self) -> VertexSet:
        """Unclaimed vertices that still lie in some live set."""
        out = 0
        for s in self.live_sets:
            out |= s
        return out


def raw_live_sets(g: Graph, pos: Position) -> list[int]:
    d, s = pos.dominator_set, pos.staller_set
    return [nb & ~s for nb in g.closed_nbhd if not nb & d]


def residual(g: Graph, pos: Position, prune: bool = True) -> ResidualHypergraph:
    sets = raw_live_sets(g, pos)
    if prune:
        return ResidualHypergraph(minimize(sets))
    return ResidualHypergraph(tuple(sorted(set(sets), key=_canonical)))


def describe(g: Graph, vs: VertexSet) -> str:
    return "{" + ", ".join(g.labels[v] for v in bits(vs)) + "}"
