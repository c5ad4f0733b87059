"""Exact move-count search for the Maker-Breaker domination game.

The search works on the residual hypergraph (see :mod:`mbdgame.engine`):
a tuple of live winning sets ordered by size. A Dominator move deletes every
set through the vertex; a Staller move removes the vertex from the sets
containing it. Both players' move counts are obtained from bounded searches
``can X win using at most k more of X's own moves``, which are monotone in
``k``; each table entry keeps the largest failing ``k`` and the smallest
succeeding ``k`` seen so far for that residual.

The loser is assumed to delay the winner as long as possible, so every value
is a guarantee against arbitrary play.
"""
from __future__ import annotations

import math
import os
import threading
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .engine import (
    Outcome,
    Player,
    Position,
    apply_move,
    dominator_won,
    minimize,
    residual,
    staller_won,
)
from .errors import IncompleteCertificate, InvalidArgument, NotAWinner, ResourceLimit
from .graph import Graph, bits

INF = math.inf
MoveCount = float  # int or INF

INVARIANTS = ("gmb", "gmb_prime", "gsmb", "gsmb_prime")

log_progress: Optional[Callable[[str], None]] = None


def _default_table_entries() -> int:
    return int(os.environ.get("MBD_TABLE_ENTRIES", "20000000"))


@dataclass
class Budget:
    max_nodes: Optional[int] = None
    max_table_entries: int = field(default_factory=_default_table_entries)
    wall_clock: Optional[float] = None  # seconds


@dataclass
class GameValueReport:
    outcome: Outcome
    gmb: MoveCount
    gmb_prime: MoveCount
    gsmb: MoveCount
    gsmb_prime: MoveCount
    nodes_explored: int = 0
    elapsed: float = 0.0

    def __post_init__(self):
        fin = math.isfinite
        if self.outcome is Outcome.D:
            ok = fin(self.gmb) and fin(self.gmb_prime)
        elif self.outcome is Outcome.S:
            ok = fin(self.gsmb) and fin(self.gsmb_prime)
        else:
            ok = (fin(self.gmb) and fin(self.gsmb_prime)
                  and not fin(self.gmb_prime) and not fin(self.gsmb))
        if not ok:
            raise ValueError(f"inconsistent report {self}")

    def values(self) -> dict[str, MoveCount]:
        return {name: getattr(self, name) for name in INVARIANTS}

    def to_dict(self, timing: bool = True) -> dict:
        out = {"outcome": self.outcome.value}
        for name, val in self.values().items():
            out[name] = count_to_json(val)
        out["nodes_explored"] = self.nodes_explored
        if timing:
            out["elapsed_ms"] = round(self.elapsed * 1000, 3)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "GameValueReport":
        return cls(
            Outcome(d["outcome"]),
            *(count_from_json(d[name]) for name in INVARIANTS),
            nodes_explored=d.get("nodes_explored", 0),
            elapsed=d.get("elapsed_ms", 0.0) / 1000,
        )


def count_to_json(v: MoveCount):
    return None if v == INF else int(v)


def count_from_json(v) -> MoveCount:
    return INF if v is None else int(v)


def format_count(v: MoveCount) -> str:
    return "inf" if v == INF else str(int(v))


def outcome_from_winners(d_game_winner: Player, s_game_winner: Player) -> Outcome:
    if d_game_winner is s_game_winner:
        return Outcome.D if d_game_winner is Player.DOMINATOR else Outcome.S
    if d_game_winner is Player.DOMINATOR and s_game_winner is Player.STALLER:
        return Outcome.N
    # second player winning both games cannot happen in a Maker-Breaker game
    raise AssertionError("second-player-win outcome is impossible")


# --- residual transitions -----------------------------------------------------

def dominator_move(sets: tuple[int, ...], v: int) -> tuple[int, ...]:
    return tuple(s for s in sets if not s >> v & 1)


def staller_move(sets: tuple[int, ...], v: int) -> tuple[int, ...]:
    bit = 1 << v
    touched = False
    out = []
    for s in sets:
        if s & bit:
            s ^= bit
            touched = True
        out.append(s)
    return minimize(out) if touched else sets


def board_of(sets: Iterable[int]) -> int:
    out = 0
    for s in sets:
        out |= s
    return out


def disjoint_lower_bound(sets: tuple[int, ...]) -> int:
    """Greedy count of pairwise disjoint live sets; each needs its own vertex."""
    used = 0
    count = 0
    for s in sets:
        if not s & used:
            used |= s
            count += 1
    return count


def _vertex_scores(sets):
    count: dict[int, int] = {}
    smallest: dict[int, int] = {}
    for s in sets:
        size = s.bit_count()
        m = s
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            count[v] = count.get(v, 0) + 1
            if size < smallest.get(v, 1 << 30):
                smallest[v] = size
    return count, smallest


def dominator_order(sets) -> list[int]:
    """Vertices hitting the most live sets first."""
    count, smallest = _vertex_scores(sets)
    return sorted(count, key=lambda v: (-count[v], smallest[v], v))


def staller_order(sets) -> list[int]:
    """Vertices of the smallest live sets first."""
    count, smallest = _vertex_scores(sets)
    return sorted(count, key=lambda v: (smallest[v], -count[v], v))


# --- search -------------------------------------------------------------------

class Solver:
    """Memoized searches for one graph.

    ``threads > 1`` splits the root moves over a thread pool sharing the same
    tables; values are identical to the single-threaded run.
    """

    def __init__(self, g: Graph, budget: Optional[Budget] = None, threads: int = 1,
                 symmetry: bool = True):
        if g.order < 1:
            raise InvalidArgument("cannot solve the empty graph")
        if threads < 1:
            raise InvalidArgument("threads must be >= 1")
        self.g = g
        self.budget = budget or Budget()
        self.threads = threads
        self.nodes = 0
        self.dom_table: dict = {}
        self.stal_table: dict = {}
        self._lock = threading.Lock()
        self._deadline = None
        self._base = 0
        self._start = time.perf_counter()
        self.root_sets = minimize(g.closed_nbhd)
        if symmetry:
            self.root_moves = set(first_move_symmetry_classes(g))
        else:
            self.root_moves = set(range(g.order))

    # budget handling

    def _arm(self):
        # budgets apply per top-level query, even when tables are reused
        self._base = self.nodes
        self._start = time.perf_counter()
        wc = self.budget.wall_clock
        self._deadline = None if wc is None else self._start + wc

    def _tick(self):
        self.nodes += 1
        b = self.budget
        if b.max_nodes is not None and self.nodes - self._base > b.max_nodes:
            raise ResourceLimit(f"node budget {b.max_nodes} exhausted")
        if self.nodes & 1023:
            return
        if self._deadline is not None and time.perf_counter() > self._deadline:
            raise ResourceLimit(f"wall-clock budget {b.wall_clock}s exhausted")
        if len(self.dom_table) + len(self.stal_table) > b.max_table_entries:
            self._evict()

    def _evict(self):
        # deepest entries (smallest boards) go first; shallow ones are reused most
        with self._lock:
            for table in (self.dom_table, self.stal_table):
                if len(table) < 2:
                    continue
                keys = sorted(table, key=lambda k: board_of(k[0]).bit_count())
                for k in keys[: len(keys) // 2]:
                    table.pop(k, None)

    def _parallel(self, fn, args: list, want: bool) -> bool:
        """Return ``want`` if any ``fn(*a)`` returns ``want``."""
        if self.threads == 1 or len(args) < 2:
            return self._serial(fn, args, want)
        with ThreadPoolExecutor(self.threads) as ex:
            pending = {ex.submit(fn, *a) for a in args}
            try:
                while pending:
                    done, pending = wait(pending, return_when=FIRST_COMPLETED)
                    for f in done:
                        if f.result() is want:
                            return want
            finally:
                for f in pending:
                    f.cancel()
        return not want

    @staticmethod
    def _serial(fn, args, want):
        for a in args:
            if fn(*a) is want:
                return want
        return not want

    # Dominator: can he finish with at most k more of his own moves?

    def dom_within(self, sets: tuple[int, ...], dom_turn: bool, k: MoveCount,
                   root: bool = False) -> bool:
        if not sets:
            return True
        if k <= 0:
            return False
        key = (sets, dom_turn)
        entry = self.dom_table.get(key)
        if entry is not None:
            if k >= entry[1]:
                return True
            if k <= entry[0]:
                return False
        self._tick()
        result = self._dom_expand(sets, dom_turn, k, root)
        entry = self.dom_table.get(key)
        if entry is None:
            entry = self.dom_table[key] = [0, INF]
        if result:
            if k < entry[1]:
                entry[1] = k
        elif k > entry[0]:
            entry[0] = k
        return result

    def _dom_expand(self, sets, dom_turn, k, root):
        first = sets[0]
        if dom_turn:
            if first.bit_count() == 1:
                single = 0
                for s in sets:
                    if s.bit_count() != 1:
                        break
                    single |= s
                if single & (single - 1):
                    return False  # two disjoint threats
                moves = [single.bit_length() - 1]
            else:
                inter = first
                for s in sets:
                    inter &= s
                    if not inter:
                        break
                if inter:
                    return True
                if k == 1 or disjoint_lower_bound(sets) > k:
                    return False
                moves = dominator_order(sets)
            if root:
                moves = [v for v in moves if v in self.root_moves]
            args = [(dominator_move(sets, v), False, k - 1) for v in moves]
            if root:
                return self._parallel(self.dom_within, args, True)
            for a in args:
                if self.dom_within(*a):
                    return True
            return False
        if first.bit_count() == 1:
            return False
        if disjoint_lower_bound(sets) > k:
            return False
        moves = staller_order(sets)
        if root:
            moves = [v for v in moves if v in self.root_moves]
        if root:
            args = [(staller_move(sets, v), True, k) for v in moves]
            return self._parallel(self.dom_within, args, False)
        for v in moves:
            if not self.dom_within(staller_move(sets, v), True, k):
                return False
        return True

    # Staller: can she claim a whole live set with at most k more moves?

    def stal_within(self, sets: tuple[int, ...], stal_turn: bool, k: MoveCount,
                    root: bool = False) -> bool:
        if not sets:
            return False
        if sets[0] == 0:
            return True  # she already owns a whole set
        if k <= 0:
            return False
        key = (sets, stal_turn)
        entry = self.stal_table.get(key)
        if entry is not None:
            if k >= entry[1]:
                return True
            if k <= entry[0]:
                return False
        self._tick()
        result = self._stal_expand(sets, stal_turn, k, root)
        entry = self.stal_table.get(key)
        if entry is None:
            entry = self.stal_table[key] = [0, INF]
        if result:
            if k < entry[1]:
                entry[1] = k
        elif k > entry[0]:
            entry[0] = k
        return result

    def _stal_expand(self, sets, stal_turn, k, root):
        smallest = sets[0].bit_count()
        if stal_turn:
            if smallest == 1:
                return True
            if smallest > k:
                return False
            moves = staller_order(sets)
            if root:
                moves = [v for v in moves if v in self.root_moves]
                args = [(staller_move(sets, v), False, k - 1) for v in moves]
                return self._parallel(self.stal_within, args, True)
            for v in moves:
                if self.stal_within(staller_move(sets, v), False, k - 1):
                    return True
            return False
        if smallest == 1:
            single = 0
            for s in sets:
                if s.bit_count() != 1:
                    break
                single |= s
            if single & (single - 1):
                return True  # she completes one of two threats next move
            moves = [single.bit_length() - 1]
        else:
            inter = sets[0]
            for s in sets:
                inter &= s
                if not inter:
                    break
            if inter:
                return False
            if smallest > k:
                return False
            moves = dominator_order(sets)
        if root:
            moves = [v for v in moves if v in self.root_moves]
            args = [(dominator_move(sets, v), True, k) for v in moves]
            return self._parallel(self.stal_within, args, False)
        for v in moves:
            child = dominator_move(sets, v)
            if not child or not self.stal_within(child, True, k):
                return False
        return True

    # values

    def dominator_value(self, sets: tuple[int, ...], dom_turn: bool,
                        root: bool = False) -> MoveCount:
        if not sets:
            return 0
        cap = board_of(sets).bit_count()
        if not self.dom_within(sets, dom_turn, cap, root):
            return INF
        k = max(1, disjoint_lower_bound(sets))
        while not self.dom_within(sets, dom_turn, k, root):
            k += 1
        return k

    def staller_value(self, sets: tuple[int, ...], stal_turn: bool,
                      root: bool = False) -> MoveCount:
        if not sets:
            return INF
        cap = board_of(sets).bit_count()
        if not self.stal_within(sets, stal_turn, cap, root):
            return INF
        k = sets[0].bit_count()
        while not self.stal_within(sets, stal_turn, k, root):
            k += 1
        return k

    def dominator_wins(self, first: Player) -> bool:
        self._arm()
        sets = self.root_sets
        return self.dom_within(sets, first is Player.DOMINATOR,
                               board_of(sets).bit_count(), root=True)

    def value(self, invariant: str) -> MoveCount:
        """One of ``gmb``, ``gmb_prime``, ``gsmb``, ``gsmb_prime``."""
        if invariant not in INVARIANTS:
            raise InvalidArgument(f"unknown invariant {invariant!r}")
        self._arm()
        d_first = not invariant.endswith("_prime")
        if invariant.startswith("gmb"):
            return self.dominator_value(self.root_sets, d_first, root=True)
        return self.staller_value(self.root_sets, not d_first, root=True)

    def staller_bounded(self, first: Player, depth_cap: int) -> Optional[int]:
        if depth_cap < 1:
            raise InvalidArgument("depth_cap must be >= 1")
        self._arm()
        sets = self.root_sets
        stal_turn = first is Player.STALLER
        for k in range(1, depth_cap + 1):
            if self.stal_within(sets, stal_turn, k, root=True):
                return k
        return None

    def solve(self) -> GameValueReport:
        start = time.perf_counter()
        self._arm()
        partial: dict = {}
        sets = self.root_sets
        try:
            for name, dom_turn in (("gmb", True), ("gmb_prime", False)):
                val = self.dominator_value(sets, dom_turn, root=True)
                partial[name] = val
                other = "gsmb" if name == "gmb" else "gsmb_prime"
                if val == INF:
                    partial[other] = self.staller_value(sets, not dom_turn, root=True)
                else:
                    partial[other] = INF
                _progress(f"{name}={format_count(val)} {other}={format_count(partial[other])}"
                          f" nodes={self.nodes}")
        except ResourceLimit as exc:
            raise ResourceLimit(str(exc), partial) from None
        d_winner = Player.DOMINATOR if partial["gmb"] != INF else Player.STALLER
        s_winner = Player.DOMINATOR if partial["gmb_prime"] != INF else Player.STALLER
        return GameValueReport(
            outcome_from_winners(d_winner, s_winner),
            partial["gmb"], partial["gmb_prime"], partial["gsmb"], partial["gsmb_prime"],
            nodes_explored=self.nodes, elapsed=time.perf_counter() - start,
        )

    def solve_outcome(self) -> Outcome:
        d = Player.DOMINATOR if self.dominator_wins(Player.DOMINATOR) else Player.STALLER
        s = Player.DOMINATOR if self.dominator_wins(Player.STALLER) else Player.STALLER
        return outcome_from_winners(d, s)


def _progress(msg: str):
    if log_progress is not None:
        log_progress(msg)


def solve(g: Graph, budget: Optional[Budget] = None, threads: int = 1,
          symmetry: bool = True) -> GameValueReport:
    return Solver(g, budget, threads, symmetry).solve()


def solve_outcome(g: Graph, budget: Optional[Budget] = None, threads: int = 1) -> Outcome:
    return Solver(g, budget, threads).solve_outcome()


def staller_value_bounded(g: Graph, first: Player, depth_cap: int,
                          budget: Optional[Budget] = None, threads: int = 1) -> Optional[int]:
    """Smallest k <= depth_cap within which Staller forces a win, else None.

    ``None`` means "not proven within the cap"; it never stands for infinity.
    """
    return Solver(g, budget, threads).staller_bounded(first, depth_cap)


# --- symmetry -----------------------------------------------------------------

def first_move_symmetry_classes(g: Graph, max_automorphisms: int = 20000,
                                fallback: bool = False) -> list[int]:
    """One representative (the smallest index) per automorphism orbit.

    Falls back to every vertex when asked to or when enumerating the
    automorphism group exceeds ``max_automorphisms``.
    """
    if fallback or g.order <= 1:
        return list(range(g.order))
    from networkx.algorithms.isomorphism import GraphMatcher

    nxg = g.to_networkx()
    parent = list(range(g.order))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for count, mapping in enumerate(GraphMatcher(nxg, nxg).isomorphisms_iter()):
        if count >= max_automorphisms:
            return list(range(g.order))
        for u, w in mapping.items():
            ru, rw = find(u), find(w)
            if ru != rw:
                parent[max(ru, rw)] = min(ru, rw)
    return sorted({find(v) for v in range(g.order)})


# --- reference search on raw positions ----------------------------------------

def brute_force_values(g: Graph, first: Player, dominator_passes_first: bool = False,
                       staller_passes_first: bool = False) -> tuple[MoveCount, MoveCount]:
    """(Dominator count, Staller count) by plain minimax over raw claim sets.

    No residual reduction, no pruning, every legal move expanded. Optionally
    the first move of one player is replaced by a pass. Only for small graphs.
    """
    memo: dict = {}

    def values(pos: Position, skip: Optional[Player]):
        key = (pos.key(), skip)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if dominator_won(g, pos):
            res = (0, INF)
        elif staller_won(g, pos):
            res = (INF, 0)
        else:
            mover = pos.to_move
            children = []
            if skip is mover:
                children.append(values(Position(pos.dominator_set, pos.staller_set,
                                                mover.other), None))
            else:
                free = g.full & ~pos.claimed
                for v in bits(free):
                    children.append(values(apply_move(g, pos, v), skip))
            doms = [c[0] for c in children]
            stals = [c[1] for c in children]
            passed = skip is mover
            if mover is Player.DOMINATOR:
                res = ((0 if passed else 1) + min(doms), max(stals))
            else:
                res = (max(doms), (0 if passed else 1) + min(stals))
        memo[key] = res
        return res

    skip = None
    if dominator_passes_first:
        skip = Player.DOMINATOR
    elif staller_passes_first:
        skip = Player.STALLER
    return values(Position(0, 0, first), skip)


def brute_force_report(g: Graph) -> GameValueReport:
    gmb, gsmb = brute_force_values(g, Player.DOMINATOR)
    gmbp, gsmbp = brute_force_values(g, Player.STALLER)
    d = Player.DOMINATOR if gmb != INF else Player.STALLER
    s = Player.DOMINATOR if gmbp != INF else Player.STALLER
    return GameValueReport(outcome_from_winners(d, s), gmb, gmbp, gsmb, gsmbp)


# --- certificates -------------------------------------------------------------

@dataclass
class StrategyCertificate:
    """Move table for the winner of one game.

    ``move_table`` maps ``Position.key()`` to the vertex the winner plays.
    """

    root_player: Player
    first: Player
    claimed_value: MoveCount
    move_table: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "root_player": self.root_player.value,
            "first": self.first.value,
            "claimed_value": count_to_json(self.claimed_value),
            "moves": [[d, s, t, v] for (d, s, t), v in sorted(self.move_table.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StrategyCertificate":
        return cls(
            Player(data["root_player"]),
            Player(data["first"]),
            count_from_json(data["claimed_value"]),
            {(d, s, t): v for d, s, t, v in data["moves"]},
        )


def _invariant_roles(invariant: str) -> tuple[Player, Player]:
    if invariant not in INVARIANTS:
        raise InvalidArgument(f"unknown invariant {invariant!r}")
    winner = Player.DOMINATOR if invariant.startswith("gmb") else Player.STALLER
    first = Player.STALLER if invariant.endswith("_prime") else Player.DOMINATOR
    return winner, first


def extract_certificate(g: Graph, invariant: str, solver: Optional[Solver] = None
                        ) -> StrategyCertificate:
    winner, first = _invariant_roles(invariant)
    solver = solver or Solver(g)
    value = solver.value(invariant)
    if value == INF:
        raise NotAWinner(f"{winner.name.lower()} does not win this game ({invariant} = inf)")
    cert = StrategyCertificate(winner, first, value)
    dom_winner = winner is Player.DOMINATOR
    seen = set()

    def mine(pos):
        return pos.dominator_set if dom_winner else pos.staller_set

    def walk(pos: Position):
        key = pos.key()
        if key in seen or dominator_won(g, pos) or staller_won(g, pos):
            return
        seen.add(key)
        if pos.to_move is winner:
            left = value - mine(pos).bit_count()
            sets = residual(g, pos).live_sets
            if dom_winner:
                order = dominator_order(sets)
                pick = next(v for v in order
                            if solver.dom_within(dominator_move(sets, v), False, left - 1))
            else:
                order = staller_order(sets)
                pick = next(v for v in order
                            if solver.stal_within(staller_move(sets, v), False, left - 1))
            cert.move_table[key] = pick
            walk(apply_move(g, pos, pick))
        else:
            for v in bits(g.full & ~pos.claimed):
                walk(apply_move(g, pos, v))

    walk(Position(0, 0, first))
    return cert


def verify_certificate(g: Graph, cert: StrategyCertificate) -> bool:
    """Replay the table against every opponent reply.

    True iff the certified player wins every line using at most
    ``claimed_value`` of their own moves.
    """
    winner = cert.root_player
    dom_winner = winner is Player.DOMINATOR
    seen = set()
    stack = [Position(0, 0, cert.first)]
    while stack:
        pos = stack.pop()
        key = pos.key()
        if key in seen:
            continue
        seen.add(key)
        d_won, s_won = dominator_won(g, pos), staller_won(g, pos)
        if d_won or s_won:
            if d_won != dom_winner:
                return False
            continue
        used = (pos.dominator_set if dom_winner else pos.staller_set).bit_count()
        if pos.to_move is winner:
            if used >= cert.claimed_value:
                return False
            if key not in cert.move_table:
                raise IncompleteCertificate(f"no move for reachable position {key}")
            v = cert.move_table[key]
            if pos.claimed >> v & 1 or not 0 <= v < g.order:
                return False
            stack.append(apply_move(g, pos, v))
        else:
            stack.extend(apply_move(g, pos, v) for v in bits(g.full & ~pos.claimed))
    return True
