"""Constructive Dominator strategies: pairings, path covers and unions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .engine import Outcome
from .errors import InvalidArgument, InvalidCertificate, NoCover, ParseError, ResourceLimit
from .graph import Graph, bits, cartesian_product, mask_of, path
from .solver import INF, MoveCount

# --- pairing strategies -------------------------------------------------------


@dataclass
class PairingCertificate:
    anchor_set: int
    matching: list[tuple[int, int]]
    context_staller: int = 0

    @property
    def bound(self) -> int:
        return self.anchor_set.bit_count() + len(self.matching)

    def check(self, g: Graph) -> None:
        """Raise InvalidCertificate unless the pairing condition holds."""
        x, y = self.anchor_set, self.context_staller
        if x & y:
            raise InvalidCertificate("anchor and Staller sets overlap")
        used = 0
        for u, v in self.matching:
            if not g.has_edge(u, v):
                raise InvalidCertificate(f"{u}-{v} is not an edge")
            pair = 1 << u | 1 << v
            if pair & (used | x | y):
                raise InvalidCertificate(f"pair {u}-{v} reuses a vertex or touches X/Y")
            used |= pair
        uncovered = g.full & ~used
        if uncovered & ~g.closed_neighborhood_of_set(x):
            raise InvalidCertificate("a vertex outside the matching is not dominated by X")

    def serialize(self) -> str:
        lines = ["anchor: " + " ".join(map(str, bits(self.anchor_set)))]
        if self.context_staller:
            lines.append("staller: " + " ".join(map(str, bits(self.context_staller))))
        lines += [f"pair: {u} {v}" for u, v in self.matching]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "PairingCertificate":
        anchor = staller = 0
        pairs = []
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tag, _, rest = line.partition(":")
            items = rest.split()
            if not all(i.isdigit() for i in items):
                raise ParseError(f"non-numeric vertex in {line!r}", no)
            nums = [int(i) for i in items]
            if tag == "anchor":
                anchor |= mask_of(nums)
            elif tag == "staller":
                staller |= mask_of(nums)
            elif tag == "pair" and len(nums) == 2:
                pairs.append((nums[0], nums[1]))
            else:
                raise ParseError(f"unrecognised certificate line {line!r}", no)
        return cls(anchor, pairs, staller)


def find_pairing(g: Graph, x: int, y: int = 0) -> Optional[PairingCertificate]:
    """Smallest matching M in G-(X u Y) with V(G) - V(M) inside N[X], or None.

    Every vertex not dominated by X must be matched; already dominated ones
    are matched only when that helps.
    """
    if x & y:
        raise InvalidArgument("X and Y must be disjoint")
    avail = g.full & ~(x | y)
    required = g.full & ~g.closed_neighborhood_of_set(x)
    if required & ~avail:
        return None
    adj = [nb & avail for nb in g.adjacency]
    best: list = [None]

    def search(todo: int, free: int, chosen: list):
        if best[0] is not None and len(chosen) + (todo.bit_count() + 1) // 2 >= len(best[0]):
            return
        if not todo:
            best[0] = list(chosen)
            return
        # most constrained required vertex first; one option means it is forced
        pick, options = -1, 0
        fewest = 1 << 30
        for u in bits(todo):
            opts = adj[u] & free
            c = opts.bit_count()
            if c < fewest:
                pick, options, fewest = u, opts, c
                if c <= 1:
                    break
        if not options:
            return
        ordered = sorted(bits(options), key=lambda w: (not todo >> w & 1, w))
        for w in ordered:
            chosen.append((min(pick, w), max(pick, w)))
            taken = 1 << pick | 1 << w
            search(todo & ~taken, free & ~taken, chosen)
            chosen.pop()

    search(required, avail, [])
    if best[0] is None:
        return None
    return PairingCertificate(x, sorted(best[0]), y)


def playout_worst_case(g: Graph, cert: PairingCertificate, dominator_first: bool) -> MoveCount:
    """Largest Dominator move total over every Staller line against the pairing.

    Dominator answers Staller's vertex with its partner when that is unplayed,
    otherwise opens a pair he does not yet touch. Returns INF if some line is
    won by Staller.
    """
    partner = {}
    for u, v in cert.matching:
        partner[u], partner[v] = v, u
    pairs = [1 << u | 1 << v for u, v in cert.matching]
    closed = g.closed_nbhd
    full = g.full
    memo: dict = {}

    def dominated(d):
        out = 0
        for v in bits(d):
            out |= closed[v]
        return out == full

    def staller_done(s):
        return any(nb & s == nb for nb in closed)

    def free_move(d, s):
        for p in pairs:
            if not p & d:
                avail = p & ~s
                if avail:
                    return (avail & -avail).bit_length() - 1
        rest = full & ~(d | s)
        return (rest & -rest).bit_length() - 1 if rest else None

    def dom_turn(d, s, last):
        if dominated(d):
            return d.bit_count()
        v = partner.get(last) if last is not None else None
        if v is None or (d | s) >> v & 1:
            v = free_move(d, s)
        if v is None:
            return INF
        d |= 1 << v
        if dominated(d):
            return d.bit_count()
        return stal_turn(d, s)

    def stal_turn(d, s):
        key = (d, s)
        if key in memo:
            return memo[key]
        worst = 0
        rest = full & ~(d | s)
        if not rest:
            worst = INF
        for v in bits(rest):
            s2 = s | 1 << v
            if staller_done(s2):
                worst = INF
                break
            worst = max(worst, dom_turn(d, s2, v))
            if worst == INF:
                break
        memo[key] = worst
        return worst

    d0, s0 = cert.anchor_set, cert.context_staller
    if dominated(d0):
        return d0.bit_count()
    if staller_done(s0):
        return INF
    return dom_turn(d0, s0, None) if dominator_first else stal_turn(d0, s0)


def pairing_playout(g: Graph, cert: PairingCertificate) -> int:
    """Check the pairing strategy exhaustively and return the bound |X|+|M|."""
    cert.check(g)
    for dominator_first in (True, False):
        worst = playout_worst_case(g, cert, dominator_first)
        if worst > cert.bound:
            raise InvalidCertificate(
                f"pairing playout needed {worst} Dominator moves, bound is {cert.bound}")
    return cert.bound


# --- path covers --------------------------------------------------------------


@dataclass
class PathCover:
    paths: list[list[int]] = field(default_factory=list)

    @property
    def nontrivial(self) -> bool:
        return all(len(p) >= 2 for p in self.paths)

    def sizes(self) -> list[int]:
        return [len(p) for p in self.paths]

    def check(self, g: Graph) -> None:
        seen = 0
        for p in self.paths:
            for a, b in zip(p, p[1:]):
                if not g.has_edge(a, b):
                    raise InvalidArgument(f"{a}-{b} is not an edge")
            for v in p:
                if seen >> v & 1:
                    raise InvalidArgument(f"vertex {v} covered twice")
                seen |= 1 << v
        if seen != g.full:
            raise InvalidArgument("cover misses vertices")


CONDITION_LIMIT = 20


def path_cover_condition(g: Graph, limit: int = CONDITION_LIMIT) -> bool:
    """Check i(G-S) <= 2|S| over every vertex subset S."""
    if g.order > limit:
        raise ResourceLimit(f"subset check limited to {limit} vertices")
    adj = g.adjacency
    n = g.order
    for s in range(1 << n):
        rest = ~s
        isolated = 0
        for v in range(n):
            if rest >> v & 1 and not adj[v] & rest:
                isolated += 1
        if isolated > 2 * s.bit_count():
            return False
    return True


def find_nontrivial_path_cover(g: Graph) -> Optional[PathCover]:
    """Search for a partition of V(G) into paths on 2 or 3 vertices.

    Any nontrivial cover can be cut into such pieces, so this is complete.
    """
    adj = g.adjacency
    failed: set[int] = set()

    def grow(left: int) -> Optional[list[list[int]]]:
        if not left:
            return []
        if left in failed:
            return None
        v = (left & -left).bit_length() - 1
        rest = left & ~(1 << v)
        nbrs = adj[v] & rest
        for u in bits(nbrs):
            r2 = rest & ~(1 << u)
            options = [[v, u]]
            options += [[v, u, w] for w in bits(adj[u] & r2)]
            options += [[w, v, u] for w in bits(adj[v] & r2) if w > u]
            for piece in options:
                sub = grow(left & ~mask_of(piece))
                if sub is not None:
                    return [piece] + sub
        failed.add(left)
        return None

    found = grow(g.full)
    return None if found is None else PathCover(found)


def has_nontrivial_path_cover(g: Graph, method: str = "both") -> bool:
    """``method`` is ``condition``, ``search`` or ``both`` (which must agree)."""
    if method == "condition":
        return path_cover_condition(g)
    if method == "search":
        return find_nontrivial_path_cover(g) is not None
    if method != "both":
        raise InvalidArgument(f"unknown method {method!r}")
    a = path_cover_condition(g)
    b = find_nontrivial_path_cover(g) is not None
    if a != b:
        raise AssertionError(f"path cover methods disagree: condition={a} search={b}")
    return b


def p2p3_cover(n: int) -> PathCover:
    """Split P_n into consecutive P3 pieces, finishing with P2 or P2+P2."""
    if n < 2:
        raise InvalidArgument("P_n needs n >= 2 for a nontrivial cover")
    threes, r = divmod(n, 3)
    sizes = [3] * threes
    if r == 1:
        sizes[-1:] = [2, 2]
    elif r == 2:
        sizes.append(2)
    paths, start = [], 0
    for s in sizes:
        paths.append(list(range(start, start + s)))
        start += s
    return PathCover(paths)


def _is_labelled_path(g: Graph) -> bool:
    return g.order >= 1 and g.edges() == [(i, i + 1) for i in range(g.order - 1)]


def nontrivial_cover(g: Graph) -> PathCover:
    if _is_labelled_path(g) and g.order >= 2:
        return p2p3_cover(g.order)
    cover = find_nontrivial_path_cover(g)
    if cover is None:
        raise NoCover("graph has no nontrivial path cover")
    return cover


@dataclass
class ProductComponent:
    g_path: list[int]
    h_path: list[int]
    vertices: list[int]  # product indices, row-major over (g_path, h_path)
    graph: Graph  # P_a x P_b with a = len(g_path), b = len(h_path)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.g_path), len(self.h_path))


def product_decomposition(g: Graph, h: Graph) -> list[ProductComponent]:
    """Components of G' x H' where G', H' are nontrivial path covers of G, H."""
    cg, ch = nontrivial_cover(g), nontrivial_cover(h)
    comps = []
    for pg in cg.paths:
        for ph in ch.paths:
            verts = [x * h.order + y for x in pg for y in ph]
            comps.append(ProductComponent(pg, ph, verts,
                                          cartesian_product(path(len(pg)), path(len(ph)))))
    return comps


def decomposition_subgraph(g: Graph, h: Graph, comps: list[ProductComponent]) -> Graph:
    """The spanning subgraph of G x H formed by the components' edges."""
    edges = []
    for c in comps:
        for a, b in c.graph.edges():
            edges.append((c.vertices[a], c.vertices[b]))
    return Graph.from_edges(g.order * h.order, edges)


# --- disjoint unions ----------------------------------------------------------


def union_outcome(o1: Outcome, o2: Outcome) -> Outcome:
    if Outcome.S in (o1, o2):
        return Outcome.S
    if o1 is o2 is Outcome.N:
        return Outcome.S
    if o1 is o2 is Outcome.D:
        return Outcome.D
    return Outcome.N


def union_gmb_interval(gmb_g: MoveCount, gmbp_g: MoveCount, gmb_h: MoveCount,
                       gmbp_h: MoveCount) -> tuple[tuple[MoveCount, MoveCount],
                                                  tuple[MoveCount, MoveCount]]:
    """Intervals containing gmb and gmb_prime of G u H; INF saturates."""
    gmb = (gmb_g + gmb_h, min(gmbp_g + gmb_h, gmb_g + gmbp_h))
    gmbp = (max(gmbp_g + gmb_h, gmb_g + gmbp_h), gmbp_g + gmbp_h)
    return gmb, gmbp


def all_pairings(g: Graph, max_anchor: int = 1, max_staller: int = 1):
    """Every pairing certificate with small X and Y, for property checks."""
    verts = range(g.order)
    for i in range(max_anchor + 1):
        for xs in itertools.combinations(verts, i):
            x = mask_of(xs)
            for j in range(max_staller + 1):
                for ys in itertools.combinations([v for v in verts if v not in xs], j):
                    cert = find_pairing(g, x, mask_of(ys))
                    if cert is not None:
                        yield cert


__all__ = [
    "INF", "PairingCertificate", "PathCover", "ProductComponent", "all_pairings",
    "decomposition_subgraph", "find_nontrivial_path_cover", "find_pairing",
    "has_nontrivial_path_cover", "nontrivial_cover", "p2p3_cover", "pairing_playout",
    "path_cover_condition", "playout_worst_case", "product_decomposition",
    "union_gmb_interval", "union_outcome",
]
