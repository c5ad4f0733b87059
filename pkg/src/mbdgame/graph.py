"""Immutable bit-mask graphs, family generators and the text formats.

Vertices are ``0..n-1``; vertex sets are plain ``int`` bit masks where bit
``v`` marks vertex ``v``.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import CapacityExceeded, InvalidArgument, NoSuchEdge, ParseError

CAPACITY = int(os.environ.get("MBD_CAPACITY", "128"))

VertexSet = int


def bits(mask: VertexSet) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> VertexSet:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


@dataclass(frozen=True)
class Graph:
    order: int
    adjacency: tuple[int, ...]
    labels: tuple[str, ...] = ()
    closed_nbhd: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.order > CAPACITY:
            raise CapacityExceeded(f"order {self.order} exceeds capacity {CAPACITY}")
        if len(self.adjacency) != self.order:
            raise InvalidArgument("adjacency length does not match order")
        full = (1 << self.order) - 1
        for v, nb in enumerate(self.adjacency):
            if nb & ~full:
                raise InvalidArgument(f"vertex {v} has a neighbour outside the graph")
            if nb >> v & 1:
                raise InvalidArgument(f"loop at vertex {v}")
            for u in bits(nb):
                if not self.adjacency[u] >> v & 1:
                    raise InvalidArgument(f"asymmetric edge {v}-{u}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(v) for v in range(self.order)))
        elif len(self.labels) != self.order:
            raise InvalidArgument("label count does not match order")
        object.__setattr__(
            self, "closed_nbhd", tuple(nb | (1 << v) for v, nb in enumerate(self.adjacency))
        )

    @classmethod
    def from_edges(cls, order: int, edges: Iterable[tuple[int, int]], labels=()) -> "Graph":
        if order > CAPACITY:
            raise CapacityExceeded(f"order {order} exceeds capacity {CAPACITY}")
        adj = [0] * order
        for u, v in edges:
            if not (0 <= u < order and 0 <= v < order):
                raise InvalidArgument(f"edge {u}-{v} out of range for order {order}")
            if u == v:
                raise InvalidArgument(f"loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(order, tuple(adj), tuple(labels))

    @property
    def full(self) -> VertexSet:
        return (1 << self.order) - 1

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.order) for v in bits(self.adjacency[u]) if u < v]

    @property
    def size(self) -> int:
        return sum(nb.bit_count() for nb in self.adjacency) // 2

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.order and 0 <= v < self.order and bool(self.adjacency[u] >> v & 1)

    def index(self, label: str) -> int:
        """Vertex index for a label such as ``"(1,2)"``."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidArgument(f"no vertex labelled {label!r}") from None

    def closed_neighborhood_of_set(self, vs: VertexSet) -> VertexSet:
        out = 0
        for v in bits(vs):
            out |= self.closed_nbhd[v]
        return out

    def components(self) -> list[VertexSet]:
        seen = 0
        comps = []
        for v in range(self.order):
            if seen >> v & 1:
                continue
            comp = frontier = 1 << v
            while frontier:
                nxt = 0
                for u in bits(frontier):
                    nxt |= self.adjacency[u]
                frontier = nxt & ~comp
                comp |= frontier
            seen |= comp
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return self.order > 0 and len(self.components()) == 1

    def with_edge(self, u: int, v: int) -> "Graph":
        if u == v or not (0 <= u < self.order and 0 <= v < self.order):
            raise InvalidArgument(f"cannot add edge {u}-{v}")
        adj = list(self.adjacency)
        adj[u] |= 1 << v
        adj[v] |= 1 << u
        return Graph(self.order, tuple(adj), self.labels)

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.order))
        g.add_edges_from(self.edges())
        return g


def closed_neighborhood(g: Graph, v: int) -> VertexSet:
    if not 0 <= v < g.order:
        raise InvalidArgument(f"vertex {v} out of range for order {g.order}")
    return g.closed_nbhd[v]


def path(n: int) -> Graph:
    if n < 1:
        raise InvalidArgument("path needs at least one vertex")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)],
                            [str(i + 1) for i in range(n)])


def complete_bipartite(m: int, n: int) -> Graph:
    """K_{m,n}. A star (``m == 1``) has its center at index 0, labelled ``a``."""
    if m < 1 or n < 1:
        raise InvalidArgument("both sides of K_{m,n} must be nonempty")
    edges = [(i, m + j) for i in range(m) for j in range(n)]
    if m == 1:
        labels = ["a"] + [str(j + 1) for j in range(n)]
    else:
        labels = [f"x{i + 1}" for i in range(m)] + [f"y{j + 1}" for j in range(n)]
    return Graph.from_edges(m + n, edges, labels)


def star(n: int) -> Graph:
    return complete_bipartite(1, n)


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """G x H with vertex ``(x, y)`` at index ``x * n(H) + y``."""
    order = g.order * h.order
    if order > CAPACITY:
        raise CapacityExceeded(f"product order {order} exceeds capacity {CAPACITY}")
    nh = h.order
    edges = []
    for x in range(g.order):
        for y in range(nh):
            v = x * nh + y
            for y2 in bits(h.adjacency[y]):
                if y < y2:
                    edges.append((v, x * nh + y2))
            for x2 in bits(g.adjacency[x]):
                if x < x2:
                    edges.append((v, x2 * nh + y))
    # a star center on the right is called b, as in (a,b)
    right = ["b" if lbl == "a" else lbl for lbl in h.labels]
    labels = [f"({gl},{hl})" for gl in g.labels for hl in right]
    return Graph.from_edges(order, edges, labels)


def disjoint_union(g: Graph, h: Graph) -> Graph:
    order = g.order + h.order
    if order > CAPACITY:
        raise CapacityExceeded(f"union order {order} exceeds capacity {CAPACITY}")
    adj = tuple(g.adjacency) + tuple(nb << g.order for nb in h.adjacency)
    if set(g.labels) & set(h.labels):
        labels = tuple(f"{l}.0" for l in g.labels) + tuple(f"{l}.1" for l in h.labels)
    else:
        labels = g.labels + h.labels
    return Graph(order, adj, labels)


def delete_edge(g: Graph, u: int, v: int) -> Graph:
    if not g.has_edge(u, v):
        raise NoSuchEdge(f"{u}-{v} is not an edge")
    adj = list(g.adjacency)
    adj[u] &= ~(1 << v)
    adj[v] &= ~(1 << u)
    return Graph(g.order, tuple(adj), g.labels)


def induced_subgraph(g: Graph, vertices: list[int]) -> Graph:
    pos = {v: i for i, v in enumerate(vertices)}
    edges = [(pos[u], pos[w]) for u in vertices for w in bits(g.adjacency[u])
             if w in pos and pos[u] < pos[w]]
    return Graph.from_edges(len(vertices), edges, [g.labels[v] for v in vertices])


# --- text formats -----------------------------------------------------------

_TERM = re.compile(r"^(?:p(\d+)|k(\d+),(\d+))$")


def _term(text: str, line: int) -> Graph:
    m = _TERM.match(text.strip().lower().replace(" ", ""))
    if not m:
        raise ParseError(f"unknown generator term {text.strip()!r}", line)
    try:
        if m.group(1) is not None:
            return path(int(m.group(1)))
        return complete_bipartite(int(m.group(2)), int(m.group(3)))
    except InvalidArgument as exc:
        raise ParseError(str(exc), line) from None


def generate(expr: str, line: int = 1) -> Graph:
    """Build a graph from ``p3 x p4 + k1,3`` style expressions.

    ``x`` binds tighter than ``+``.
    """
    result = None
    for summand in expr.split("+"):
        factors = re.split(r"\s+x\s+|\s*\bx\b\s*", summand.strip())
        factors = [f for f in factors if f.strip()]
        if not factors:
            raise ParseError("empty generator term", line)
        prod = _term(factors[0], line)
        for f in factors[1:]:
            prod = cartesian_product(prod, _term(f, line))
        result = prod if result is None else disjoint_union(result, prod)
    return result


def parse_graph(text: str) -> Graph:
    lines = text.splitlines()
    body = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(lines)]
    body = [(i, ln) for i, ln in body if ln]
    if not body:
        raise ParseError("empty graph description", 1)
    first_no, first = body[0]
    if first.startswith("gen:"):
        if len(body) > 1:
            raise ParseError("unexpected content after generator line", body[1][0])
        return generate(first[4:], first_no)
    m = re.fullmatch(r"n\s*=\s*(\d+)", first)
    if not m:
        raise ParseError("expected 'n=<order>' or 'gen: <expr>'", first_no)
    order = int(m.group(1))
    if order > CAPACITY:
        raise CapacityExceeded(f"order {order} exceeds capacity {CAPACITY}")
    edges = []
    for no, ln in body[1:]:
        parts = ln.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ParseError(f"expected 'u v', got {ln!r}", no)
        u, v = int(parts[0]), int(parts[1])
        if u >= order or v >= order:
            raise ParseError(f"vertex index exceeds declared order {order}", no)
        if u == v:
            raise ParseError(f"loop at vertex {u}", no)
        edges.append((u, v))
    return Graph.from_edges(order, edges)


def serialize_graph(g: Graph) -> str:
    out = [f"n={g.order}"]
    out += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(out) + "\n"


def load_graph(source: str) -> Graph:
    """Accept either a ``gen:`` expression or a path to an edge-list file."""
    if source.lstrip().startswith("gen:"):
        return parse_graph(source)
    with open(source, encoding="utf-8") as fh:
        return parse_graph(fh.read())
