"""Graph enumerations used by the property sweeps."""
from __future__ import annotations

import networkx as nx

from mbdgame.graph import Graph


def from_nx(g: nx.Graph) -> Graph:
    nodes = sorted(g.nodes())
    pos = {v: i for i, v in enumerate(nodes)}
    return Graph.from_edges(len(nodes), [(pos[u], pos[v]) for u, v in g.edges()])


def connected_graphs(max_order: int = 7, min_order: int = 1) -> list[Graph]:
    """All connected graphs up to isomorphism with min_order..max_order (<= 7) vertices."""
    out = []
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if min_order <= n <= max_order and n > 0 and nx.is_connected(g):
            out.append(from_nx(g))
    return out


def connected_graphs_8() -> list[Graph]:
    """Connected 8-vertex graphs, possibly with isomorphic repeats.

    Every connected graph has a vertex whose removal keeps it connected, so
    attaching a new vertex to a connected 7-vertex graph in every possible way
    reaches every isomorphism class.
    """
    out = []
    for base in connected_graphs(7, 7):
        for nbrs in range(1, 1 << 7):
            adj = list(base.adjacency) + [nbrs]
            for v in range(7):
                if nbrs >> v & 1:
                    adj[v] |= 1 << 7
            out.append(Graph(8, tuple(adj)))
    return out
