"""A small undirected weighted graph with hashable node labels.

This is the workhorse type shared by the item network, the bigram network
and everything downstream (community detection, topology statistics, the
ERGM).  It deliberately stays simple: an insertion-ordered adjacency dict
plus a cached CSR view for the numeric kernels.  Graphs are treated as
immutable once handed to an algorithm; nothing here mutates a graph it
received.
"""

from __future__ import annotations

import xml.sax.saxutils as saxutils
from typing import Hashable, Iterable, Iterator

import numpy as np

from .errors import EmptyGraph

Node = Hashable


class Graph:
    """Simple undirected graph; parallel edges collapse, self-loops rejected."""

    def __init__(self, nodes: Iterable[Node] = (), edges: Iterable = ()):
        self._adj: dict[Node, dict[Node, float]] = {}
        self._m = 0
        self._total_weight = 0.0
        self._csr = None
        for v in nodes:
            self.add_node(v)
        for e in edges:
            self.add_edge(*e)

    # -- construction -------------------------------------------------

    def add_node(self, v: Node) -> None:
        if v not in self._adj:
            self._adj[v] = {}
            self._csr = None

    def add_edge(self, u: Node, v: Node, weight: float = 1.0) -> None:
        if u == v:
            raise ValueError(f"self-loop on {u!r} not allowed")
        if weight < 0:
            raise ValueError("negative edge weight")
        self.add_node(u)
        self.add_node(v)
        if v not in self._adj[u]:
            self._m += 1
        else:
            self._total_weight -= self._adj[u][v]
        self._adj[u][v] = float(weight)
        self._adj[v][u] = float(weight)
        self._total_weight += float(weight)
        self._csr = None

    # -- basic queries ------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return self._m

    @property
    def total_weight(self) -> float:
        """Sum of edge weights, each undirected edge counted once."""
        return self._total_weight

    @property
    def nodes(self) -> tuple:
        return tuple(self._adj)

    def __contains__(self, v: Node) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def has_edge(self, u: Node, v: Node) -> bool:
        return u in self._adj and v in self._adj[u]

    def weight(self, u: Node, v: Node) -> float:
        return self._adj[u].get(v, 0.0)

    def neighbors(self, v: Node):
        return self._adj[v].keys()

    def degree(self, v: Node) -> int:
        return len(self._adj[v])

    def strength(self, v: Node) -> float:
        """Weighted degree."""
        return sum(self._adj[v].values())

    def edges(self) -> Iterator[tuple]:
        """Yield each edge once as (u, v, weight), u preceding v in node order."""
        seen = set()
        for u in self._adj:
            for v, w in self._adj[u].items():
                if v not in seen:
                    yield (u, v, w)
            seen.add(u)

    def edge_list(self) -> list[tuple]:
        """Edges as (u, v, weight) sorted by node position, u before v."""
        pos = {v: i for i, v in enumerate(self._adj)}
        out = []
        for u in self._adj:
            for v, w in self._adj[u].items():
                if pos[u] < pos[v]:
                    out.append((u, v, w))
        out.sort(key=lambda e: (pos[e[0]], pos[e[1]]))
        return out

    # -- derived views ------------------------------------------------

    def to_csr(self):
        """CSR arrays (labels, indptr, indices, weights); neighbor lists sorted.

        Cached; the arrays are shared, so callers must not modify them.
        """
        if self._csr is None:
            labels = tuple(self._adj)
            index = {v: i for i, v in enumerate(labels)}
            indptr = np.zeros(len(labels) + 1, dtype=np.int64)
            for i, v in enumerate(labels):
                indptr[i + 1] = indptr[i] + len(self._adj[v])
            indices = np.empty(indptr[-1], dtype=np.int64)
            weights = np.empty(indptr[-1], dtype=np.float64)
            for i, v in enumerate(labels):
                nbrs = sorted((index[u] for u in self._adj[v]))
                lo = indptr[i]
                for k, j in enumerate(nbrs):
                    indices[lo + k] = j
                    weights[lo + k] = self._adj[v][labels[j]]
            self._csr = (labels, indptr, indices, weights)
        return self._csr

    def subgraph(self, nodes: Iterable[Node]) -> "Graph":
        keep = set(nodes)
        sub = Graph()
        for v in self._adj:
            if v in keep:
                sub.add_node(v)
        for u, v, w in self.edges():
            if u in keep and v in keep:
                sub.add_edge(u, v, w)
        return sub

    def connected_components(self) -> list[list[Node]]:
        """Components as node lists, BFS order, in node insertion order."""
        seen = set()
        comps = []
        for s in self._adj:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            queue = [s]
            while queue:
                u = queue.pop(0)
                for v in self._adj[u]:
                    if v not in seen:
                        seen.add(v)
                        comp.append(v)
                        queue.append(v)
            comps.append(comp)
        return comps

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    # -- serialization ------------------------------------------------

    def write_edge_list(self, path, delimiter=",", header=("node_a", "node_b"),
                        include_weight=False) -> None:
        """Write the edge list as delimited text, one edge per line."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            cols = list(header) + (["weight"] if include_weight else [])
            fh.write(delimiter.join(cols) + "\n")
            for u, v, w in self.edge_list():
                row = [str(u), str(v)]
                if include_weight:
                    row.append(format_number(w))
                fh.write(delimiter.join(row) + "\n")

    def write_graphml(self, path, weighted=False) -> None:
        """Minimal GraphML serialization (node ids are the string labels)."""
        if self.n == 0:
            raise EmptyGraph("cannot serialize an empty graph")
        esc = lambda s: saxutils.escape(str(s), {'"': "&quot;"})
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        ]
        if weighted:
            lines.append('  <key id="w" for="edge" attr.name="weight" attr.type="double"/>')
        lines.append('  <graph edgedefault="undirected">')
        for v in self._adj:
            lines.append(f'    <node id="{esc(v)}"/>')
        for u, v, w in self.edge_list():
            if weighted:
                lines.append(f'    <edge source="{esc(u)}" target="{esc(v)}">')
                lines.append(f'      <data key="w">{format_number(w)}</data>')
                lines.append("    </edge>")
            else:
                lines.append(f'    <edge source="{esc(u)}" target="{esc(v)}"/>')
        lines.append("  </graph>")
        lines.append("</graphml>")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")

    def write_dot(self, path) -> None:
        """Plain-text DOT output for external layout tools."""
        def q(s):
            return '"' + str(s).replace('"', '\\"') + '"'

        lines = ["graph G {"]
        for v in self._adj:
            lines.append(f"  {q(v)};")
        for u, v, _w in self.edge_list():
            lines.append(f"  {q(u)} -- {q(v)};")
        lines.append("}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def format_number(x) -> str:
    """Stable text form for numbers in artifacts (12 significant digits)."""
    if x is None:
        return "NA"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if xf != xf:  # NaN
        return "NA"
    if xf == int(xf) and abs(xf) < 1e15:
        return str(int(xf))
    return format(xf, ".12g")
