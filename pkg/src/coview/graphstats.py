"""Topology summary, k-core decomposition, and eigenvector centrality.

The summary mirrors the usual single-table network description: mean
geodesic distance over connected pairs, degree mean/SD, clique number,
density, transitivity, and degree assortativity.  Eigenvector centrality
is computed per connected component by damped power iteration and
max-normalized; cluster keyword ranking applies it to each cluster's
induced subgraph.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .errors import EmptyGraph, EmptySelection, NoConvergence
from .graph import Graph, format_number


@dataclass(frozen=True)
class TopologySummary:
    mean_geodesic: float | None
    mean_degree: float
    sd_degree: float | None
    clique_number: int
    density: float
    transitivity: float
    assortativity: float | None
    unreachable_pairs: int = 0  # ordered pairs excluded from the geodesic mean
    clique_is_lower_bound: bool = False  # set when the exact search timed out

    def rows(self):
        return [
            ("mean_geodesic", self.mean_geodesic),
            ("mean_degree", self.mean_degree),
            ("sd_degree", self.sd_degree),
            ("clique_number", self.clique_number),
            ("density", self.density),
            ("transitivity", self.transitivity),
            ("assortativity", self.assortativity),
        ]

    def write(self, path, delimiter=",") -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(delimiter.join(("statistic", "value")) + "\n")
            for name, value in self.rows():
                fh.write(delimiter.join((name, format_number(value))) + "\n")


@dataclass(frozen=True)
class CoreDecomposition:
    core_number: dict

    def median(self) -> float:
        return float(np.median(list(self.core_number.values())))

    def write(self, path, delimiter=",") -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(delimiter.join(("node", "core")) + "\n")
            for node, core in self.core_number.items():
                fh.write(delimiter.join((str(node), str(core))) + "\n")


@dataclass(frozen=True)
class CentralityScores:
    scores: dict

    def __getitem__(self, node) -> float:
        return self.scores[node]


def _max_clique(graph: Graph, time_budget_s: float) -> tuple[int, bool]:
    """Exact branch-and-bound with greedy coloring bound.

    Returns (size, is_lower_bound); the flag is set when the budget ran
    out and the best clique found so far is reported instead.
    """
    nodes, indptr, indices, _ = graph.to_csr()
    n = len(nodes)
    adj = [frozenset(int(j) for j in indices[indptr[i]:indptr[i + 1]]) for i in range(n)]
    order = sorted(range(n), key=lambda v: len(adj[v]))
    deadline = time.perf_counter() + time_budget_s
    best = 0
    timed_out = False

    # greedy lower bound first, so a timeout still reports something useful
    for start in range(n):
        clique = [start]
        for v in order:
            if v != start and all(v in adj[u] for u in clique):
                clique.append(v)
        best = max(best, len(clique))

    def color_bound(cand: list[int]) -> list[int]:
        colors: dict[int, int] = {}
        classes: list[set[int]] = []
        for v in cand:
            for c, cls in enumerate(classes):
                if not (adj[v] & cls):
                    cls.add(v)
                    colors[v] = c
                    break
            else:
                classes.append({v})
                colors[v] = len(classes) - 1
        return [colors[v] for v in cand]

    def expand(clique_size: int, cand: list[int]):
        nonlocal best, timed_out
        if time.perf_counter() > deadline:
            timed_out = True
            return
        colors = color_bound(cand)
        # nondecreasing color order makes colors[i] + 1 a valid bound for cand[:i+1]
        by_color = sorted(range(len(cand)), key=colors.__getitem__)
        cand = [cand[k] for k in by_color]
        colors = [colors[k] for k in by_color]
        for i in range(len(cand) - 1, -1, -1):
            if clique_size + colors[i] + 1 <= best:
                return
            v = cand[i]
            new_cand = [u for u in cand[:i] if u in adj[v]]
            if clique_size + 1 > best:
                best = clique_size + 1
            if new_cand:
                expand(clique_size + 1, new_cand)
            if timed_out:
                return

    expand(0, list(range(n)))
    return best, timed_out


def summary(graph: Graph, clique_time_budget_s: float = 10.0) -> TopologySummary:
    """Seven-statistic topology description of a simple undirected graph."""
    n = graph.n
    if n == 0:
        raise EmptyGraph("summary of an empty graph")
    _, indptr, indices, _ = graph.to_csr()
    degrees = np.diff(indptr).astype(np.float64)
    m = graph.m

    hist, unreachable = kern.geodesic_histogram(indptr, indices)
    reached = int(hist.sum())
    if reached > 0:
        mean_geo = float(np.sum(hist * np.arange(len(hist))) / reached)
    else:
        mean_geo = None

    mean_deg = float(degrees.mean())
    sd_deg = float(degrees.std(ddof=1)) if n >= 2 else None

    density = 2.0 * m / (n * (n - 1)) if n >= 2 else 0.0

    triangles = int(kern.triangle_count(indptr, indices))
    triples = float(np.sum(degrees * (degrees - 1) / 2.0))
    transitivity = 3.0 * triangles / triples if triples > 0 else 0.0

    if m > 0:
        x = []
        y = []
        for u, v, _w in graph.edges():
            du, dv = graph.degree(u), graph.degree(v)
            x.extend((du, dv))
            y.extend((dv, du))
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        sx = x.std()
        if sx == 0.0:
            assort = None
        else:
            assort = float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * y.std()))
    else:
        assort = None

    if m == 0:
        clique, lower = (1 if n else 0), False
    else:
        clique, lower = _max_clique(graph, clique_time_budget_s)
    return TopologySummary(mean_geo, mean_deg, sd_deg, clique, density,
                           transitivity, assort, unreachable, lower)


def kcore(graph: Graph) -> CoreDecomposition:
    """Core number of every node (iterated minimum-degree peeling)."""
    nodes, indptr, indices, _ = graph.to_csr()
    if not nodes:
        return CoreDecomposition({})
    core = kern.core_numbers(indptr, indices)
    return CoreDecomposition({v: int(core[i]) for i, v in enumerate(nodes)})


def kcore_subgraph(graph: Graph, rule) -> Graph:
    """Induced subgraph selected by core number.

    ``rule`` is ``("below-median",)`` (core number strictly below the median
    core number) or ``("at-least", k)``.
    """
    decomp = kcore(graph)
    kind = rule[0]
    if kind == "below-median":
        cut = decomp.median()
        keep = [v for v, c in decomp.core_number.items() if c < cut]
    elif kind == "at-least":
        keep = [v for v, c in decomp.core_number.items() if c >= int(rule[1])]
    else:
        raise ValueError(f"unknown k-core rule {rule!r}")
    if not keep:
        raise EmptySelection(f"k-core rule {rule!r} selected no nodes")
    return graph.subgraph(keep)


def eigenvector_centrality(graph: Graph, tol: float = 1e-10,
                           max_iter: int = 10 ** 6) -> CentralityScores:
    """Damped power iteration on the adjacency, per connected component.

    Iterates (A + I) x, which shifts the spectrum away from the bipartite
    +/- pair and guarantees convergence to the dominant eigenvector.
    Scores are absolute values, max-normalized to 1 within each component;
    isolated nodes score 0.
    """
    scores: dict = {}
    for comp in graph.connected_components():
        if len(comp) == 1:
            scores[comp[0]] = 0.0
            continue
        sub = graph.subgraph(comp)
        nodes, indptr, indices, weights = sub.to_csr()
        nloc = len(nodes)
        x = np.full(nloc, 1.0 / nloc)
        converged = False
        for _ in range(max_iter):
            nxt = x.copy()  # the +I damping term
            for i in range(nloc):
                lo, hi = indptr[i], indptr[i + 1]
                nxt[i] += float(np.dot(weights[lo:hi], x[indices[lo:hi]]))
            nxt /= np.linalg.norm(nxt)
            if float(np.max(np.abs(nxt - x))) < tol:
                x = nxt
                converged = True
                break
            x = nxt
        if not converged:
            raise NoConvergence(f"power iteration did not converge in {max_iter} steps")
        x = np.abs(x)
        x /= x.max()
        for i, v in enumerate(nodes):
            scores[v] = float(x[i])
    return CentralityScores(scores)


def rank_cluster_words(bigram_graph, partition) -> dict[int, list[tuple[str, float]]]:
    """Within each cluster's induced subgraph, rank words by centrality.

    Returns cluster index -> [(word, score)] sorted by descending score,
    ties alphabetical.
    """
    graph: Graph = bigram_graph.graph if hasattr(bigram_graph, "graph") else bigram_graph
    from .community import _check_coverage  # shared coverage validation
    _check_coverage(graph, partition)
    ranked: dict[int, list[tuple[str, float]]] = {}
    for k, members in enumerate(partition.classes()):
        sub = graph.subgraph(members)
        cent = eigenvector_centrality(sub)
        ranked[k] = sorted(
            ((w, cent.scores[w]) for w in sub.nodes),
            key=lambda ws: (-ws[1], ws[0]),
        )
    return ranked


def write_cluster_keywords(ranked, path, delimiter=",") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(delimiter.join(("cluster", "rank", "word", "centrality")) + "\n")
        for k in sorted(ranked):
            for rank, (word, score) in enumerate(ranked[k], start=1):
                fh.write(delimiter.join(
                    (str(k + 1), str(rank), word, format_number(score))) + "\n")
