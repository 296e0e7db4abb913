"""Modularity and community detection for the bigram (or any) graph.

Seven algorithms are implemented: louvain, fast-greedy, label-propagation,
walktrap, leading-eigenvector, edge-betweenness and spinglass.  All are
deterministic given (graph, algorithm, seed); the stochastic ones consume
a seeded generator whose draws are precomputed in the driver so the
compiled and pure-Python kernels see the identical random stream.

``best_partition`` runs a set of algorithms, scores each with standard
modularity and returns the argmax partition (ties break lexicographically
by algorithm name).
"""

from __future__ import annotations

import hashlib
import heapq
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .errors import DisconnectedInput, EmptyGraph, UncoveredNode, UnsupportedAlgorithm
from .graph import Graph, format_number

ALGORITHMS = (
    "edge-betweenness",
    "fast-greedy",
    "label-propagation",
    "leading-eigenvector",
    "louvain",
    "spinglass",
    "walktrap",
)

_SEEDED = frozenset({"louvain", "label-propagation", "spinglass"})

MODULARITY_STANDARD = "standard"
MODULARITY_OFFDIAG = "offdiag"  # double sum restricted to i != j


@dataclass(frozen=True)
class Partition:
    """Disjoint assignment of every node to a cluster 0..k-1."""

    assignment: dict
    k: int

    def classes(self) -> list[list]:
        out: list[list] = [[] for _ in range(self.k)]
        for node, c in self.assignment.items():
            out[c].append(node)
        return out

    def cluster_of(self, node):
        return self.assignment[node]


@dataclass(frozen=True)
class ModularityRow:
    modularity: float
    k: int
    runtime_s: float


@dataclass(frozen=True)
class ModularityReport:
    rows: dict[str, ModularityRow]
    winner: str

    def write_table(self, path, delimiter=",") -> None:
        """Full report: algorithm, modularity, K, runtime (seconds)."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(delimiter.join(("algorithm", "modularity", "K", "runtime_s")) + "\n")
            for name in sorted(self.rows):
                r = self.rows[name]
                fh.write(delimiter.join(
                    (name, format_number(r.modularity), str(r.k),
                     format_number(r.runtime_s))) + "\n")


def _relabel(nodes, raw: dict) -> Partition:
    """Contiguous cluster ids ordered by first occurrence in node order."""
    remap: dict = {}
    assignment = {}
    for v in nodes:
        c = raw[v]
        if c not in remap:
            remap[c] = len(remap)
        assignment[v] = remap[c]
    return Partition(assignment, len(remap))


def _check_coverage(graph: Graph, partition: Partition) -> None:
    for v in graph.nodes:
        if v not in partition.assignment:
            raise UncoveredNode(f"node {v!r} missing from the partition")


def modularity(graph: Graph, partition: Partition,
               variant: str = MODULARITY_STANDARD) -> float:
    """Partition quality against the degree-preserving null model.

    ``standard`` sums over all ordered node pairs including i = j (the
    all-in-one partition scores exactly 0); ``offdiag`` restricts the sum
    to distinct pairs, which adds the constant sum(d_i^2) / 4m^2.
    Weighted graphs use edge weights and node strengths.
    """
    if variant not in (MODULARITY_STANDARD, MODULARITY_OFFDIAG):
        raise ValueError(f"unknown modularity variant {variant!r}")
    _check_coverage(graph, partition)
    m = graph.total_weight
    if m == 0.0:
        return 0.0
    w_in = np.zeros(partition.k)
    d_c = np.zeros(partition.k)
    for u, v, w in graph.edges():
        if partition.assignment[u] == partition.assignment[v]:
            w_in[partition.assignment[u]] += w
    sq_sum = 0.0
    for v in graph.nodes:
        s = graph.strength(v)
        d_c[partition.assignment[v]] += s
        sq_sum += s * s
    q = float(np.sum(w_in / m - (d_c / (2.0 * m)) ** 2))
    if variant == MODULARITY_OFFDIAG:
        q += sq_sum / (4.0 * m * m)
    return q


# ---------------------------------------------------------------------------
# louvain


def _aggregate(indptr, indices, weights, strength, labels, k):
    """Collapse communities into supernodes; self-weight folds into strength."""
    new_strength = np.zeros(k)
    for v in range(len(strength)):
        new_strength[labels[v]] += strength[v]
    agg: dict[tuple[int, int], float] = {}
    for v in range(len(strength)):
        cv = int(labels[v])
        for p in range(indptr[v], indptr[v + 1]):
            cu = int(labels[indices[p]])
            if cu != cv:
                agg[(cv, cu)] = agg.get((cv, cu), 0.0) + weights[p]
    new_indptr = np.zeros(k + 1, dtype=np.int64)
    items = sorted(agg.items())
    for (cv, _cu), _w in items:
        new_indptr[cv + 1] += 1
    np.cumsum(new_indptr, out=new_indptr)
    new_indices = np.empty(len(items), dtype=np.int64)
    new_weights = np.empty(len(items), dtype=np.float64)
    for pos, ((_cv, cu), w) in enumerate(items):
        new_indices[pos] = cu
        new_weights[pos] = w
    return new_indptr, new_indices, new_weights, new_strength


def _louvain(graph: Graph, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    nodes, indptr, indices, weights = graph.to_csr()
    strength = np.array([graph.strength(v) for v in nodes])
    two_m = float(strength.sum())
    node_comm = np.arange(len(nodes), dtype=np.int64)
    if two_m == 0.0:
        return {v: int(node_comm[i]) for i, v in enumerate(nodes)}
    while True:
        n = len(strength)
        labels = np.arange(n, dtype=np.int64)
        comm_tot = strength.copy()
        total_moves = 0
        while True:
            order = rng.permutation(n).astype(np.int64)
            moves = kern.louvain_local_pass(indptr, indices, weights, strength,
                                            labels, comm_tot, order, two_m)
            total_moves += moves
            if moves == 0:
                break
        uniq = sorted(set(int(c) for c in labels))
        if total_moves == 0 or len(uniq) == n:
            break
        remap = {c: i for i, c in enumerate(uniq)}
        compact = np.array([remap[int(c)] for c in labels], dtype=np.int64)
        node_comm = compact[node_comm]
        indptr, indices, weights, strength = _aggregate(
            indptr, indices, weights, strength, compact, len(uniq))
    return {v: int(node_comm[i]) for i, v in enumerate(nodes)}


# ---------------------------------------------------------------------------
# fast-greedy (greedy modularity agglomeration)


def _fast_greedy(graph: Graph) -> dict:
    nodes = graph.nodes
    n = len(nodes)
    m = graph.total_weight
    if m == 0.0:
        return {v: i for i, v in enumerate(nodes)}
    index = {v: i for i, v in enumerate(nodes)}
    d = np.array([graph.strength(v) for v in nodes])
    alive = [True] * n
    between: list[dict[int, float]] = [{} for _ in range(n)]
    for u, v, w in graph.edges():
        iu, iv = index[u], index[v]
        between[iu][iv] = w
        between[iv][iu] = w

    def dq(c1, c2, w12):
        return w12 / m - d[c1] * d[c2] / (2.0 * m * m)

    heap: list[tuple] = []
    for c1 in range(n):
        for c2, w12 in between[c1].items():
            if c1 < c2:
                heapq.heappush(heap, (-dq(c1, c2, w12), c1, c2, w12, d[c1], d[c2]))

    merges: list[tuple[int, int]] = []
    q_gain = [0.0]
    while heap:
        neg, c1, c2, w12, d1, d2 = heapq.heappop(heap)
        if not (alive[c1] and alive[c2]):
            continue
        if between[c1].get(c2) != w12 or d[c1] != d1 or d[c2] != d2:
            continue  # stale entry
        merges.append((c1, c2))
        q_gain.append(q_gain[-1] + (-neg))
        alive[c2] = False
        d[c1] += d[c2]
        del between[c1][c2]
        del between[c2][c1]
        for c3, w23 in between[c2].items():
            between[c3].pop(c2)
            between[c1][c3] = between[c1].get(c3, 0.0) + w23
            between[c3][c1] = between[c1][c3]
        between[c2].clear()
        for c3, w13 in sorted(between[c1].items()):
            a, b = (c1, c3) if c1 < c3 else (c3, c1)
            heapq.heappush(heap, (-dq(a, b, w13), a, b, w13, d[a], d[b]))

    best_step = int(np.argmax(q_gain))
    parent = list(range(n))
    for c1, c2 in merges[:best_step]:
        parent[c2] = c1

    def root(c):
        while parent[c] != c:
            c = parent[c]
        return c

    return {v: root(i) for i, v in enumerate(nodes)}


# ---------------------------------------------------------------------------
# label propagation


def _label_propagation(graph: Graph, seed: int, max_sweeps: int = 1000) -> dict:
    rng = np.random.default_rng(seed)
    nodes, indptr, indices, weights = graph.to_csr()
    n = len(nodes)
    labels = np.arange(n, dtype=np.int64)
    for _ in range(max_sweeps):
        order = rng.permutation(n).astype(np.int64)
        if kern.label_prop_pass(indptr, indices, weights, labels, order) == 0:
            break
    return {v: int(labels[i]) for i, v in enumerate(nodes)}


# ---------------------------------------------------------------------------
# walktrap (short random walks + Ward-style agglomeration)


def _walktrap(graph: Graph, walk_len: int = 4) -> dict:
    nodes = graph.nodes
    n = len(nodes)
    m = graph.total_weight
    if n == 0 or m == 0.0:
        return {v: i for i, v in enumerate(nodes)}
    index = {v: i for i, v in enumerate(nodes)}
    A = np.zeros((n, n))
    for u, v, w in graph.edges():
        A[index[u], index[v]] = w
        A[index[v], index[u]] = w
    strength = A.sum(axis=1)
    P = np.where(strength[:, None] > 0, A / np.where(strength[:, None] == 0, 1, strength[:, None]), 0.0)
    np.fill_diagonal(P, np.where(strength == 0, 1.0, P.diagonal()))
    Pt = np.linalg.matrix_power(P, walk_len)
    inv_d = np.where(strength > 0, 1.0 / np.where(strength == 0, 1, strength), 0.0)

    size = {c: 1 for c in range(n)}
    vec = {c: Pt[c] for c in range(n)}
    nbrs: dict[int, set[int]] = {c: set() for c in range(n)}
    for u, v, _w in graph.edges():
        nbrs[index[u]].add(index[v])
        nbrs[index[v]].add(index[u])

    def merge_cost(c1, c2):
        diff = vec[c1] - vec[c2]
        r2 = float(np.sum(diff * diff * inv_d))
        return (size[c1] * size[c2]) / (size[c1] + size[c2]) * r2 / n

    assign = {v: i for i, v in enumerate(nodes)}
    best_assign = dict(assign)
    best_q = modularity(graph, _relabel(nodes, assign))
    comm_of = list(range(n))
    while True:
        candidates = sorted(
            (c1, c2) for c1 in nbrs for c2 in nbrs[c1] if c1 < c2
        )
        if not candidates:
            break
        costs = [merge_cost(c1, c2) for c1, c2 in candidates]
        pick = int(np.argmin(costs))
        c1, c2 = candidates[pick]
        vec[c1] = (size[c1] * vec[c1] + size[c2] * vec[c2]) / (size[c1] + size[c2])
        size[c1] += size[c2]
        del vec[c2], size[c2]
        nbrs[c1] |= nbrs[c2]
        nbrs[c1].discard(c1)
        nbrs[c1].discard(c2)
        for c3 in nbrs.pop(c2):
            if c3 != c1:
                c3set = nbrs[c3]
                c3set.discard(c2)
                c3set.add(c1)
        comm_of = [c1 if c == c2 else c for c in comm_of]
        assign = {v: comm_of[i] for i, v in enumerate(nodes)}
        q = modularity(graph, _relabel(nodes, assign))
        if q > best_q:
            best_q = q
            best_assign = dict(assign)
    return best_assign


# ---------------------------------------------------------------------------
# leading eigenvector (recursive spectral bisection of the modularity matrix)


def _leading_eigenvector(graph: Graph, tol: float = 1e-12) -> dict:
    nodes = graph.nodes
    n = len(nodes)
    m = graph.total_weight
    if n == 0 or m == 0.0:
        return {v: i for i, v in enumerate(nodes)}
    index = {v: i for i, v in enumerate(nodes)}
    A = np.zeros((n, n))
    for u, v, w in graph.edges():
        A[index[u], index[v]] = w
        A[index[v], index[u]] = w
    strength = A.sum(axis=1)
    B = A - np.outer(strength, strength) / (2.0 * m)

    groups: list[np.ndarray] = []
    queue = [np.arange(n)]
    while queue:
        g = queue.pop(0)
        if len(g) == 1:
            groups.append(g)
            continue
        Bg = B[np.ix_(g, g)]
        Bg = Bg - np.diag(Bg.sum(axis=1))
        eigvals, eigvecs = np.linalg.eigh(Bg)
        lam = eigvals[-1]
        vec = eigvecs[:, -1]
        if lam <= tol:
            groups.append(g)
            continue
        for x in vec:
            if abs(x) > 1e-12:
                if x < 0:
                    vec = -vec
                break
        s = np.where(vec >= 0.0, 1.0, -1.0)
        gain = float(s @ Bg @ s) / (4.0 * m)
        plus = g[s > 0]
        minus = g[s < 0]
        if gain <= tol or len(plus) == 0 or len(minus) == 0:
            groups.append(g)
            continue
        queue.append(plus)
        queue.append(minus)

    raw = {}
    for c, g in enumerate(groups):
        for i in g:
            raw[nodes[i]] = c
    return raw


# ---------------------------------------------------------------------------
# edge betweenness (divisive, modularity-tracked)


def _edge_betweenness(graph: Graph) -> dict:
    nodes = graph.nodes
    n = len(nodes)
    index = {v: i for i, v in enumerate(nodes)}
    edges = [(index[u], index[v]) for u, v, _w in graph.edges()]
    alive = np.ones(len(edges), dtype=bool)

    def components(active_edges) -> dict:
        parent = list(range(n))

        def root(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in active_edges:
            ru, rv = root(u), root(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        return {nodes[i]: root(i) for i in range(n)}

    best_raw = components([e for e, a in zip(edges, alive) if a])
    best_q = modularity(graph, _relabel(nodes, best_raw))
    while alive.any():
        act = [k for k in range(len(edges)) if alive[k]]
        deg = np.zeros(n, dtype=np.int64)
        for k in act:
            u, v = edges[k]
            deg[u] += 1
            deg[v] += 1
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.empty(indptr[-1], dtype=np.int64)
        arc_edge = np.empty(indptr[-1], dtype=np.int64)
        fill = indptr[:-1].copy()
        for k in act:
            u, v = edges[k]
            indices[fill[u]] = v
            arc_edge[fill[u]] = k
            fill[u] += 1
            indices[fill[v]] = u
            arc_edge[fill[v]] = k
            fill[v] += 1
        for i in range(n):  # kernels expect sorted neighbor lists
            lo, hi = indptr[i], indptr[i + 1]
            order = np.argsort(indices[lo:hi], kind="stable")
            indices[lo:hi] = indices[lo:hi][order]
            arc_edge[lo:hi] = arc_edge[lo:hi][order]
        arc_bc = kern.edge_betweenness_arcs(indptr, indices)
        edge_bc = np.zeros(len(edges))
        np.add.at(edge_bc, arc_edge, arc_bc)
        cut = max(act, key=lambda k: (edge_bc[k], -edges[k][0], -edges[k][1]))
        alive[cut] = False
        raw = components([edges[k] for k in range(len(edges)) if alive[k]])
        q = modularity(graph, _relabel(nodes, raw))
        if q > best_q:
            best_q = q
            best_raw = raw
    return best_raw


# ---------------------------------------------------------------------------
# spinglass (simulated annealing of the configuration-null Potts energy)


def _spinglass_component(graph: Graph, comp, seed: int, spins_cap: int,
                         gamma: float, t_start: float, t_factor: float,
                         t_stop: float, sweeps_per_temp: int,
                         polish_sweeps: int) -> dict:
    sub = graph.subgraph(comp)
    nodes, indptr, indices, weights = sub.to_csr()
    n = len(nodes)
    q = min(spins_cap, n)
    rng = np.random.default_rng(seed)
    spins = rng.integers(0, q, n).astype(np.int64)
    strength = np.array([sub.strength(v) for v in nodes])
    two_m = float(strength.sum())
    if two_m == 0.0:
        return {v: 0 for v in nodes}
    gamma_over_2m = gamma / two_m
    spin_strength = np.bincount(spins, weights=strength, minlength=q).astype(np.float64)
    temp = t_start
    while temp > t_stop:
        for _ in range(sweeps_per_temp):
            order = rng.permutation(n).astype(np.int64)
            proposals = rng.integers(0, q, n).astype(np.int64)
            uniforms = rng.random(n)
            kern.spinglass_sweep(indptr, indices, weights, strength, spins,
                                 spin_strength, gamma_over_2m, 1.0 / temp,
                                 order, proposals, uniforms)
        temp *= t_factor
    # freeze: near-zero temperature rejects every uphill proposal
    for _ in range(polish_sweeps):
        order = rng.permutation(n).astype(np.int64)
        proposals = rng.integers(0, q, n).astype(np.int64)
        uniforms = rng.random(n)
        moves = kern.spinglass_sweep(indptr, indices, weights, strength, spins,
                                     spin_strength, gamma_over_2m, 1e12,
                                     order, proposals, uniforms)
        if moves == 0:
            break
    return {v: int(spins[i]) for i, v in enumerate(nodes)}


def _spinglass(graph: Graph, seed: int, per_component: bool = True,
               spins_cap: int = 25, gamma: float = 1.0, t_start: float = 1.0,
               t_factor: float = 0.99, t_stop: float = 0.01,
               sweeps_per_temp: int = 1, polish_sweeps: int = 50) -> dict:
    comps = graph.connected_components()
    if len(comps) > 1 and not per_component:
        raise DisconnectedInput(
            f"graph has {len(comps)} components; spinglass needs a connected "
            "graph when per-component mode is disabled")
    raw: dict = {}
    offset = 0
    for ci, comp in enumerate(comps):
        part = _spinglass_component(
            graph, comp, np.random.SeedSequence([seed, ci]).generate_state(1)[0],
            spins_cap, gamma, t_start, t_factor, t_stop, sweeps_per_temp,
            polish_sweeps)
        used = max(part.values()) + 1 if part else 0
        for v, c in part.items():
            raw[v] = offset + c
        offset += used
    return raw


# ---------------------------------------------------------------------------
# dispatch


def detect(graph: Graph, algorithm: str, seed: int | None = None, **options) -> Partition:
    """Run one community-detection algorithm; result is a valid Partition.

    ``seed`` is mandatory for louvain, label-propagation and spinglass.
    Spinglass runs per connected component unless ``per_component=False``,
    in which case a disconnected graph raises DisconnectedInput.
    """
    if algorithm not in ALGORITHMS:
        raise UnsupportedAlgorithm(
            f"{algorithm!r}; supported: {', '.join(ALGORITHMS)}")
    if algorithm in _SEEDED and seed is None:
        raise ValueError(f"{algorithm} requires a seed")
    if graph.n == 0:
        return Partition({}, 0)
    if algorithm == "louvain":
        raw = _louvain(graph, seed)
    elif algorithm == "fast-greedy":
        raw = _fast_greedy(graph)
    elif algorithm == "label-propagation":
        raw = _label_propagation(graph, seed)
    elif algorithm == "walktrap":
        raw = _walktrap(graph, options.get("walk_len", 4))
    elif algorithm == "leading-eigenvector":
        raw = _leading_eigenvector(graph)
    elif algorithm == "edge-betweenness":
        raw = _edge_betweenness(graph)
    else:
        raw = _spinglass(graph, seed,
                         per_component=options.get("per_component", True),
                         spins_cap=options.get("spins_cap", 25),
                         gamma=options.get("gamma", 1.0),
                         t_start=options.get("t_start", 1.0),
                         t_factor=options.get("t_factor", 0.99),
                         t_stop=options.get("t_stop", 0.01),
                         sweeps_per_temp=options.get("sweeps_per_temp", 1))
    return _relabel(graph.nodes, raw)


def _algorithm_seed(seed: int, algorithm: str) -> int:
    digest = hashlib.sha256(f"{seed}:{algorithm}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def best_partition(graph: Graph, algorithms, seed: int,
                   **options) -> tuple[ModularityReport, Partition]:
    """Run several algorithms and keep the highest-modularity partition."""
    algorithms = list(algorithms)
    if not algorithms:
        raise ValueError("at least one algorithm required")
    if graph.n == 0:
        raise EmptyGraph("cannot cluster an empty graph")
    rows: dict[str, ModularityRow] = {}
    parts: dict[str, Partition] = {}
    for name in algorithms:
        t0 = time.perf_counter()
        part = detect(graph, name, seed=_algorithm_seed(seed, name), **options)
        elapsed = time.perf_counter() - t0
        rows[name] = ModularityRow(modularity(graph, part), part.k, elapsed)
        parts[name] = part
    winner = min(rows, key=lambda name: (-rows[name].modularity, name))
    return ModularityReport(rows, winner), parts[winner]
