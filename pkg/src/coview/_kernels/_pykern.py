"""Pure-Python kernel implementations.

These are the reference versions of the hot loops; `_ckern.pyx` mirrors
them statement for statement so both backends produce identical results
(same iteration order, same floating-point operation order).  Keep the two
files in sync when changing anything here.

All kernels operate on CSR arrays produced by ``Graph.to_csr`` (neighbor
lists sorted by node index) and never touch Python-level graph objects.
"""

import math

import numpy as np

BACKEND = "python"


def louvain_local_pass(indptr, indices, weights, strength, labels, comm_tot,
                       order, two_m):
    """One local-moving sweep; mutates ``labels`` and ``comm_tot``.

    For each node (in ``order``) the node is removed from its community and
    re-inserted into the candidate community with the largest gain
    ``k_vc - strength_v * comm_tot[c] / two_m``; ties go to the lowest
    community id.  Returns the number of nodes that changed community.
    """
    n = len(order)
    moves = 0
    k_vc = {}
    for t in range(n):
        v = int(order[t])
        a = int(labels[v])
        s_v = strength[v]
        k_vc.clear()
        k_vc[a] = 0.0
        for k in range(indptr[v], indptr[v + 1]):
            u = int(indices[k])
            c = int(labels[u])
            k_vc[c] = k_vc.get(c, 0.0) + weights[k]
        comm_tot[a] -= s_v
        best = a
        best_gain = k_vc[a] - s_v * comm_tot[a] / two_m
        for c in sorted(k_vc):
            if c == a:
                continue
            gain = k_vc[c] - s_v * comm_tot[c] / two_m
            if gain > best_gain or (gain == best_gain and c < best):
                best = c
                best_gain = gain
        labels[v] = best
        comm_tot[best] += s_v
        if best != a:
            moves += 1
    return moves


def label_prop_pass(indptr, indices, weights, labels, order):
    """One asynchronous label-propagation sweep; mutates ``labels``.

    Each node adopts the label with the largest total incident weight among
    its neighbors, ties to the lowest label.  Returns changed-node count.
    """
    moves = 0
    tall = {}
    for t in range(len(order)):
        v = int(order[t])
        if indptr[v] == indptr[v + 1]:
            continue
        tall.clear()
        for k in range(indptr[v], indptr[v + 1]):
            c = int(labels[indices[k]])
            tall[c] = tall.get(c, 0.0) + weights[k]
        best = -1
        best_w = -1.0
        for c in sorted(tall):
            w = tall[c]
            if w > best_w:
                best = c
                best_w = w
        if best != labels[v]:
            labels[v] = best
            moves += 1
    return moves


def spinglass_sweep(indptr, indices, weights, strength, spins, spin_strength,
                    gamma_over_2m, inv_temp, order, proposals, uniforms):
    """One Metropolis sweep of the Potts Hamiltonian; mutates state arrays.

    ``H = -sum_{i<j} (w_ij - gamma * d_i * d_j / 2m) * [s_i == s_j]``;
    a proposed single-spin move is accepted when it does not increase H,
    or with probability ``exp(-dH * inv_temp)`` otherwise.  Randomness
    (visit order, proposed spins, acceptance uniforms) is supplied by the
    caller so both backends consume the identical stream.
    """
    moves = 0
    for t in range(len(order)):
        v = int(order[t])
        a = int(spins[v])
        b = int(proposals[t])
        if b == a:
            continue
        k_a = 0.0
        k_b = 0.0
        for k in range(indptr[v], indptr[v + 1]):
            c = int(spins[indices[k]])
            if c == a:
                k_a += weights[k]
            elif c == b:
                k_b += weights[k]
        d_v = strength[v]
        gain_b = k_b - gamma_over_2m * d_v * spin_strength[b]
        gain_a = k_a - gamma_over_2m * d_v * (spin_strength[a] - d_v)
        delta_h = gain_a - gain_b
        if delta_h <= 0.0 or uniforms[t] < math.exp(-delta_h * inv_temp):
            spins[v] = b
            spin_strength[a] -= d_v
            spin_strength[b] += d_v
            moves += 1
    return moves


def edge_betweenness_arcs(indptr, indices):
    """Brandes edge betweenness (unweighted shortest paths).

    Returns one value per CSR arc; the caller sums the two arc directions
    of each undirected edge and halves the total (each unordered pair is
    visited from both endpoints).
    """
    n = len(indptr) - 1
    arc_bc = np.zeros(len(indices), dtype=np.float64)
    dist = np.empty(n, dtype=np.int64)
    sigma = np.empty(n, dtype=np.float64)
    delta = np.empty(n, dtype=np.float64)
    bfs = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist[:] = -1
        sigma[:] = 0.0
        delta[:] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        bfs[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = int(bfs[head])
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = int(indices[k])
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    bfs[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        for i in range(tail - 1, 0, -1):
            w = int(bfs[i])
            coef = (1.0 + delta[w]) / sigma[w]
            for k in range(indptr[w], indptr[w + 1]):
                v = int(indices[k])
                if dist[v] == dist[w] - 1:
                    c = sigma[v] * coef
                    arc_bc[k] += c
                    delta[v] += c
    return arc_bc


def geodesic_histogram(indptr, indices):
    """BFS from every node; histogram of ordered-pair distances.

    Returns ``(hist, unreachable)`` where ``hist[d]`` counts ordered pairs
    at distance ``d >= 1`` and ``unreachable`` counts ordered pairs with no
    connecting path.
    """
    n = len(indptr) - 1
    hist = np.zeros(max(n, 1), dtype=np.int64)
    unreachable = 0
    dist = np.empty(n, dtype=np.int64)
    bfs = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist[:] = -1
        dist[s] = 0
        bfs[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = int(bfs[head])
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = int(indices[k])
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    hist[dist[w]] += 1
                    bfs[tail] = w
                    tail += 1
        unreachable += n - tail
    return hist, unreachable


def triangle_count(indptr, indices):
    """Total number of triangles (requires sorted neighbor lists)."""
    total = 0
    n = len(indptr) - 1
    for u in range(n):
        for k in range(indptr[u], indptr[u + 1]):
            v = int(indices[k])
            if v <= u:
                continue
            i = indptr[u]
            j = indptr[v]
            iend = indptr[u + 1]
            jend = indptr[v + 1]
            while i < iend and j < jend:
                wi = indices[i]
                wj = indices[j]
                if wi < wj:
                    i += 1
                elif wj < wi:
                    j += 1
                else:
                    if wi > v:
                        total += 1
                    i += 1
                    j += 1
    return total


def core_numbers(indptr, indices):
    """Core number of every node by iterated minimum-degree peeling."""
    n = len(indptr) - 1
    deg = np.empty(n, dtype=np.int64)
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
    max_deg = int(deg.max()) if n else 0
    bin_start = np.zeros(max_deg + 2, dtype=np.int64)
    for v in range(n):
        bin_start[deg[v] + 1] += 1
    for d in range(1, max_deg + 2):
        bin_start[d] += bin_start[d - 1]
    pos = np.empty(n, dtype=np.int64)
    vert = np.empty(n, dtype=np.int64)
    fill = bin_start[:-1].copy()
    for v in range(n):
        pos[v] = fill[deg[v]]
        vert[pos[v]] = v
        fill[deg[v]] += 1
    core = deg.copy()
    for i in range(n):
        v = int(vert[i])
        for k in range(indptr[v], indptr[v + 1]):
            u = int(indices[k])
            if core[u] > core[v]:
                du = core[u]
                pu = pos[u]
                pw = bin_start[du]
                w = int(vert[pw])
                if u != w:
                    vert[pu] = w
                    vert[pw] = u
                    pos[u] = pw
                    pos[w] = pu
                bin_start[du] += 1
                core[u] -= 1
    return core
