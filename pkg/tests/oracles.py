"""Independent brute-force oracles used by the tests.

Everything here is deliberately naive (enumeration, dense linear algebra,
direct formula evaluation) and shares no code with the implementations it
checks.
"""

import itertools

import numpy as np


def brute_item_projection(pairs, item_order):
    """Pairwise audience-intersection counts by direct set arithmetic."""
    audiences = {i: {u for u, j in pairs if j == i} for i in item_order}
    p = len(item_order)
    out = np.zeros((p, p), dtype=np.int64)
    for a in range(p):
        for b in range(p):
            if a != b:
                out[a, b] = len(audiences[item_order[a]] & audiences[item_order[b]])
    return out


def brute_user_projection(pairs, user_order):
    items_of = {u: {j for v, j in pairs if v == u} for u in user_order}
    n = len(user_order)
    out = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            if a != b:
                out[a, b] = len(items_of[user_order[a]] & items_of[user_order[b]])
    return out


def brute_modularity(graph, assignment, include_diagonal=True):
    """Direct evaluation of the double-sum modularity formula."""
    nodes = graph.nodes
    m = graph.total_weight
    if m == 0:
        return 0.0
    total = 0.0
    for i in nodes:
        for j in nodes:
            if not include_diagonal and i == j:
                continue
            if assignment[i] != assignment[j]:
                continue
            y = graph.weight(i, j) if i != j else 0.0
            total += y - graph.strength(i) * graph.strength(j) / (2.0 * m)
    return total / (2.0 * m)


def set_partitions(items):
    """Every partition of ``items`` (restricted-growth enumeration)."""
    items = list(items)
    n = len(items)
    if n == 0:
        yield []
        return
    codes = [0] * n
    maxes = [0] * n
    while True:
        groups = {}
        for item, c in zip(items, codes):
            groups.setdefault(c, []).append(item)
        yield list(groups.values())
        for i in range(n - 1, 0, -1):
            if codes[i] <= maxes[i - 1]:
                codes[i] += 1
                maxes[i] = max(maxes[i], codes[i])
                for j in range(i + 1, n):
                    codes[j] = 0
                    maxes[j] = maxes[i]
                break
        else:
            return


def exhaustive_max_modularity(graph):
    """Maximum standard modularity over every partition (n <= ~10)."""
    best_q = -np.inf
    best = None
    for groups in set_partitions(graph.nodes):
        assignment = {}
        for c, group in enumerate(groups):
            for v in group:
                assignment[v] = c
        q = brute_modularity(graph, assignment)
        if q > best_q:
            best_q = q
            best = assignment
    return best_q, best


def brute_core_numbers(graph):
    """Core numbers by testing every k with iterated deletion."""
    core = {v: 0 for v in graph.nodes}
    max_deg = max((graph.degree(v) for v in graph.nodes), default=0)
    for k in range(max_deg + 1):
        alive = set(graph.nodes)
        changed = True
        while changed:
            changed = False
            for v in sorted(alive, key=str):
                if sum(1 for u in graph.neighbors(v) if u in alive) < k:
                    alive.discard(v)
                    changed = True
        for v in alive:
            core[v] = k
    return core


def dense_eigenvector(graph):
    """Dominant eigenvector per component via dense eigendecomposition."""
    scores = {}
    for comp in graph.connected_components():
        if len(comp) == 1:
            scores[comp[0]] = 0.0
            continue
        index = {v: i for i, v in enumerate(comp)}
        a = np.zeros((len(comp), len(comp)))
        for v in comp:
            for u in graph.neighbors(v):
                a[index[v], index[u]] = graph.weight(v, u)
        vals, vecs = np.linalg.eigh(a)
        vec = np.abs(vecs[:, -1])
        vec = vec / vec.max()
        for v in comp:
            scores[v] = float(vec[index[v]])
    return scores


def brute_clique_number(graph):
    """Largest clique by checking every subset (n <= ~12)."""
    nodes = graph.nodes
    best = 1 if nodes else 0
    for r in range(2, len(nodes) + 1):
        for subset in itertools.combinations(nodes, r):
            if all(graph.has_edge(a, b) for a, b in itertools.combinations(subset, 2)):
                best = max(best, r)
    return best


def logistic_mle(X, y):
    """Independent logistic-regression fit (statsmodels Newton)."""
    import statsmodels.api as sm

    res = sm.Logit(np.asarray(y, dtype=float), np.asarray(X, dtype=float)).fit(
        disp=0, method="newton", tol=1e-10, maxiter=200)
    return np.asarray(res.params), np.asarray(res.bse)
