# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel implementations.

Statement-for-statement mirror of ``_pykern.py`` (same iteration order,
same floating-point operation order), so results are identical to the
pure-Python backend.  Keep the two files in sync.
"""

from libc.math cimport exp

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def louvain_local_pass(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                       cnp.float64_t[::1] weights, cnp.float64_t[::1] strength,
                       cnp.int64_t[::1] labels, cnp.float64_t[::1] comm_tot,
                       cnp.int64_t[::1] order, double two_m):
    """One local-moving sweep; mutates ``labels`` and ``comm_tot``."""
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t t, k
    cdef long v, a, u, c, best
    cdef double s_v, gain, best_gain
    cdef long moves = 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] k_vc_arr = np.zeros(
        comm_tot.shape[0], dtype=np.float64)
    cdef cnp.float64_t[::1] k_vc = k_vc_arr
    cdef cnp.ndarray[cnp.int8_t, ndim=1] seen_arr = np.zeros(
        comm_tot.shape[0], dtype=np.int8)
    cdef cnp.int8_t[::1] seen = seen_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] touched_arr = np.zeros(
        comm_tot.shape[0] + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] touched = touched_arr
    cdef long n_touched

    for t in range(n):
        v = order[t]
        a = labels[v]
        s_v = strength[v]
        n_touched = 0
        k_vc[a] = 0.0
        seen[a] = 1
        touched[n_touched] = a
        n_touched += 1
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            c = labels[u]
            if not seen[c]:
                seen[c] = 1
                touched[n_touched] = c
                n_touched += 1
            k_vc[c] = k_vc[c] + weights[k]
        comm_tot[a] -= s_v
        best = a
        best_gain = k_vc[a] - s_v * comm_tot[a] / two_m
        touched_arr[:n_touched].sort()
        for k in range(n_touched):
            c = touched[k]
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
        for k in range(n_touched):
            k_vc[touched[k]] = 0.0
            seen[touched[k]] = 0
    return moves


def label_prop_pass(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                    cnp.float64_t[::1] weights, cnp.int64_t[::1] labels,
                    cnp.int64_t[::1] order):
    """One asynchronous label-propagation sweep; mutates ``labels``."""
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t t, k
    cdef long v, c, best, n_touched
    cdef double w, best_w
    cdef long moves = 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tall_arr = np.zeros(
        labels.shape[0], dtype=np.float64)
    cdef cnp.float64_t[::1] tall = tall_arr
    cdef cnp.ndarray[cnp.int8_t, ndim=1] seen_arr = np.zeros(
        labels.shape[0], dtype=np.int8)
    cdef cnp.int8_t[::1] seen = seen_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] touched_arr = np.zeros(
        labels.shape[0] + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] touched = touched_arr

    for t in range(n):
        v = order[t]
        if indptr[v] == indptr[v + 1]:
            continue
        n_touched = 0
        for k in range(indptr[v], indptr[v + 1]):
            c = labels[indices[k]]
            if not seen[c]:
                seen[c] = 1
                touched[n_touched] = c
                n_touched += 1
            tall[c] = tall[c] + weights[k]
        best = -1
        best_w = -1.0
        touched_arr[:n_touched].sort()
        for k in range(n_touched):
            c = touched[k]
            w = tall[c]
            if w > best_w:
                best = c
                best_w = w
        if best != labels[v]:
            labels[v] = best
            moves += 1
        for k in range(n_touched):
            tall[touched[k]] = 0.0
            seen[touched[k]] = 0
    return moves


def spinglass_sweep(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                    cnp.float64_t[::1] weights, cnp.float64_t[::1] strength,
                    cnp.int64_t[::1] spins, cnp.float64_t[::1] spin_strength,
                    double gamma_over_2m, double inv_temp,
                    cnp.int64_t[::1] order, cnp.int64_t[::1] proposals,
                    cnp.float64_t[::1] uniforms):
    """One Metropolis sweep of the Potts Hamiltonian; mutates state arrays."""
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t t, k
    cdef long v, a, b, c
    cdef double k_a, k_b, d_v, gain_a, gain_b, delta_h
    cdef long moves = 0

    for t in range(n):
        v = order[t]
        a = spins[v]
        b = proposals[t]
        if b == a:
            continue
        k_a = 0.0
        k_b = 0.0
        for k in range(indptr[v], indptr[v + 1]):
            c = spins[indices[k]]
            if c == a:
                k_a += weights[k]
            elif c == b:
                k_b += weights[k]
        d_v = strength[v]
        gain_b = k_b - gamma_over_2m * d_v * spin_strength[b]
        gain_a = k_a - gamma_over_2m * d_v * (spin_strength[a] - d_v)
        delta_h = gain_a - gain_b
        if delta_h <= 0.0 or uniforms[t] < exp(-delta_h * inv_temp):
            spins[v] = b
            spin_strength[a] -= d_v
            spin_strength[b] += d_v
            moves += 1
    return moves


def edge_betweenness_arcs(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices):
    """Brandes edge betweenness (unweighted); one value per CSR arc."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arc_bc_arr = np.zeros(
        indices.shape[0], dtype=np.float64)
    cdef cnp.float64_t[::1] arc_bc = arc_bc_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dist_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] dist = dist_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sigma_arr = np.empty(max(n, 1), dtype=np.float64)
    cdef cnp.float64_t[::1] sigma = sigma_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] delta_arr = np.empty(max(n, 1), dtype=np.float64)
    cdef cnp.float64_t[::1] delta = delta_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bfs_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] bfs = bfs_arr
    cdef Py_ssize_t s, i, k
    cdef long v, w, head, tail
    cdef double coef, contrib

    for s in range(n):
        for i in range(n):
            dist[i] = -1
            sigma[i] = 0.0
            delta[i] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        bfs[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = bfs[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    bfs[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        for i in range(tail - 1, 0, -1):
            w = bfs[i]
            coef = (1.0 + delta[w]) / sigma[w]
            for k in range(indptr[w], indptr[w + 1]):
                v = indices[k]
                if dist[v] == dist[w] - 1:
                    contrib = sigma[v] * coef
                    arc_bc[k] += contrib
                    delta[v] += contrib
    return arc_bc_arr


def geodesic_histogram(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices):
    """BFS from every node; histogram of ordered-pair distances."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hist_arr = np.zeros(
        max(n, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] hist = hist_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dist_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] dist = dist_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bfs_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] bfs = bfs_arr
    cdef long unreachable = 0
    cdef Py_ssize_t s, i, k
    cdef long v, w, head, tail

    for s in range(n):
        for i in range(n):
            dist[i] = -1
        dist[s] = 0
        bfs[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = bfs[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    hist[dist[w]] += 1
                    bfs[tail] = w
                    tail += 1
        unreachable += n - tail
    return hist_arr, unreachable


def triangle_count(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices):
    """Total number of triangles (requires sorted neighbor lists)."""
    cdef long total = 0
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t u, k
    cdef long v, i, j, iend, jend, wi, wj

    for u in range(n):
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
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


def core_numbers(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices):
    """Core number of every node by iterated minimum-degree peeling."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] deg_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] deg = deg_arr
    cdef Py_ssize_t v_ix
    cdef long v, u, w, k, d, max_deg, du, pu, pw

    if n == 0:
        return np.empty(0, dtype=np.int64)
    max_deg = 0
    for v_ix in range(n):
        deg[v_ix] = indptr[v_ix + 1] - indptr[v_ix]
        if deg[v_ix] > max_deg:
            max_deg = deg[v_ix]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bin_start_arr = np.zeros(
        max_deg + 2, dtype=np.int64)
    cdef cnp.int64_t[::1] bin_start = bin_start_arr
    for v_ix in range(n):
        bin_start[deg[v_ix] + 1] += 1
    for d in range(1, max_deg + 2):
        bin_start[d] += bin_start[d - 1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pos_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] pos = pos_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] vert_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] vert = vert_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] fill_arr = bin_start_arr[:max_deg + 1].copy()
    cdef cnp.int64_t[::1] fill = fill_arr
    for v_ix in range(n):
        pos[v_ix] = fill[deg[v_ix]]
        vert[pos[v_ix]] = v_ix
        fill[deg[v_ix]] += 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] core_arr = deg_arr.copy()
    cdef cnp.int64_t[::1] core = core_arr
    for v_ix in range(n):
        v = vert[v_ix]
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            if core[u] > core[v]:
                du = core[u]
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    vert[pu] = w
                    vert[pw] = u
                    pos[u] = pw
                    pos[w] = pu
                bin_start[du] += 1
                core[u] -= 1
    return core_arr
