"""Incidence matrix, one-mode projections, and co-audience binarization.

The user-item incidence is held sparse (hundreds of thousands of users are
expected); both projections stay sparse with the diagonal forced to zero
(self-pairs are structural zeros, not observations).  Binarization keeps an
item pair when the Jaccard coefficient of their audiences reaches ``tau``:
shared viewers over viewers of either item.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, EmptyGraph
from .graph import Graph, format_number


@dataclass(frozen=True)
class BipartiteGraph:
    """Binary user x item incidence with ordered labels."""

    user_ids: tuple
    item_ids: tuple
    incidence: sp.csr_matrix
    dropped: int = 0  # interactions discarded for referencing unknown items

    @property
    def n_users(self) -> int:
        return len(self.user_ids)

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    def dense(self) -> np.ndarray:
        return self.incidence.toarray()

    def item_degrees(self) -> np.ndarray:
        """Audience size per item (column sums)."""
        return np.asarray(self.incidence.sum(axis=0)).ravel().astype(np.int64)

    def user_degrees(self) -> np.ndarray:
        return np.asarray(self.incidence.sum(axis=1)).ravel().astype(np.int64)


@dataclass(frozen=True)
class WeightedGraph:
    """Symmetric nonnegative integer weights with a zero diagonal."""

    node_ids: tuple
    weights: sp.csr_matrix

    def dense(self) -> np.ndarray:
        return self.weights.toarray()

    def edge_rows(self):
        """Upper-triangle nonzeros as (node_a, node_b, weight), sorted."""
        coo = sp.triu(self.weights, k=1).tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [
            (self.node_ids[coo.row[k]], self.node_ids[coo.col[k]], int(coo.data[k]))
            for k in order
        ]

    def write_edge_list(self, path, delimiter=",") -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(delimiter.join(("node_a", "node_b", "weight")) + "\n")
            for a, b, w in self.edge_rows():
                fh.write(delimiter.join((str(a), str(b), format_number(w))) + "\n")


def build_incidence(interactions, item_universe=None) -> BipartiteGraph:
    """Build the binary incidence; pairs outside ``item_universe`` drop.

    Row order is sorted user ids; column order follows ``item_universe``
    (or sorted item ids seen in the interactions when not given).
    """
    if item_universe is None:
        item_ids = tuple(sorted(interactions.items))
        pairs = list(interactions.pairs)
        dropped = 0
    else:
        item_ids = tuple(item_universe)
        known = set(item_ids)
        pairs = [(u, i) for u, i in interactions.pairs if i in known]
        dropped = len(interactions.pairs) - len(pairs)
    if not pairs:
        raise EmptyGraph("no interactions survive the item filter")
    user_ids = tuple(sorted({u for u, _ in pairs}))
    urow = {u: r for r, u in enumerate(user_ids)}
    icol = {i: c for c, i in enumerate(item_ids)}
    rows = np.fromiter((urow[u] for u, i in pairs), dtype=np.int64, count=len(pairs))
    cols = np.fromiter((icol[i] for u, i in pairs), dtype=np.int64, count=len(pairs))
    data = np.ones(len(pairs), dtype=np.int64)
    inc = sp.csr_matrix((data, (rows, cols)), shape=(len(user_ids), len(item_ids)))
    inc.sum_duplicates()
    inc.data[:] = 1
    return BipartiteGraph(user_ids, item_ids, inc, dropped)


def _project(mat: sp.csr_matrix, labels) -> WeightedGraph:
    w = (mat.T @ mat).tocsr()
    w.setdiag(0)
    w.eliminate_zeros()
    w.sort_indices()
    return WeightedGraph(tuple(labels), w.astype(np.int64))


def project_items(b: BipartiteGraph) -> WeightedGraph:
    """Item x item co-audience counts (Y'Y with structural-zero diagonal)."""
    return _project(b.incidence, b.item_ids)


def project_users(b: BipartiteGraph) -> WeightedGraph:
    """User x user shared-item counts (YY' with structural-zero diagonal)."""
    return _project(b.incidence.T.tocsr(), b.user_ids)


def binarize(w: WeightedGraph, b: BipartiteGraph, tau: float = 0.75,
             drop_isolated: bool = False) -> Graph:
    """Keep item pairs whose audience Jaccard reaches ``tau``.

    For items i, j with co-audience ``co`` and audience sizes ``a_i, a_j``
    the edge criterion is ``co / (a_i + a_j - co) >= tau``; pairs with an
    empty union never form an edge.  Items left without edges stay in the
    graph unless ``drop_isolated`` is set.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau {tau} outside (0, 1]")
    if w.node_ids != tuple(b.item_ids):
        raise DimensionMismatch("weighted graph nodes do not match the incidence items")
    if w.weights.shape != (b.n_items, b.n_items):
        raise DimensionMismatch("weight matrix shape does not match the incidence")
    audience = b.item_degrees()
    g = Graph()
    if not drop_isolated:
        for item in b.item_ids:
            g.add_node(item)
    coo = sp.triu(w.weights, k=1).tocoo()
    order = np.lexsort((coo.col, coo.row))
    for k in order:
        i, j, co = int(coo.row[k]), int(coo.col[k]), int(coo.data[k])
        union = int(audience[i]) + int(audience[j]) - co
        if union > 0 and co / union >= tau:
            g.add_edge(b.item_ids[i], b.item_ids[j])
    return g
