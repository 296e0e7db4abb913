"""Cluster lexicons, per-item covariate counts, and the word-frequency table.

A partition of the bigram graph turns into a lexicon (one word set per
cluster); an item's covariate vector counts how many of its description
tokens fall in each set.  Tokens count with multiplicity by default.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import UncoveredNode
from .graph import Graph
from .textnet import TokenizedDoc


@dataclass(frozen=True)
class ClusterLexicon:
    """Ordered (cluster index, word set) pairs; sets pairwise disjoint."""

    clusters: tuple[tuple[int, frozenset[str]], ...]

    def __post_init__(self):
        seen: set[str] = set()
        for idx, (k, words) in enumerate(self.clusters):
            if k != idx:
                raise ValueError(f"cluster indices not contiguous at {k}")
            overlap = seen & words
            if overlap:
                raise ValueError(f"words in several clusters: {sorted(overlap)[:5]}")
            seen |= words

    @property
    def k(self) -> int:
        return len(self.clusters)

    def word_to_cluster(self) -> dict[str, int]:
        return {w: k for k, words in self.clusters for w in words}


@dataclass(frozen=True)
class CovariateTable:
    item_ids: tuple
    matrix: np.ndarray  # items x clusters, nonnegative ints

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    def row(self, item_id) -> np.ndarray:
        return self.matrix[self.item_ids.index(item_id)]

    def write(self, path, delimiter=",") -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            header = ["item_id"] + [f"c{k + 1}" for k in range(self.k)]
            fh.write(delimiter.join(header) + "\n")
            for i, item in enumerate(self.item_ids):
                cells = [str(item)] + [str(int(x)) for x in self.matrix[i]]
                fh.write(delimiter.join(cells) + "\n")


def lexicons_from_partition(bigram_graph, partition) -> ClusterLexicon:
    """Cluster word sets are exactly the partition classes."""
    graph: Graph = bigram_graph.graph if hasattr(bigram_graph, "graph") else bigram_graph
    for w in graph.nodes:
        if w not in partition.assignment:
            raise UncoveredNode(f"word {w!r} not in the partition")
    sets: list[set[str]] = [set() for _ in range(partition.k)]
    for w in graph.nodes:
        sets[partition.assignment[w]].add(w)
    return ClusterLexicon(tuple((k, frozenset(s)) for k, s in enumerate(sets)))


def count_features(doc: TokenizedDoc, lexicon: ClusterLexicon,
                   presence_only: bool = False) -> np.ndarray:
    """Per-cluster token counts for one document.

    With ``presence_only`` a matched word counts once no matter how often
    it occurs; the default counts every occurrence.
    """
    w2c = lexicon.word_to_cluster()
    counts = np.zeros(lexicon.k, dtype=np.int64)
    tokens = set(doc.tokens) if presence_only else doc.tokens
    for t in tokens:
        k = w2c.get(t)
        if k is not None:
            counts[k] += 1
    return counts


def build_covariates(docs, lexicon: ClusterLexicon,
                     presence_only: bool = False) -> CovariateTable:
    """Stack count_features over documents (one row per item)."""
    matrix = np.zeros((len(docs), lexicon.k), dtype=np.int64)
    ids = []
    for i, doc in enumerate(docs):
        ids.append(doc.item_id)
        matrix[i] = count_features(doc, lexicon, presence_only)
    return CovariateTable(tuple(ids), matrix)


def word_frequencies(corpus, stopwords) -> list[tuple[str, int]]:
    """Non-stop-word token counts, descending, ties alphabetical."""
    stop = stopwords.words if hasattr(stopwords, "words") else frozenset(stopwords)
    counts: Counter = Counter()
    for doc in corpus:
        for t in doc.tokens:
            if t not in stop:
                counts[t] += 1
    return sorted(counts.items(), key=lambda wc: (-wc[1], wc[0]))


def write_word_frequencies(rows, path, delimiter=",") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(delimiter.join(("word", "frequency")) + "\n")
        for word, count in rows:
            fh.write(delimiter.join((word, str(count))) + "\n")
