"""Tokenization, bigram extraction, and the frequency-threshold bigram graph.

Two stop-word orderings are supported: dropping stop words before pairing
adjacent tokens ("remove-before", which creates bigrams across the gaps) and
pairing first, then discarding any bigram containing a stop word
("remove-after", the default).  The graph-building threshold is picked off a
skewness dispersogram: the skewness of the surviving bigram counts as the
minimum-frequency cutoff grows.
"""

from __future__ import annotations

import re
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import Degenerate, EmptyGraph, EmptySeries
from .graph import Graph, format_number

REMOVE_BEFORE = "remove-before"
REMOVE_AFTER = "remove-after"

# Apostrophes and hyphens vanish inside words ("stop-motion's" -> "stopmotions");
# every other non-alphanumeric character splits tokens.
_JOINERS = re.compile(r"[''’\-]")
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class TokenizedDoc:
    item_id: str | None
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class BigramCounts:
    """Directed adjacent-pair counts; direction merges at graph build."""

    counts: dict[tuple[str, str], int]
    mode: str

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class BigramGraph:
    graph: Graph
    threshold_used: int

    @property
    def words(self) -> tuple:
        return self.graph.nodes


def tokenize(text: str, item_id: str | None = None) -> TokenizedDoc:
    """Lowercase and split on non-letter/digit runs; joiners are deleted."""
    cleaned = _JOINERS.sub("", text.lower())
    return TokenizedDoc(item_id, tuple(_TOKEN.findall(cleaned)))


def _doc_bigrams(tokens, stop: frozenset, mode: str) -> Counter:
    out: Counter = Counter()
    if mode == REMOVE_BEFORE:
        kept = [t for t in tokens if t not in stop]
        for a, b in zip(kept, kept[1:]):
            out[(a, b)] += 1
    elif mode == REMOVE_AFTER:
        for a, b in zip(tokens, tokens[1:]):
            if a not in stop and b not in stop:
                out[(a, b)] += 1
    else:
        raise ValueError(f"unknown stop-word mode {mode!r}")
    return out


def _chunk_bigrams(args):
    docs, stop, mode = args
    total: Counter = Counter()
    for tokens in docs:
        total.update(_doc_bigrams(tokens, stop, mode))
    return total


def extract_bigrams(corpus, stopwords, mode: str = REMOVE_AFTER,
                    workers: int = 1) -> BigramCounts:
    """Count adjacent word pairs across the corpus (never across documents).

    ``workers > 1`` splits the corpus into chunks counted in parallel; the
    merge is commutative so the result is order-independent.
    """
    stop = frozenset(stopwords.words) if hasattr(stopwords, "words") else frozenset(stopwords)
    token_lists = [doc.tokens for doc in corpus]
    if workers > 1 and len(token_lists) >= 4 * workers:
        size = (len(token_lists) + workers - 1) // workers
        chunks = [token_lists[i:i + size] for i in range(0, len(token_lists), size)]
        total: Counter = Counter()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_chunk_bigrams, [(c, stop, mode) for c in chunks]):
                total.update(part)
    else:
        total = _chunk_bigrams((token_lists, stop, mode))
    return BigramCounts(dict(total), mode)


def skewness(values) -> float:
    """Moment-estimator sample skewness m3 / m2^(3/2)."""
    vals = [float(v) for v in values]
    n = len(vals)
    if n < 3:
        raise Degenerate(f"skewness needs at least 3 values, got {n}")
    mean = sum(vals) / n
    m2 = sum((x - mean) ** 2 for x in vals) / n
    if m2 == 0.0:
        raise Degenerate("skewness undefined for a constant sequence")
    m3 = sum((x - mean) ** 3 for x in vals) / n
    return m3 / m2 ** 1.5


def dispersogram(counts: BigramCounts, thresholds) -> list[tuple[int, float | None]]:
    """Skewness of counts surviving each threshold; None where undefined."""
    thresholds = [int(t) for t in thresholds]
    if any(t < 1 for t in thresholds):
        raise ValueError("thresholds must be >= 1")
    if sorted(thresholds) != thresholds:
        raise ValueError("thresholds must be ascending")
    values = sorted(counts.counts.values())
    series: list[tuple[int, float | None]] = []
    for t in thresholds:
        surviving = [v for v in values if v >= t]
        if len(surviving) < 3:
            series.append((t, None))
            continue
        try:
            series.append((t, skewness(surviving)))
        except Degenerate:
            series.append((t, None))
    return series


def select_threshold(series, rule) -> int:
    """Pick the bigram-frequency cutoff from a dispersogram.

    ``rule`` is ``("manual", t)`` or ``("plateau", window, tol)``.  The
    plateau rule returns the smallest threshold whose next ``window``
    entries change skewness by less than ``tol`` step to step; if no such
    window exists the last threshold is returned with a warning.
    """
    if not series:
        raise EmptySeries("empty dispersogram")
    kind = rule[0]
    if kind == "manual":
        return int(rule[1])
    if kind != "plateau":
        raise ValueError(f"unknown threshold rule {rule!r}")
    window, tol = int(rule[1]), float(rule[2])
    present = [(t, s) for t, s in series if s is not None]
    for i in range(len(present)):
        if i + window >= len(present):
            break
        diffs = [
            abs(present[i + k + 1][1] - present[i + k][1])
            for k in range(window)
        ]
        if max(diffs) < tol:
            return present[i][0]
    last = series[-1][0]
    warnings.warn(f"no skewness plateau found; falling back to threshold {last}")
    return last


def build_bigram_graph(counts: BigramCounts, threshold: int) -> BigramGraph:
    """Merge bigram directions and keep edges at or above the threshold.

    Self-pairs (a word adjacent to itself) are dropped; words left without
    a surviving edge do not enter the graph.
    """
    if threshold < 1:
        raise ValueError(f"threshold {threshold} < 1")
    merged: dict[tuple[str, str], int] = {}
    for (a, b), c in counts.counts.items():
        if a == b:
            continue
        key = (a, b) if a <= b else (b, a)
        merged[key] = merged.get(key, 0) + c
    edges = [(a, b, w) for (a, b), w in sorted(merged.items()) if w >= threshold]
    if not edges:
        raise EmptyGraph(f"no bigram reaches threshold {threshold}")
    g = Graph(edges=edges)
    return BigramGraph(g, int(threshold))


def write_dispersogram(series, path, delimiter=",") -> None:
    """Two-column (threshold, skewness) file for external plotting."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(delimiter.join(("threshold", "skewness")) + "\n")
        for t, s in series:
            fh.write(delimiter.join((str(t), format_number(s))) + "\n")
