"""Finite-population sample sizing and per-genre stratified sampling.

The per-stratum sample size comes from the variance-based formula

    n = Z^2 * S^2 * N / ((N - 1) * E^2 + Z^2 * S^2)

rounded up and clamped to the population.  Strata are the genres that clear
an occurrence cutoff; an item belonging to several sampled genres can be
drawn repeatedly but appears once in the final union.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .errors import OutOfRange


@dataclass(frozen=True)
class SamplingParams:
    confidence: float = 0.85
    margin_of_error: float = 0.2
    min_genre_count: int = 100
    excluded_genres: frozenset[str] = field(default_factory=frozenset)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.confidence < 1.0:
            raise OutOfRange(f"confidence {self.confidence} outside (0, 1)")
        if self.margin_of_error <= 0.0:
            raise OutOfRange(f"margin_of_error {self.margin_of_error} <= 0")
        if self.min_genre_count < 0:
            raise OutOfRange("min_genre_count < 0")


@dataclass(frozen=True)
class StratumPlan:
    population: int
    variance: float
    sample_size: int


@dataclass(frozen=True)
class SamplePlan:
    per_genre: dict[str, StratumPlan]
    union_size: int

    def rows(self):
        """(genre, N, S2, n) rows sorted by genre, for the delimited report."""
        return [
            (g, p.population, p.variance, p.sample_size)
            for g, p in sorted(self.per_genre.items())
        ]


def z_critical(confidence: float) -> float:
    """Two-sided standard-normal critical value for the given confidence."""
    if not 0.0 < confidence < 1.0:
        raise OutOfRange(f"confidence {confidence} outside (0, 1)")
    return float(ndtri(1.0 - (1.0 - confidence) / 2.0))


def sample_size(N: int, S2: float, confidence: float, E: float) -> int:
    """Required sample size, rounded up, clamped to [0, N]."""
    if N < 1:
        raise OutOfRange(f"population {N} < 1")
    if S2 < 0.0:
        raise OutOfRange(f"variance {S2} < 0")
    if E <= 0.0:
        raise OutOfRange(f"margin of error {E} <= 0")
    z2s2 = z_critical(confidence) ** 2 * S2
    if z2s2 == 0.0:
        return 0
    n = math.ceil(z2s2 * N / ((N - 1) * E * E + z2s2))
    return max(0, min(n, N))


def filter_genres(catalog, params: SamplingParams) -> dict[str, int]:
    """Genres kept as strata: occurrence count strictly above the cutoff.

    Items keep all their genres; only under-represented genres stop being
    strata.  Excluded genres never form a stratum.
    """
    counts: dict[str, int] = {}
    for entry in catalog:
        for g in entry.genres:
            counts[g] = counts.get(g, 0) + 1
    return {
        g: c
        for g, c in sorted(counts.items())
        if c > params.min_genre_count and g not in params.excluded_genres
    }


def _stratum_rng(seed: int, genre: str) -> np.random.Generator:
    """Independent, order-free substream per stratum."""
    digest = hashlib.sha256(genre.encode("utf-8")).digest()
    return np.random.default_rng(np.random.SeedSequence(
        [seed, int.from_bytes(digest[:8], "big")]))


def stratified_sample(catalog, params: SamplingParams):
    """Draw the per-genre simple random samples and take their union.

    Only items with a Score enter a stratum (the variance formula needs
    Score).  A single-member stratum is degenerate: it contributes its one
    item and records S^2 = 0.  Returns ``(SamplePlan, sampled item ids)``.
    """
    strata = filter_genres(catalog, params)
    per_genre: dict[str, StratumPlan] = {}
    union: set[str] = set()
    for genre in strata:
        members = sorted(
            (e for e in catalog if genre in e.genres and e.score is not None),
            key=lambda e: e.item_id,
        )
        N = len(members)
        if N == 0:
            per_genre[genre] = StratumPlan(0, 0.0, 0)
            continue
        scores = np.array([e.score for e in members], dtype=np.float64)
        if N == 1:
            S2 = 0.0
            n = 1
        else:
            S2 = float(np.var(scores, ddof=1))
            n = sample_size(N, S2, params.confidence, params.margin_of_error)
        per_genre[genre] = StratumPlan(N, S2, n)
        if n > 0:
            rng = _stratum_rng(params.seed, genre)
            chosen = rng.choice(N, size=n, replace=False)
            union.update(members[i].item_id for i in chosen)
    return SamplePlan(per_genre, len(union)), union


def write_sample_plan(plan: SamplePlan, path, delimiter=",") -> None:
    from .graph import format_number

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(delimiter.join(("genre", "N", "S2", "n")) + "\n")
        for genre, N, S2, n in plan.rows():
            fh.write(delimiter.join((genre, str(N), format_number(S2), str(n))) + "\n")
