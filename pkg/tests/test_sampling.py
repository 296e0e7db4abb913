import math

import numpy as np
import pytest

from coview.errors import OutOfRange
from coview.ingest import CatalogEntry
from coview.sampling import (
    SamplingParams,
    filter_genres,
    sample_size,
    stratified_sample,
    z_critical,
)


def entry(item_id, genres, score):
    return CatalogEntry(str(item_id), f"t{item_id}", score,
                        frozenset(genres), "desc")


class TestZCritical:
    def test_95(self):
        assert z_critical(0.95) == pytest.approx(1.959964, abs=1e-6)

    def test_85(self):
        assert z_critical(0.85) == pytest.approx(1.439531, abs=1e-6)

    def test_small_confidence_approaches_zero(self):
        assert z_critical(1e-9) == pytest.approx(0.0, abs=1e-6)

    def test_out_of_range(self):
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(OutOfRange):
                z_critical(bad)


class TestSampleSize:
    def test_zero_variance(self):
        assert sample_size(1000, 0.0, 0.95, 0.2) == 0

    def test_known_value(self):
        # 1.96^2 * 4 * 1000 / (999 * 0.04 + 1.96^2 * 4) = 277.7, ceiling
        assert sample_size(1000, 4.0, 0.95, 0.2) == 278

    def test_single_member_population(self):
        assert sample_size(1, 3.0, 0.95, 0.2) == 1

    def test_clamped_to_population(self):
        assert sample_size(5, 100.0, 0.99, 0.01) == 5

    def test_monotone_in_variance_and_confidence(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            N = int(rng.integers(5, 10_000))
            s2 = float(rng.uniform(0.1, 9.0))
            conf = float(rng.uniform(0.5, 0.99))
            e = float(rng.uniform(0.05, 1.0))
            base = sample_size(N, s2, conf, e)
            assert sample_size(N, s2 * 1.5, conf, e) >= base
            assert sample_size(N, s2, min(conf + 0.009, 0.9999), e) >= base
            assert sample_size(N, s2, conf, e * 1.5) <= base

    def test_infinite_population_limit(self):
        z = z_critical(0.95)
        limit = z * z * 4.0 / (0.2 * 0.2)
        assert abs(sample_size(10 ** 9, 4.0, 0.95, 0.2) - limit) <= 1.0

    def test_preconditions(self):
        with pytest.raises(OutOfRange):
            sample_size(0, 1.0, 0.9, 0.1)
        with pytest.raises(OutOfRange):
            sample_size(10, -1.0, 0.9, 0.1)
        with pytest.raises(OutOfRange):
            sample_size(10, 1.0, 0.9, 0.0)


class TestFilterGenres:
    def test_strictly_more_than_cutoff(self):
        catalog = [entry(i, ["Edge"], 5.0) for i in range(100)]
        params = SamplingParams(min_genre_count=100, seed=0)
        assert "Edge" not in filter_genres(catalog, params)
        catalog.append(entry(100, ["Edge"], 5.0))
        assert filter_genres(catalog, params) == {"Edge": 101}

    def test_excluded_genre_never_a_stratum(self):
        catalog = [entry(i, ["Skip", "Keep"], 5.0) for i in range(20)]
        params = SamplingParams(min_genre_count=1, seed=0,
                                excluded_genres=frozenset({"Skip"}))
        strata = filter_genres(catalog, params)
        assert "Skip" not in strata and "Keep" in strata

    def test_empty_catalog(self):
        assert filter_genres([], SamplingParams(seed=0)) == {}


class TestStratifiedSample:
    def test_disjoint_strata_union(self):
        catalog = [entry(i, ["G1"], float(i % 7) + 1) for i in range(10)]
        catalog += [entry(100 + i, ["G2"], float(i % 5) + 2) for i in range(20)]
        params = SamplingParams(confidence=0.99, margin_of_error=0.01,
                                min_genre_count=2, seed=3)
        plan, sampled = stratified_sample(catalog, params)
        # the tiny margin forces n = N in both strata
        assert plan.per_genre["G1"].sample_size == 10
        assert plan.per_genre["G2"].sample_size == 20
        assert plan.union_size == len(sampled) == 30

    def test_overlapping_item_counted_once(self):
        catalog = [entry(i, ["A"], 3.0 + i) for i in range(5)]
        catalog += [entry(10 + i, ["B"], 4.0 + i) for i in range(5)]
        catalog.append(entry(99, ["A", "B"], 5.0))
        params = SamplingParams(confidence=0.99, margin_of_error=0.01,
                                min_genre_count=2, seed=1)
        plan, sampled = stratified_sample(catalog, params)
        total = sum(p.sample_size for p in plan.per_genre.values())
        assert "99" in sampled
        assert plan.union_size == total - 1  # drawn in both strata, kept once

    def test_degenerate_stratum_takes_single_member(self):
        catalog = [entry(1, ["Solo"], 6.0)]
        catalog += [entry(10 + i, ["Big"], float(i)) for i in range(8)]
        params = SamplingParams(min_genre_count=0, seed=2)
        plan, sampled = stratified_sample(catalog, params)
        assert plan.per_genre["Solo"].variance == 0.0
        assert plan.per_genre["Solo"].sample_size == 1
        assert "1" in sampled

    def test_missing_scores_excluded_from_frame(self):
        catalog = [entry(i, ["G"], 5.0 + i) for i in range(6)]
        catalog.append(entry(50, ["G"], None))
        params = SamplingParams(confidence=0.99, margin_of_error=0.01,
                                min_genre_count=0, seed=4)
        plan, sampled = stratified_sample(catalog, params)
        assert plan.per_genre["G"].population == 6
        assert "50" not in sampled

    def test_deterministic_across_runs(self):
        rng = np.random.default_rng(9)
        catalog = [entry(i, [f"G{rng.integers(3)}"], float(rng.uniform(1, 9)))
                   for i in range(60)]
        params = SamplingParams(margin_of_error=0.5, min_genre_count=3, seed=77)
        _, first = stratified_sample(catalog, params)
        _, second = stratified_sample(catalog, params)
        assert first == second

    def test_variance_uses_n_minus_1(self):
        catalog = [entry(i, ["G"], s) for i, s in enumerate([2.0, 4.0, 9.0])]
        params = SamplingParams(min_genre_count=0, seed=0)
        plan, _ = stratified_sample(catalog, params)
        assert plan.per_genre["G"].variance == pytest.approx(
            np.var([2.0, 4.0, 9.0], ddof=1))
