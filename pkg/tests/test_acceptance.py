"""Acceptance suite: one test per release criterion, each timed against its
budget and printing a PASS/FAIL line (run with ``pytest -s`` to see them).
"""

import itertools
import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from coview import bipartite, ergm, graphstats, sampling, textnet
from coview.cli import main as cli_main
from coview.community import ALGORITHMS, Partition, best_partition, modularity
from coview.ergm import build_design, expected_stats, fit, observed_stats, simulate
from coview.features import ClusterLexicon, CovariateTable, count_features
from coview.graph import Graph
from coview.ingest import InteractionSet, StopwordList

from conftest import TOY_PAIRS
from oracles import (
    brute_clique_number,
    brute_core_numbers,
    dense_eigenvector,
    exhaustive_max_modularity,
    logistic_mle,
)


@contextmanager
def criterion(number, label, budget_s):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"FAIL criterion {number}: {label}")
        raise
    elapsed = time.perf_counter() - start
    print(f"PASS criterion {number}: {label} ({elapsed:.2f}s, budget {budget_s}s)")
    assert elapsed < budget_s, f"criterion {number} exceeded its {budget_s}s budget"


def random_graph(rng, n, p=0.4):
    g = Graph(nodes=list(range(n)))
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < p:
            g.add_edge(i, j)
    return g


def test_criterion_01_toy_projections():
    with criterion(1, "toy incidence projections match the worked example", 1.0):
        b = bipartite.build_incidence(InteractionSet(TOY_PAIRS), ["A", "B", "C", "D"])
        np.testing.assert_array_equal(bipartite.project_items(b).dense(), [
            [0, 2, 1, 1],
            [2, 0, 2, 1],
            [1, 2, 0, 1],
            [1, 1, 1, 0],
        ])
        np.testing.assert_array_equal(bipartite.project_users(b).dense(), [
            [0, 1, 2],
            [1, 0, 2],
            [2, 2, 0],
        ])
        assert np.all(np.diag(bipartite.project_items(b).dense()) == 0)


def test_criterion_02_toy_covariates():
    with criterion(2, "toy description counts (1, 2) against the two clusters", 1.0):
        lexicon = ClusterLexicon((
            (0, frozenset({"day", "sun"})),
            (1, frozenset({"adventure", "glory", "fantasy"})),
        ))
        doc = textnet.tokenize(
            "A young girl embarks on an epic adventure filled with glory "
            "until one day she achieves her goal")
        np.testing.assert_array_equal(count_features(doc, lexicon), [1, 2])


def test_criterion_03_ergm_oracle_equivalence(tmp_path):
    with criterion(3, "fit matches the independent logistic oracle on 25 designs", 30.0):
        rng = np.random.default_rng(0)
        for case in range(25):
            g = random_graph(rng, 12, p=0.4)
            cov = CovariateTable(tuple(g.nodes), rng.integers(0, 4, (12, 3)))
            design = build_design(g, cov)
            fitted = fit(design)
            assert fitted.converged

            # the oracle reads the exported dyad table, not internal arrays
            out = tmp_path / f"design_{case}.csv"
            design.write(out)
            rows = out.read_text().splitlines()[1:]
            table = np.array([[float(x) for x in r.split(",")[2:]] for r in rows])
            params, bse = logistic_mle(table[:, 1:], table[:, 0])
            np.testing.assert_allclose(fitted.theta, params, atol=1e-6)
            np.testing.assert_allclose(fitted.std_error, bse, atol=1e-6)


def test_criterion_04_ergm_closed_form():
    with criterion(4, "edges-only fit equals logit(density); moment condition", 5.0):
        rng = np.random.default_rng(2024)
        for _ in range(10):
            n = int(rng.integers(6, 14))
            g = random_graph(rng, n, p=0.5)
            dyads = n * (n - 1) // 2
            assert 0 < g.m < dyads
            design = build_design(g, terms=("edges",))
            fitted = fit(design)
            density = g.m / dyads
            assert fitted.theta[0] == pytest.approx(
                math.log(density / (1.0 - density)), abs=1e-10)
            np.testing.assert_allclose(
                expected_stats(fitted.theta, design), observed_stats(design),
                atol=1e-6)
        # moment condition with covariate terms as well
        g = random_graph(np.random.default_rng(12), 12, p=0.45)
        cov = CovariateTable(tuple(g.nodes),
                             np.random.default_rng(13).integers(0, 4, (12, 3)))
        design = build_design(g, cov)
        fitted = fit(design)
        np.testing.assert_allclose(
            expected_stats(fitted.theta, design), observed_stats(design), atol=1e-6)


def test_criterion_05_modularity(two_cliques, triangle_bridge):
    with criterion(5, "modularity null values, bridge fixture, exhaustive max", 30.0):
        rng = np.random.default_rng(55)
        checked = 0
        while checked < 20:
            g = random_graph(rng, int(rng.integers(3, 12)),
                             p=float(rng.uniform(0.2, 0.8)))
            if g.m == 0:
                continue
            checked += 1
            q = modularity(g, Partition({v: 0 for v in g.nodes}, 1))
            assert abs(q) < 1e-12
        part = Partition({0: 0, 1: 0, 2: 0, 3: 1, 4: 1, 5: 1}, 2)
        assert modularity(triangle_bridge, part) == pytest.approx(0.357143, abs=1e-6)
        q_max, _ = exhaustive_max_modularity(two_cliques)
        report, winner_part = best_partition(two_cliques, list(ALGORITHMS), seed=5)
        assert report.rows[report.winner].modularity == pytest.approx(q_max, abs=1e-9)
        assert modularity(two_cliques, winner_part) == pytest.approx(q_max, abs=1e-9)


def test_criterion_06_graph_stat_oracles():
    with criterion(6, "k-core / centrality / clique against brute force", 60.0):
        rng = np.random.default_rng(66)
        for _ in range(50):
            g = random_graph(rng, int(rng.integers(2, 11)),
                             p=float(rng.uniform(0.15, 0.8)))
            assert graphstats.kcore(g).core_number == brute_core_numbers(g)
            scores = graphstats.eigenvector_centrality(g).scores
            oracle = dense_eigenvector(g)
            for v in g.nodes:
                assert scores[v] == pytest.approx(oracle[v], abs=1e-6)
            if g.m > 0:
                assert graphstats.summary(g).clique_number == brute_clique_number(g)
        star = Graph(edges=[("hub", leaf, 1) for leaf in "abcd"])
        assert graphstats.summary(star).assortativity == pytest.approx(-1.0, abs=1e-9)
        path = Graph(edges=[("a", "b", 1), ("b", "c", 1)])
        cent = graphstats.eigenvector_centrality(path).scores
        assert cent["a"] == pytest.approx(0.7071, abs=1e-4)
        assert cent["b"] == pytest.approx(1.0, abs=1e-4)
        assert cent["c"] == pytest.approx(0.7071, abs=1e-4)


def test_criterion_07_sampling_formula():
    with criterion(7, "sample-size monotonicity, limit, and z(0.95)", 5.0):
        assert sampling.z_critical(0.95) == pytest.approx(1.959964, abs=1e-5)
        rng = np.random.default_rng(77)
        for _ in range(1000):
            N = int(rng.integers(2, 100_000))
            s2 = float(rng.uniform(0.01, 16.0))
            conf = float(rng.uniform(0.5, 0.995))
            e = float(rng.uniform(0.01, 2.0))
            base = sampling.sample_size(N, s2, conf, e)
            assert sampling.sample_size(N, s2 * 1.3, conf, e) >= base
            assert sampling.sample_size(N, s2, min(conf * 1.004, 0.9999), e) >= base
            assert sampling.sample_size(N, s2, conf, e * 1.3) <= base
        z = sampling.z_critical(0.85)
        limit = z * z * 2.5 / (0.2 * 0.2)
        assert abs(sampling.sample_size(10 ** 9, 2.5, 0.85, 0.2) - limit) <= 1.0


def test_criterion_08_bigram_contract():
    with criterion(8, "stop-word orderings and threshold monotonicity", 5.0):
        doc = textnet.TokenizedDoc("d", ("the", "cat", "sat", "the", "cat", "ran"))
        stop = StopwordList(frozenset({"the"}), "t")
        after = textnet.extract_bigrams([doc], stop, textnet.REMOVE_AFTER)
        assert after.counts == {("cat", "sat"): 1, ("cat", "ran"): 1}
        before = textnet.extract_bigrams([doc], stop, textnet.REMOVE_BEFORE)
        assert before.counts == {("cat", "sat"): 1, ("sat", "cat"): 1,
                                 ("cat", "ran"): 1}
        rng = np.random.default_rng(88)
        counts = textnet.BigramCounts(
            {(f"w{rng.integers(12)}", f"v{rng.integers(12)}"): int(c)
             for c in rng.integers(1, 15, 80)}, textnet.REMOVE_AFTER)
        prev = None
        for t in range(1, 17):
            try:
                edges = {frozenset(e[:2]) for e in
                         textnet.build_bigram_graph(counts, t).graph.edge_list()}
            except Exception:
                edges = set()
            if prev is not None:
                assert edges <= prev
            prev = edges


TABLE_SHAPES = {
    "word_frequencies.csv": "word,frequency",
    "modularity.csv": "algorithm,modularity",
    "topology.csv": "statistic,value",
    "ergm_coefficients.csv": "term,estimate,std_error,z_value,p_value",
}


def test_criterion_09_end_to_end_determinism(tmp_path, synthetic_dir):
    with criterion(9, "two identical runs on the bundled dataset; table shapes", 120.0):
        config = str(synthetic_dir / "config.yaml")
        outs = []
        for run in ("one", "two"):
            out = tmp_path / run
            assert cli_main(["all", "--config", config, "--out", str(out)]) == 0
            outs.append(out)
        names = sorted(p.name for p in outs[0].iterdir())
        assert names == sorted(p.name for p in outs[1].iterdir())
        for name in names:
            if name == "run_report.json":  # holds wall-clock stage durations
                continue
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
        for name, header in TABLE_SHAPES.items():
            lines = (outs[0] / name).read_text().splitlines()
            assert lines[0] == header, name
            assert len(lines) > 1
        topology_rows = [ln.split(",")[0]
                         for ln in (outs[0] / "topology.csv").read_text().splitlines()[1:]]
        assert topology_rows == ["mean_geodesic", "mean_degree", "sd_degree",
                                 "clique_number", "density", "transitivity",
                                 "assortativity"]


def test_criterion_10_gof_self_consistency():
    with criterion(10, "refit after simulation recovers theta (>= 90% of 50)", 120.0):
        n = 40
        theta_true = np.array([-1.0, 0.15, -0.10])
        rng = np.random.default_rng(777)
        recovered = 0
        completed = 0
        for t in range(50):
            cov = CovariateTable(tuple(range(n)), rng.integers(0, 4, (n, 2)))
            empty = Graph(nodes=list(range(n)))
            base_design = build_design(empty, cov)
            observed = simulate(theta_true, base_design, seed=10_000 + t)
            design = build_design(observed, cov)
            fitted = fit(design)
            assert fitted.converged
            refit_graph = simulate(fitted.theta, design, seed=20_000 + t)
            refit = fit(build_design(refit_graph, cov))
            assert refit.converged
            completed += 1
            if np.all(np.abs(refit.theta - fitted.theta) <= 3.0 * refit.std_error):
                recovered += 1
        assert completed == 50
        assert recovered / completed >= 0.90
