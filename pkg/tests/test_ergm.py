import itertools
import math

import numpy as np
import pytest

from coview.errors import MissingCovariate
from coview.ergm import (
    GofReport,
    build_design,
    expected_stats,
    fit,
    gof,
    nodecov,
    observed_stats,
    simulate,
)
from coview.features import CovariateTable
from coview.graph import Graph

from oracles import logistic_mle


def graph_with_density(n, n_edges):
    g = Graph(nodes=list(range(n)))
    for k, (i, j) in enumerate(itertools.combinations(range(n), 2)):
        if k < n_edges:
            g.add_edge(i, j)
    return g


def random_case(seed, n=12, k=3, p=0.4):
    rng = np.random.default_rng(seed)
    g = Graph(nodes=list(range(n)))
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < p:
            g.add_edge(i, j)
    cov = CovariateTable(tuple(range(n)), rng.integers(0, 4, (n, k)))
    return g, cov


class TestBuildDesign:
    def test_edges_only(self):
        g = Graph(nodes=[0, 1, 2])
        d = build_design(g, terms=("edges",))
        assert d.n_dyads == 3
        np.testing.assert_array_equal(d.stats, [[1.0]] * 3)

    def test_nodecov_change_statistic(self):
        g = Graph(nodes=["a", "b", "c"])
        cov = CovariateTable(("a", "b", "c"), np.array([[1], [2], [3]]))
        d = build_design(g, cov)
        assert d.term_names == ("edges", "nodecov_c1")
        np.testing.assert_array_equal(d.stats[:, 1], [3.0, 4.0, 5.0])

    def test_missing_covariate(self):
        g = Graph(nodes=["a", "b"])
        cov = CovariateTable(("a",), np.array([[1]]))
        with pytest.raises(MissingCovariate):
            build_design(g, cov)

    def test_row_order_lexicographic(self):
        g = Graph(nodes=[0, 1, 2, 3])
        d = build_design(g, terms=("edges",))
        np.testing.assert_array_equal(
            d.pairs, [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]])

    def test_exactly_one_edges_term(self):
        g = Graph(nodes=[0, 1])
        with pytest.raises(ValueError):
            build_design(g, terms=())

    def test_write_roundtrippable(self, tmp_path):
        g, cov = random_case(0)
        d = build_design(g, cov)
        out = tmp_path / "design.csv"
        d.write(out)
        lines = out.read_text().splitlines()
        assert lines[0] == "node_a,node_b,y,edges,nodecov_c1,nodecov_c2,nodecov_c3"
        assert len(lines) == d.n_dyads + 1


class TestFit:
    def test_half_density_gives_zero(self):
        d = build_design(graph_with_density(4, 3), terms=("edges",))
        f = fit(d)
        assert f.converged
        assert f.theta[0] == pytest.approx(0.0, abs=1e-10)

    def test_quarter_density_closed_form(self):
        d = build_design(graph_with_density(9, 9), terms=("edges",))
        f = fit(d)
        assert f.theta[0] == pytest.approx(math.log(1.0 / 3.0), abs=1e-10)

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_independent_oracle(self, seed):
        g, cov = random_case(seed)
        d = build_design(g, cov)
        f = fit(d)
        params, bse = logistic_mle(d.stats, d.response)
        np.testing.assert_allclose(f.theta, params, atol=1e-6)
        np.testing.assert_allclose(f.std_error, bse, atol=1e-6)

    def test_moment_condition(self):
        g, cov = random_case(42)
        d = build_design(g, cov)
        f = fit(d)
        np.testing.assert_allclose(
            expected_stats(f.theta, d), observed_stats(d), atol=1e-6)

    def test_zero_column_flagged_singular(self):
        g, _ = random_case(7, k=0)
        base = fit(build_design(g, terms=("edges",)))
        cov = CovariateTable(tuple(g.nodes), np.zeros((g.n, 1), dtype=np.int64))
        f = fit(build_design(g, cov))
        assert f.singular_terms == (1,)
        assert math.isnan(f.std_error[1]) and f.theta[1] == 0.0
        assert f.theta[0] == pytest.approx(base.theta[0], abs=1e-12)

    def test_p_values_two_sided_normal(self):
        g, cov = random_case(3)
        f = fit(build_design(g, cov))
        for z, p in zip(f.z_value, f.p_value):
            assert p == pytest.approx(math.erfc(abs(z) / math.sqrt(2)), abs=1e-12)

    def test_separation_flagged(self):
        # empty response: theta_edges -> -inf, caught by the divergence bound
        d = build_design(Graph(nodes=list(range(6))), terms=("edges",))
        f = fit(d)
        assert f.separation and not f.converged


class TestSimulate:
    def test_zero_theta_half_probability(self):
        g = Graph(nodes=list(range(10)))
        d = build_design(g, terms=("edges",))
        counts = [simulate(np.zeros(1), d, seed=s).m for s in range(300)]
        # Binomial(45, 0.5): mean 22.5, sd ~3.35; sample mean sd ~0.19
        assert np.mean(counts) == pytest.approx(22.5, abs=1.0)

    def test_strongly_negative_theta_empty(self):
        g = Graph(nodes=list(range(30)))
        d = build_design(g, terms=("edges",))
        assert simulate(np.array([-30.0]), d, seed=1).m == 0

    def test_deterministic(self):
        g, cov = random_case(1)
        d = build_design(g, cov)
        a = simulate(np.array([-1.0, 0.2, -0.1, 0.05]), d, seed=9)
        b = simulate(np.array([-1.0, 0.2, -0.1, 0.05]), d, seed=9)
        assert a.edge_list() == b.edge_list()

    def test_mean_edges_matches_mle_moment(self):
        g, cov = random_case(5)
        d = build_design(g, cov)
        f = fit(d)
        sims = [simulate(f.theta, d, seed=s).m for s in range(10_000)]
        expected_edges = expected_stats(f.theta, d)[0]  # == observed edge count
        se = np.std(sims, ddof=1) / math.sqrt(len(sims))
        assert abs(np.mean(sims) - expected_edges) <= 3 * se
        assert expected_edges == pytest.approx(g.m, abs=1e-6)

    def test_nonfinite_theta_rejected(self):
        g = Graph(nodes=[0, 1])
        d = build_design(g, terms=("edges",))
        with pytest.raises(ValueError):
            simulate(np.array([np.inf]), d, seed=0)


class TestGof:
    def test_single_simulation_collapses_quantiles(self):
        g, cov = random_case(2)
        d = build_design(g, cov)
        f = fit(d)
        report = gof(f, g, d, nsim=1, seed=4)
        for row in report.rows:
            np.testing.assert_array_equal(row.q025, row.q500)
            np.testing.assert_array_equal(row.q500, row.q975)

    def test_row_count_is_tracked_statistics(self):
        g, cov = random_case(2)
        d = build_design(g, cov)
        report = gof(fit(d), g, d, nsim=5, seed=1)
        assert [r.name for r in report.rows] == [
            "edge_count", "degree_distribution", "triangle_count",
            "geodesic_distribution"]

    def test_self_consistency_coverage(self):
        g, cov = random_case(21, n=14)
        d = build_design(g, cov)
        f = fit(d)
        inside = 0
        trials = 60
        for t in range(trials):
            observed = simulate(f.theta, d, seed=1000 + t)
            report = gof(f, observed, d, nsim=99, seed=2000 + t)
            edge_row = report.rows[0]
            if edge_row.q025[0] <= observed.m <= edge_row.q975[0]:
                inside += 1
        assert inside / trials >= 0.90

    def test_report_file_shape(self, tmp_path):
        g, cov = random_case(2)
        d = build_design(g, cov)
        report = gof(fit(d), g, d, nsim=3, seed=1)
        out = tmp_path / "gof.csv"
        report.write(out)
        lines = out.read_text().splitlines()
        assert lines[0] == "statistic,index,observed,q025,q500,q975"
        assert sum(1 for ln in lines if ln.startswith("edge_count")) == 1
