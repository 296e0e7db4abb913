"""Stage orchestration: artifacts on disk, run report, deterministic seeding.

Each stage reads its prerequisites from the output directory, writes its
own artifacts there, and records counts and decisions in run_report.json.
Artifacts are plain delimited files (plus GraphML/DOT for graphs) so any
stage can be inspected or consumed externally; re-running a stage with the
same inputs and seed rewrites identical bytes.  The run report is the one
file excluded from that guarantee: it contains wall-clock stage durations.
"""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path

import numpy as np

from . import __version__, bipartite, ergm, features, graphstats, sampling, textnet
from ._kernels import BACKEND
from .community import best_partition, Partition
from .config import PipelineConfig
from .errors import EmptySelection, MissingPrerequisite
from .graph import Graph, format_number
from .ingest import load_catalog, load_interactions, load_stopwords

STAGES = ("sample", "project", "binarize", "bigrams", "cluster",
          "features", "stats", "ergm")

REPORT_FILE = "run_report.json"


# ---------------------------------------------------------------------------
# artifact helpers


def _write_rows(path, header, rows, delimiter=","):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(delimiter.join(header) + "\n")
        for row in rows:
            fh.write(delimiter.join(str(c) for c in row) + "\n")


def _read_rows(path, delimiter=","):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        header = next(reader)
        return header, list(reader)


def _require(out_dir: Path, names, stage: str):
    missing = [n for n in names if not (out_dir / n).exists()]
    if missing:
        raise MissingPrerequisite(
            f"stage {stage!r} needs {', '.join(missing)}; run the earlier stages first")


def _described_sampled_items(config: PipelineConfig, out_dir: Path):
    """The network item universe: sampled items that carry a description."""
    catalog = load_catalog(config.catalog, config.column_map, config.delimiter)
    _, rows = _read_rows(out_dir / "sampled_items.csv")
    sampled = {r[0] for r in rows}
    described = {e.item_id for e in catalog if e.description is not None}
    universe = sorted(sampled & described)
    return catalog, sampled, universe


def _read_graph(out_dir: Path, edges_file: str, nodes_file: str | None = None,
                weighted: bool = False) -> Graph:
    g = Graph()
    if nodes_file is not None:
        _, rows = _read_rows(out_dir / nodes_file)
        for r in rows:
            g.add_node(r[0])
    _, rows = _read_rows(out_dir / edges_file)
    for r in rows:
        g.add_edge(r[0], r[1], float(r[2]) if weighted else 1.0)
    return g


def _read_partition(out_dir: Path) -> dict[str, int]:
    _, rows = _read_rows(out_dir / "partition.csv")
    return {r[0]: int(r[1]) - 1 for r in rows}  # file is 1-based


def _read_covariates(out_dir: Path) -> features.CovariateTable:
    header, rows = _read_rows(out_dir / "covariates.csv")
    ids = tuple(r[0] for r in rows)
    matrix = np.array([[int(x) for x in r[1:]] for r in rows], dtype=np.int64)
    if matrix.size == 0:
        matrix = matrix.reshape(len(ids), max(len(header) - 1, 0))
    return features.CovariateTable(ids, matrix)


def _corpus(catalog) -> list[textnet.TokenizedDoc]:
    return [textnet.tokenize(e.description, e.item_id)
            for e in catalog if e.description is not None]


# ---------------------------------------------------------------------------
# run report


def _load_report(out_dir: Path) -> dict:
    path = out_dir / REPORT_FILE
    if path.exists():
        return json.loads(path.read_text("utf-8"))
    return {"version": __version__, "kernel_backend": BACKEND, "stages": {}}


def _record(out_dir: Path, config: PipelineConfig, stage: str, entry: dict,
            duration: float) -> None:
    report = _load_report(out_dir)
    report["version"] = __version__
    report["kernel_backend"] = BACKEND
    report["config"] = config.echo()
    entry = dict(entry)
    entry["duration_s"] = round(duration, 6)
    report["stages"][stage] = entry
    (out_dir / REPORT_FILE).write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", "utf-8")


# ---------------------------------------------------------------------------
# stages


def stage_sample(config: PipelineConfig, out_dir: Path) -> dict:
    catalog = load_catalog(config.catalog, config.column_map, config.delimiter)
    params = sampling.SamplingParams(
        confidence=config.confidence,
        margin_of_error=config.margin_of_error,
        min_genre_count=config.min_genre_count,
        excluded_genres=config.excluded_genres,
        seed=config.seed,
    )
    plan, sampled = sampling.stratified_sample(catalog, params)
    sampling.write_sample_plan(plan, out_dir / "sample_plan.csv")
    _write_rows(out_dir / "sampled_items.csv", ("item_id",),
                [(i,) for i in sorted(sampled)])
    degenerate = sorted(g for g, p in plan.per_genre.items() if p.population == 1)
    return {
        "counts": {
            "catalog_items": len(catalog),
            "strata": len(plan.per_genre),
            "per_stratum_total": sum(p.sample_size for p in plan.per_genre.values()),
            "sampled_union": plan.union_size,
        },
        "decisions": {"degenerate_strata": degenerate},
    }


def stage_project(config: PipelineConfig, out_dir: Path) -> dict:
    _require(out_dir, ["sampled_items.csv"], "project")
    catalog, sampled, universe = _described_sampled_items(config, out_dir)
    interactions = load_interactions(config.interactions, config.column_map,
                                     config.delimiter)
    b = bipartite.build_incidence(interactions, universe)
    pairs = sorted((u, i) for u, i in interactions.pairs if i in set(universe))
    _write_rows(out_dir / "network_items.csv", ("item_id",), [(i,) for i in universe])
    _write_rows(out_dir / "incidence.csv", ("user_id", "item_id"), pairs)
    w = bipartite.project_items(b)
    w.write_edge_list(out_dir / "item_projection.csv")
    entry = {
        "counts": {
            "sampled_items": len(sampled),
            "network_items": len(universe),
            "items_without_description_dropped": len(sampled) - len(universe),
            "users": b.n_users,
            "interactions_kept": len(pairs),
            "interactions_dropped": b.dropped,
        },
        "decisions": {"missing_descriptions": "dropped before covariate construction"},
    }
    if config.user_projection:
        wu = bipartite.project_users(b)
        wu.write_edge_list(out_dir / "user_projection.csv")
        entry["counts"]["user_projection_edges"] = len(wu.edge_rows())
    return entry


def stage_binarize(config: PipelineConfig, out_dir: Path) -> dict:
    _require(out_dir, ["incidence.csv", "network_items.csv"], "binarize")
    _, item_rows = _read_rows(out_dir / "network_items.csv")
    universe = [r[0] for r in item_rows]
    _, pair_rows = _read_rows(out_dir / "incidence.csv")
    from .ingest import InteractionSet
    inter = InteractionSet(frozenset((r[0], r[1]) for r in pair_rows))
    b = bipartite.build_incidence(inter, universe)
    w = bipartite.project_items(b)
    g = bipartite.binarize(w, b, config.tau, drop_isolated=config.drop_isolated)
    _write_rows(out_dir / "item_graph_nodes.csv", ("item_id",),
                [(v,) for v in g.nodes])
    g.write_edge_list(out_dir / "item_graph.csv", header=("item_a", "item_b"))
    g.write_graphml(out_dir / "item_graph.graphml")
    isolated = sum(1 for v in g.nodes if g.degree(v) == 0)
    return {
        "counts": {"nodes": g.n, "edges": g.m, "isolated": isolated},
        "decisions": {
            "tau": config.tau,
            "isolated_items": "dropped" if config.drop_isolated else "kept",
        },
    }


def stage_bigrams(config: PipelineConfig, out_dir: Path) -> dict:
    catalog = load_catalog(config.catalog, config.column_map, config.delimiter)
    corpus = _corpus(catalog)
    stopwords = load_stopwords(config.stopwords)
    counts = textnet.extract_bigrams(corpus, stopwords, config.stopword_mode,
                                     workers=config.workers)
    thresholds = list(range(config.sweep_min, config.sweep_max + 1))
    series = textnet.dispersogram(counts, thresholds)
    textnet.write_dispersogram(series, out_dir / "dispersogram.csv")
    threshold = textnet.select_threshold(series, config.rule_tuple())
    bg = textnet.build_bigram_graph(counts, threshold)
    bg.graph.write_edge_list(out_dir / "bigram_graph.csv",
                             header=("word_a", "word_b"), include_weight=True)
    return {
        "counts": {
            "documents": len(corpus),
            "tokens": sum(len(d) for d in corpus),
            "distinct_bigrams": len(counts.counts),
            "bigram_words": bg.graph.n,
            "bigram_edges": bg.graph.m,
        },
        "decisions": {
            "stopword_mode": config.stopword_mode,
            "threshold_rule": config.threshold_rule,
            "threshold_used": threshold,
        },
    }


def stage_cluster(config: PipelineConfig, out_dir: Path) -> dict:
    _require(out_dir, ["bigram_graph.csv"], "cluster")
    g = _read_graph(out_dir, "bigram_graph.csv",
                    weighted=config.weighted_cluster_graph)
    report, partition = best_partition(g, config.algorithms, config.seed)
    _write_rows(out_dir / "modularity.csv", ("algorithm", "modularity"),
                [(name, format_number(report.rows[name].modularity))
                 for name in sorted(report.rows)])
    _write_rows(out_dir / "partition.csv", ("word", "cluster"),
                [(w, c + 1) for w, c in sorted(partition.assignment.items())])
    return {
        "counts": {"words": g.n, "clusters": partition.k},
        "decisions": {
            "winning_algorithm": report.winner,
            "cluster_graph_weights": "weighted" if config.weighted_cluster_graph else "binary",
            "modularity": {
                name: {"modularity": row.modularity, "K": row.k,
                       "runtime_s": round(row.runtime_s, 6)}
                for name, row in sorted(report.rows.items())
            },
        },
    }


def stage_features(config: PipelineConfig, out_dir: Path) -> dict:
    _require(out_dir, ["partition.csv", "bigram_graph.csv", "network_items.csv"],
             "features")
    catalog, _sampled, universe = _described_sampled_items(config, out_dir)
    assignment = _read_partition(out_dir)
    k = max(assignment.values()) + 1 if assignment else 0
    bigram_graph = _read_graph(out_dir, "bigram_graph.csv", weighted=True)
    lexicon = features.lexicons_from_partition(
        bigram_graph, Partition(assignment, k))
    by_id = {e.item_id: e for e in catalog}
    docs = [textnet.tokenize(by_id[i].description, i) for i in universe]
    table = features.build_covariates(docs, lexicon)
    table.write(out_dir / "covariates.csv")
    stopwords = load_stopwords(config.stopwords)
    freq = features.word_frequencies(_corpus(catalog), stopwords)
    features.write_word_frequencies(freq, out_dir / "word_frequencies.csv")
    return {
        "counts": {
            "covariate_items": len(table.item_ids),
            "clusters": table.k,
            "matched_tokens": int(table.matrix.sum()),
            "distinct_words": len(freq),
        },
        "decisions": {"token_counting": "multiplicity"},
    }


def stage_stats(config: PipelineConfig, out_dir: Path) -> dict:
    _require(out_dir, ["item_graph.csv", "item_graph_nodes.csv",
                       "bigram_graph.csv", "partition.csv"], "stats")
    g = _read_graph(out_dir, "item_graph.csv", "item_graph_nodes.csv")
    summ = graphstats.summary(g, clique_time_budget_s=config.clique_time_budget_s)
    summ.write(out_dir / "topology.csv")
    decomp = graphstats.kcore(g)
    decomp.write(out_dir / "core_numbers.csv")
    entry_decisions = {"kcore_rule": config.kcore_rule}
    try:
        sub = graphstats.kcore_subgraph(g, config.kcore_rule_tuple())
        sub.write_graphml(out_dir / "kcore_subgraph.graphml")
        sub.write_dot(out_dir / "kcore_subgraph.dot")
        kcore_nodes = sub.n
    except EmptySelection:
        entry_decisions["kcore_subgraph"] = "empty selection, files not written"
        kcore_nodes = 0
    bigram_graph = _read_graph(out_dir, "bigram_graph.csv", weighted=True)
    assignment = _read_partition(out_dir)
    k = max(assignment.values()) + 1 if assignment else 0
    ranked = graphstats.rank_cluster_words(bigram_graph, Partition(assignment, k))
    graphstats.write_cluster_keywords(ranked, out_dir / "cluster_keywords.csv")
    if summ.clique_is_lower_bound:
        entry_decisions["clique_number"] = "lower bound (search timed out)"
    return {
        "counts": {
            "nodes": g.n,
            "edges": g.m,
            "kcore_subgraph_nodes": kcore_nodes,
            "unreachable_pairs": summ.unreachable_pairs,
        },
        "decisions": entry_decisions,
    }


def stage_ergm(config: PipelineConfig, out_dir: Path) -> dict:
    _require(out_dir, ["item_graph.csv", "item_graph_nodes.csv", "covariates.csv"],
             "ergm")
    g = _read_graph(out_dir, "item_graph.csv", "item_graph_nodes.csv")
    table = _read_covariates(out_dir)
    if config.ergm_terms == "all":
        terms = None
    else:
        terms = tuple(
            "edges" if t == "edges" else ergm.nodecov(int(str(t).lstrip("c")) - 1)
            for t in config.ergm_terms
        )
    design = ergm.build_design(g, table, terms)
    fitted = ergm.fit(design)
    fitted.write_table(out_dir / "ergm_coefficients.csv")
    if config.export_design:
        design.write(out_dir / "dyad_design.csv")
    gof_report = ergm.gof(fitted, g, design, nsim=config.gof_nsim,
                          seed=config.seed)
    gof_report.write(out_dir / "gof.csv")
    return {
        "counts": {"dyads": design.n_dyads, "edges": g.m, "terms": len(design.term_names)},
        "decisions": {
            "converged": fitted.converged,
            "iterations": fitted.iterations,
            "log_likelihood": fitted.log_likelihood,
            "separation": fitted.separation,
            "singular_terms": [design.term_names[i] for i in fitted.singular_terms],
            "gof_nsim": config.gof_nsim,
        },
    }


_STAGE_FUNCS = {
    "sample": stage_sample,
    "project": stage_project,
    "binarize": stage_binarize,
    "bigrams": stage_bigrams,
    "cluster": stage_cluster,
    "features": stage_features,
    "stats": stage_stats,
    "ergm": stage_ergm,
}


def run_stage(stage: str, config: PipelineConfig) -> dict:
    """Run one stage (or "all"); returns the run-report entries written."""
    if stage != "all" and stage not in _STAGE_FUNCS:
        raise ValueError(f"unknown stage {stage!r}; choose from {STAGES + ('all',)}")
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = STAGES if stage == "all" else (stage,)
    entries = {}
    for name in names:
        t0 = time.perf_counter()
        entry = _STAGE_FUNCS[name](config, out_dir)
        _record(out_dir, config, name, entry, time.perf_counter() - t0)
        entries[name] = entry
    return entries
