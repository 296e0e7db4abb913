import csv

import numpy as np
import pytest

from coview.community import Partition
from coview.errors import UncoveredNode
from coview.features import (
    ClusterLexicon,
    CovariateTable,
    build_covariates,
    count_features,
    lexicons_from_partition,
    word_frequencies,
)
from coview.graph import Graph
from coview.ingest import StopwordList
from coview.textnet import TokenizedDoc, tokenize

TOY_LEXICON = ClusterLexicon((
    (0, frozenset({"day", "sun"})),
    (1, frozenset({"adventure", "glory", "fantasy"})),
))

TOY_DESCRIPTION = ("A young girl embarks on an epic adventure filled with "
                   "glory until one day she achieves her goal")


class TestClusterLexicon:
    def test_disjointness_enforced(self):
        with pytest.raises(ValueError, match="several clusters"):
            ClusterLexicon(((0, frozenset({"a", "b"})), (1, frozenset({"b"}))))

    def test_contiguity_enforced(self):
        with pytest.raises(ValueError, match="contiguous"):
            ClusterLexicon(((0, frozenset({"a"})), (2, frozenset({"b"}))))


class TestLexiconsFromPartition:
    def test_partition_classes_become_word_sets(self):
        g = Graph(edges=[("day", "sun", 2.0), ("adventure", "glory", 1.0),
                         ("glory", "fantasy", 1.0)])
        part = Partition({"day": 0, "sun": 0, "adventure": 1, "glory": 1,
                          "fantasy": 1}, 2)
        lex = lexicons_from_partition(g, part)
        assert lex.clusters == TOY_LEXICON.clusters

    def test_single_cluster(self):
        g = Graph(edges=[("a", "b", 1.0), ("b", "c", 1.0)])
        lex = lexicons_from_partition(g, Partition({"a": 0, "b": 0, "c": 0}, 1))
        assert lex.clusters == ((0, frozenset({"a", "b", "c"})),)

    def test_empty_graph(self):
        lex = lexicons_from_partition(Graph(), Partition({}, 0))
        assert lex.k == 0

    def test_uncovered_word(self):
        g = Graph(edges=[("a", "b", 1.0)])
        with pytest.raises(UncoveredNode):
            lexicons_from_partition(g, Partition({"a": 0}, 1))


class TestCountFeatures:
    def test_reference_description(self):
        doc = tokenize(TOY_DESCRIPTION)
        np.testing.assert_array_equal(count_features(doc, TOY_LEXICON), [1, 2])

    def test_empty_doc(self):
        np.testing.assert_array_equal(
            count_features(TokenizedDoc(None, ()), TOY_LEXICON), [0, 0])

    def test_multiplicity(self):
        doc = TokenizedDoc(None, ("sun", "sun", "sun"))
        np.testing.assert_array_equal(count_features(doc, TOY_LEXICON), [3, 0])

    def test_presence_only_flag(self):
        doc = TokenizedDoc(None, ("sun", "sun", "glory"))
        np.testing.assert_array_equal(
            count_features(doc, TOY_LEXICON, presence_only=True), [1, 1])

    def test_bounded_by_doc_length(self):
        rng = np.random.default_rng(0)
        words = ["day", "sun", "glory", "other", "more"]
        for _ in range(20):
            doc = TokenizedDoc(None, tuple(
                words[i] for i in rng.integers(0, 5, rng.integers(0, 15))))
            assert count_features(doc, TOY_LEXICON).sum() <= len(doc)

    def test_additive_over_concatenation(self):
        d1 = TokenizedDoc(None, ("day", "glory", "x"))
        d2 = TokenizedDoc(None, ("sun", "adventure"))
        both = TokenizedDoc(None, d1.tokens + d2.tokens)
        np.testing.assert_array_equal(
            count_features(both, TOY_LEXICON),
            count_features(d1, TOY_LEXICON) + count_features(d2, TOY_LEXICON))


class TestWordFrequencies:
    def test_simple_counts(self):
        corpus = [TokenizedDoc("1", ("cat", "cat", "dog"))]
        assert word_frequencies(corpus, StopwordList(frozenset({"x"}), "t")) == \
            [("cat", 2), ("dog", 1)]

    def test_all_stopwords(self):
        corpus = [TokenizedDoc("1", ("the", "a"))]
        assert word_frequencies(corpus, StopwordList(frozenset({"the", "a"}), "t")) == []

    def test_hand_tally(self):
        corpus = [
            TokenizedDoc("1", ("world", "of", "school", "life")),
            TokenizedDoc("2", ("school", "world", "world")),
            TokenizedDoc("3", ("life", "of", "adventure")),
        ]
        stop = StopwordList(frozenset({"of"}), "t")
        assert word_frequencies(corpus, stop) == [
            ("world", 3), ("life", 2), ("school", 2), ("adventure", 1)]

    def test_total_excludes_stopword_occurrences(self):
        corpus = [TokenizedDoc("1", ("a", "b", "a", "the", "the"))]
        stop = StopwordList(frozenset({"the"}), "t")
        total = sum(c for _, c in word_frequencies(corpus, stop))
        assert total == 3


class TestCovariateTable:
    def test_column_sums_match_occurrences(self):
        docs = [TokenizedDoc("i1", ("day", "glory", "day")),
                TokenizedDoc("i2", ("fantasy", "sun"))]
        table = build_covariates(docs, TOY_LEXICON)
        np.testing.assert_array_equal(table.matrix.sum(axis=0), [3, 2])

    def test_write_shape(self, tmp_path):
        docs = [TokenizedDoc("i1", ("day",))]
        table = build_covariates(docs, TOY_LEXICON)
        out = tmp_path / "cov.csv"
        table.write(out)
        lines = out.read_text().splitlines()
        assert lines[0] == "item_id,c1,c2"
        assert lines[1] == "i1,1,0"


class TestBundledLexicon:
    """The 18-cluster reference lexicon shipped as a test fixture."""

    @pytest.fixture
    def lexicon18(self, fixtures_dir):
        by_cluster: dict[int, set[str]] = {}
        with open(fixtures_dir / "lexicon_18_clusters.csv") as fh:
            for row in csv.DictReader(fh):
                by_cluster.setdefault(int(row["cluster"]) - 1, set()).add(row["word"])
        return ClusterLexicon(tuple(
            (k, frozenset(by_cluster[k])) for k in sorted(by_cluster)))

    def test_fixture_wellformed(self, lexicon18):
        assert lexicon18.k == 18
        assert all(words for _, words in lexicon18.clusters)

    def test_known_counts(self, lexicon18):
        doc = tokenize("A transfer student saves the school festival; "
                       "the final battle begins on a distant planet.")
        counts = count_features(doc, lexicon18)
        assert counts[0] == 1   # planet
        assert counts[3] == 1   # school
        assert counts[6] == 1   # begins
        assert counts[7] == 2   # transfer, student
        assert counts[10] == 1  # festival
        assert counts[13] == 1  # distant
        assert counts[15] == 2  # final, battle
        assert counts.sum() == 9  # "saves" matches nothing ("save" would)

    def test_festival_belongs_to_adaptations_cluster(self, lexicon18):
        # guards the fixture against silent regeneration drift
        assert "festival" in dict(lexicon18.clusters)[10]
