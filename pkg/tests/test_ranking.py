import numpy as np
import pytest

from driftscope.clustering import Cluster
from driftscope.ranking import (
    CooccurrenceHistogram,
    RankingError,
    cooccurrence_histogram,
    emd,
    rank_clusters,
)
from helpers import corpus_from_texts, transport_cost, transport_cost_with_sink


def hist(bins, total=None):
    bins = tuple(bins) + (0,) * (10 - len(bins))
    return CooccurrenceHistogram(bins=bins, total_sentences=total or sum(bins))


def random_hist(rng):
    return hist(rng.integers(0, 20, size=10).tolist())


class TestHistogram:
    def test_hand_enumeration(self):
        cluster = Cluster(id=0, exemplar="a", members=("a", "b", "c"))
        sents = [frozenset("abx"), frozenset("ayz"), frozenset("cab")]
        h = cooccurrence_histogram(cluster, sents)
        assert h.bins == (1, 1, 1, 0, 0, 0, 0, 0, 0, 0)
        assert h.total_sentences == 3
        np.testing.assert_allclose(h.normalized()[:3], [1 / 3, 1 / 3, 1 / 3])

    def test_no_overlap(self):
        cluster = Cluster(id=0, exemplar="q", members=("q",))
        h = cooccurrence_histogram(cluster, [frozenset("ab"), frozenset("cd")])
        assert h.bins == (0,) * 10
        assert h.total_sentences == 2

    def test_clipping_at_ten(self):
        members = tuple(f"w{i}" for i in range(12))
        cluster = Cluster(id=0, exemplar="w0", members=members)
        h = cooccurrence_histogram(cluster, [frozenset(members)])
        assert h.bins[9] == 1
        assert sum(h.bins) == 1

    def test_distinct_not_token_multiplicity(self):
        cluster = Cluster(id=0, exemplar="a", members=("a", "b"))
        # Sets by construction: multiplicity inside a sentence cannot matter.
        h = cooccurrence_histogram(cluster, [frozenset(["a"])])
        assert h.bins[0] == 1

    def test_conservation(self):
        rng = np.random.default_rng(2)
        members = ("a", "b", "c")
        cluster = Cluster(id=0, exemplar="a", members=members)
        universe = list("abcdefgh")
        sents = [frozenset(rng.choice(universe, size=4, replace=False)) for _ in range(50)]
        h = cooccurrence_histogram(cluster, sents)
        assert sum(h.bins) <= h.total_sentences
        covered = sum(1 for s in sents if set(members) & s)
        assert sum(h.bins) == covered


class TestEmd:
    def test_identical(self):
        h = hist([3, 4, 0, 1])
        assert emd(h, h, "counts") == 0.0
        assert emd(h, h, "normalized") == 0.0

    def test_adjacent_bins_normalized(self):
        assert emd(hist([5]), hist([0, 7]), "normalized") == pytest.approx(1.0)

    def test_adjacent_bins_counts(self):
        assert emd(hist([10]), hist([0, 10]), "counts") == pytest.approx(10.0)

    def test_split_mass_normalized(self):
        assert emd(hist([1, 1]), hist([0, 2]), "normalized") == pytest.approx(0.5)

    def test_zero_histogram_normalized_rejected(self):
        with pytest.raises(RankingError):
            emd(hist([]), hist([1]), "normalized")

    def test_unknown_mode(self):
        with pytest.raises(RankingError):
            emd(hist([1]), hist([1]), "euclid")

    def test_symmetry(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            a, b = random_hist(rng), random_hist(rng)
            assert emd(a, b, "counts") == pytest.approx(emd(b, a, "counts"))
            if sum(a.bins) and sum(b.bins):
                assert emd(a, b, "normalized") == pytest.approx(emd(b, a, "normalized"))

    def test_counts_zero_iff_identical(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            a, b = random_hist(rng), random_hist(rng)
            assert (emd(a, b, "counts") == 0.0) == (a.bins == b.bins)

    def test_triangle_inequality_normalized(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            a, b, c = (random_hist(rng) for _ in range(3))
            if not (sum(a.bins) and sum(b.bins) and sum(c.bins)):
                continue
            ab = emd(a, b, "normalized")
            bc = emd(b, c, "normalized")
            ac = emd(a, c, "normalized")
            assert ac <= ab + bc + 1e-9

    def test_oracle_normalized(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            a, b = random_hist(rng), random_hist(rng)
            if not (sum(a.bins) and sum(b.bins)):
                continue
            pa = np.array(a.bins) / sum(a.bins)
            pb = np.array(b.bins) / sum(b.bins)
            assert emd(a, b, "normalized") == pytest.approx(
                transport_cost(pa, pb), abs=1e-9)

    def test_oracle_counts_with_sink(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            a, b = random_hist(rng), random_hist(rng)
            assert emd(a, b, "counts") == pytest.approx(
                transport_cost_with_sink(a.bins, b.bins), abs=1e-9)


class TestRankClusters:
    def test_planted_convergence_ranks_first(self, tmp_path):
        early = ["alpha apart now.", "bravo apart now.", "kilo lima stay."] * 10
        late = ["alpha bravo join.", "kilo lima stay."] * 10
        corpus = corpus_from_texts(tmp_path, early, late)
        converge = Cluster(id=0, exemplar="alpha", members=("alpha", "bravo"))
        static = Cluster(id=1, exemplar="kilo", members=("kilo", "lima"))
        scores = rank_clusters([converge, static], corpus, 0, 1, "counts")
        assert scores[0].cluster.exemplar == "alpha"
        assert scores[0].rank == 1
        assert scores[0].emd > scores[1].emd

    def test_never_cooccurring_cluster_scores_zero(self, tmp_path):
        early = ["alpha apart.", "bravo apart."] * 5
        late = ["alpha apart.", "bravo apart."] * 5
        corpus = corpus_from_texts(tmp_path, early, late)
        c = Cluster(id=0, exemplar="alpha", members=("alpha", "bravo"))
        (score,) = rank_clusters([c], corpus, 0, 1, "counts")
        assert score.emd == 0.0

    def test_tie_break_larger_cluster_first(self, tmp_path):
        corpus = corpus_from_texts(tmp_path, ["filler text."] * 3, ["filler text."] * 3)
        big = Cluster(id=0, exemplar="zed", members=("zed", "yak", "wol"))
        small = Cluster(id=1, exemplar="abe", members=("abe", "bee"))
        scores = rank_clusters([big, small], corpus, 0, 1, "counts")
        assert scores[0].cluster.exemplar == "zed"
        assert [s.rank for s in scores] == [1, 2]
