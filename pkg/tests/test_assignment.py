"""Assignment passes against dense brute-force oracles.

Oracles here work on dense binary matrices and plain Python loops; the
library's sparse/vectorized paths must reproduce them exactly.
"""

import io as stdio

import numpy as np
import pytest

from huelines.assignment import (
    NONE_LABEL,
    MeanVector,
    assign_bins,
    assign_lines,
    bin_cluster_distance,
    mean_vectors,
    write_line_assignment_csv,
)
from huelines.clustering import build_dendrogram, cut_to_k
from huelines.features import density_of, extract_feature_sets, sample_bins
from huelines.model import fit_grid
from huelines.similarity import distance_matrix
from tests.conftest import random_lineset


def pipeline_upto_clustering(rng, n_lines=30, k=3, min_density=2):
    ls = random_lineset(rng, n_lines=n_lines, n_vertices=6)
    spec = fit_grid(ls, 32, 32)
    fg = extract_feature_sets(ls, spec, radius=1.5)
    sample = sample_bins(fg, min_density=min_density, max_samples=60, seed=5)
    dmat = distance_matrix(sample, fg, "overlap")
    clustering = cut_to_k(build_dendrogram(dmat, sample), k)
    return ls, fg, sample, clustering


def mv(cluster_id, freq, support):
    ids = np.array(sorted(freq), dtype=np.int64)
    return MeanVector(
        cluster_id=cluster_id,
        ids=ids,
        values=np.array([freq[i] for i in ids], dtype=np.float64),
        support=support,
    )


class TestMeanVectors:
    def test_two_bin_micro_example(self):
        # sets {1,2} and {2,3} average to {1: .5, 2: 1., 3: .5}
        from huelines.clustering import Clustering
        from huelines.features import BinSample, FeatureGrid
        from huelines.model import Affine, GridSpec

        spec = GridSpec(width=8, height=8, transform=Affine(1, 1, 0, 0))
        indptr = np.zeros(65, dtype=np.int64)
        indptr[1:3] = (2, 4)
        indptr[3:] = 4
        fg = FeatureGrid(
            spec=spec,
            indptr=indptr,
            line_ids=np.array([1, 2, 2, 3], dtype=np.int64),
            radius=1.0,
            n_lines=4,
        )
        sample = BinSample(
            bin_indices=np.array([0, 1], dtype=np.int64),
            seed=0, min_density=1, max_samples=10,
        )
        clustering = Clustering(
            assignment=np.zeros(2, dtype=np.int64), k=1, nodes=(2,), sizes=(2,)
        )
        (mean,) = mean_vectors(clustering, sample, fg)
        assert mean.to_dict()["freq"] == {1: 0.5, 2: 1.0, 3: 0.5}
        assert mean.support == 2

    def test_matches_dense_average_oracle(self, rng):
        ls, fg, sample, clustering = pipeline_upto_clustering(rng)
        means = mean_vectors(clustering, sample, fg)
        n = fg.n_lines
        dense = np.zeros((len(sample), n))
        for row, b in enumerate(sample.bin_indices):
            dense[row, fg.bin_set(b)] = 1.0
        for c in range(clustering.k):
            member_rows = clustering.members(c)
            oracle = dense[member_rows].sum(axis=0) / len(member_rows)
            got = np.zeros(n)
            got[means[c].ids] = means[c].values
            np.testing.assert_array_equal(got, oracle)
            assert means[c].support == len(member_rows)
            assert np.all(means[c].values > 0) and np.all(means[c].values <= 1)

    def test_identical_bins_give_unit_frequencies(self, rng):
        ls, fg, sample, clustering = pipeline_upto_clustering(rng)
        means = mean_vectors(clustering, sample, fg)
        for mean in means:
            if mean.support == 1:
                assert np.all(mean.values == 1.0)


class TestBinClusterDistance:
    def test_perfect_membership(self):
        assert bin_cluster_distance({2}, mv(0, {2: 1.0}, 4)) == 0.0

    def test_absent_line_costs_one(self):
        assert bin_cluster_distance({5}, mv(0, {}, 3)) == 1.0

    def test_worked_example(self):
        assert bin_cluster_distance({1, 2}, mv(0, {1: 0.5, 2: 1.0}, 2)) == pytest.approx(0.25)

    def test_zero_iff_all_frequencies_unit(self, rng):
        freq = {1: 1.0, 4: 1.0, 9: 0.75}
        assert bin_cluster_distance({1, 4}, mv(0, freq, 4)) == 0.0
        assert bin_cluster_distance({1, 4, 9}, mv(0, freq, 4)) > 0.0

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            bin_cluster_distance(set(), mv(0, {1: 1.0}, 1))


class TestAssignBins:
    def test_matches_per_bin_loop(self, rng):
        ls, fg, sample, clustering = pipeline_upto_clustering(rng)
        means = mean_vectors(clustering, sample, fg)
        cmap = assign_bins(fg, means, min_density=2)
        for flat in range(fg.spec.n_bins):
            s = fg.bin_set(flat)
            if len(s) < 2:
                assert cmap.labels[flat] == NONE_LABEL
                continue
            dists = [bin_cluster_distance(s, m) for m in means]
            assert cmap.labels[flat] == int(np.argmin(dists))

    def test_k1_labels_every_eligible_bin(self, rng):
        ls, fg, sample, clustering = pipeline_upto_clustering(rng, k=1)
        means = mean_vectors(clustering, sample, fg)
        cmap = assign_bins(fg, means, min_density=2)
        eligible = fg.counts >= 2
        assert np.all(cmap.labels[eligible] == 0)
        assert np.all(cmap.labels[~eligible] == NONE_LABEL)

    def test_ties_take_lowest_cluster(self):
        # two identical means force a tie on every bin
        from huelines.model import Affine, GridSpec, LineKind, LineSet, Polyline

        ls = LineSet(
            lines=[Polyline(id=0, vertices=np.array([[0.0, 2.5], [8.0, 2.5]]))],
            bbox=(0.0, 2.0, 8.0, 3.0),
            kind=LineKind.TRAJECTORY,
        )
        spec = GridSpec(width=8, height=8, transform=Affine(1, 1, 0, 0))
        fg = extract_feature_sets(ls, spec, radius=1.0)
        same = mv(0, {0: 1.0}, 2)
        cmap = assign_bins(fg, [same, mv(1, {0: 1.0}, 2)], min_density=1)
        hit = cmap.labels >= 0
        assert hit.any()
        assert np.all(cmap.labels[hit] == 0)

    def test_most_sampled_bins_keep_their_cluster(self, rng):
        # self-consistency: the mean-distance rule should usually agree with
        # the linkage label that produced it
        ls, fg, sample, clustering = pipeline_upto_clustering(rng, n_lines=40, k=3)
        means = mean_vectors(clustering, sample, fg)
        cmap = assign_bins(fg, means, min_density=2)
        relabeled = cmap.labels[sample.bin_indices]
        agree = (relabeled == clustering.assignment).mean()
        assert agree >= 0.6  # loose; exact agreement is not implied by the rule


class TestAssignLines:
    def test_matches_triple_loop(self, rng):
        ls, fg, sample, clustering = pipeline_upto_clustering(rng)
        means = mean_vectors(clustering, sample, fg)
        cmap = assign_bins(fg, means, min_density=2)
        dg = density_of(fg)
        la = assign_lines(ls, cmap, fg, dg)

        n, k = len(ls), cmap.k
        weights = np.zeros((n, k))
        for flat in range(fg.spec.n_bins):
            c = cmap.labels[flat]
            if c < 0:
                continue
            for i in fg.bin_set(flat):
                weights[i, c] += dg.counts[flat]
        np.testing.assert_array_equal(la.weights, weights)
        for i in range(n):
            if weights[i].sum() == 0:
                assert la.labels[i] == NONE_LABEL
            else:
                assert la.labels[i] == int(np.argmax(weights[i]))

    def test_density_weighting_beats_bin_count(self):
        # 3 bins at density 2 lose to 2 bins at density 10
        weights = np.array([[6.0, 20.0]])
        assert int(np.argmax(weights[0])) == 1

    def test_totals_partition_the_lines(self, rng):
        ls, fg, sample, clustering = pipeline_upto_clustering(rng)
        means = mean_vectors(clustering, sample, fg)
        cmap = assign_bins(fg, means, min_density=2)
        la = assign_lines(ls, cmap, fg, density_of(fg))
        counted = sum(len(la.lines_of(c)) for c in range(cmap.k))
        counted += int((la.labels == NONE_LABEL).sum())
        assert counted == len(ls)

    def test_scale_invariance_of_argmax(self, rng):
        ls, fg, sample, clustering = pipeline_upto_clustering(rng)
        means = mean_vectors(clustering, sample, fg)
        cmap = assign_bins(fg, means, min_density=2)
        dg = density_of(fg)
        la = assign_lines(ls, cmap, fg, dg)
        scaled = type(dg)(spec=dg.spec, counts=dg.counts * 7)
        la7 = assign_lines(ls, cmap, fg, scaled)
        np.testing.assert_array_equal(la.labels, la7.labels)


class TestCsvExport:
    def test_layout(self):
        from huelines.assignment import LineAssignment

        la = LineAssignment(
            labels=np.array([1, NONE_LABEL], dtype=np.int64),
            weights=np.array([[1.0, 5.0], [0.0, 0.0]]),
        )
        buf = stdio.StringIO()
        write_line_assignment_csv(la, buf)
        rows = buf.getvalue().strip().splitlines()
        assert rows[0] == "line_id,cluster_id,weight_0,weight_1"
        assert rows[1] == "0,1,1.0,5.0"
        assert rows[2] == "1,-1,0.0,0.0"
