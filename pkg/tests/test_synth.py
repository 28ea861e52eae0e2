import io

import numpy as np
import pytest

from huelines.features import extract_feature_sets
from huelines.io import parse_trajectories, write_trajectory_csv
from huelines.model import fit_grid
from huelines.synthetic import (
    LabeledLineSet,
    gen_continuation,
    gen_disconnected,
    gen_illusory,
)


def vertices_equal(a, b):
    return all(np.array_equal(p.vertices, q.vertices)
               for p, q in zip(a.lines, b.lines))


class TestLabeledLineSet:
    def test_label_length_mismatch_rejected(self):
        ds = gen_continuation(n_per_trend=2, seed=0)
        with pytest.raises(ValueError, match="every line"):
            LabeledLineSet(ds.lineset, np.array([0, 1]))

    def test_labels_must_be_dense(self):
        ds = gen_continuation(n_per_trend=2, seed=0)
        with pytest.raises(ValueError, match="dense"):
            LabeledLineSet(ds.lineset, np.array([0, 0, 2, 2]))


class TestIllusory:
    def test_default_counts(self):
        ds = gen_illusory(seed=1)
        assert len(ds.lineset) == 500
        assert list(ds.label_counts()) == [200, 200, 100]

    def test_deterministic_per_seed(self):
        a = gen_illusory(seed=7)
        b = gen_illusory(seed=7)
        assert np.array_equal(a.labels, b.labels)
        assert vertices_equal(a.lineset, b.lineset)

    def test_different_seeds_differ(self):
        a = gen_illusory(seed=1)
        b = gen_illusory(seed=2)
        assert not vertices_equal(a.lineset, b.lineset)

    def test_fanout_zero_collapses_to_band(self):
        ds = gen_illusory(fanout=0.0, seed=3)
        ys = np.concatenate(
            [l.vertices[:, 1] for l, lab in zip(ds.lineset.lines, ds.labels)
             if lab != 2])
        assert ys.max() - ys.min() < 0.05

    def test_halves_fan_on_opposite_sides(self):
        ds = gen_illusory(fanout=1.0, seed=4)
        # half 0 is tight on the left, half 1 tight on the right
        for lab, tight_cols in ((0, slice(0, 8)), (1, slice(24, 32))):
            ys = np.stack([l.vertices[:, 1]
                           for l, g in zip(ds.lineset.lines, ds.labels)
                           if g == lab])
            tight = ys[:, tight_cols]
            loose = ys[:, slice(24, 32) if lab == 0 else slice(0, 8)]
            assert tight.std() < 0.02
            assert loose.std() > 0.05

    def test_odd_pattern_count_rejected(self):
        with pytest.raises(ValueError, match="even"):
            gen_illusory(n_pattern=401)

    def test_fanout_out_of_range(self):
        with pytest.raises(ValueError, match="fanout"):
            gen_illusory(fanout=1.5)

    def test_vertex_count(self):
        ds = gen_illusory(n_pattern=4, n_noise=1, seed=0)
        assert all(l.vertices.shape == (32, 2) for l in ds.lineset.lines)
        ds = gen_illusory(n_pattern=4, n_noise=1, seed=0, n_vertices=100)
        assert all(l.vertices.shape == (100, 2) for l in ds.lineset.lines)


class TestContinuation:
    def test_counts_and_labels(self):
        ds = gen_continuation(n_per_trend=200, mode="crossing", seed=1)
        assert len(ds.lineset) == 400
        assert list(ds.label_counts()) == [200, 200]

    def test_single_line_per_trend(self):
        ds = gen_continuation(n_per_trend=1, seed=0)
        assert len(ds.lineset) == 2

    def test_unknown_mode(self):
        with pytest.raises(ValueError, match="mode"):
            gen_continuation(mode="diagonal")

    def test_crossing_shape(self):
        ds = gen_continuation(n_per_trend=5, mode="crossing", seed=2)
        y = ds.lineset.lines[0].vertices[:, 1]
        # trend 0 rises from ~0.2 through the center to ~0.8
        assert abs(y[0] - 0.2) < 0.05 and abs(y[-1] - 0.8) < 0.05
        y = ds.lineset.lines[5].vertices[:, 1]
        assert abs(y[0] - 0.8) < 0.05 and abs(y[-1] - 0.2) < 0.05

    def test_touching_shape(self):
        ds = gen_continuation(n_per_trend=5, mode="touching", seed=2)
        y = ds.lineset.lines[0].vertices[:, 1]
        # peak bundle: both ends low, center high
        assert abs(y[0] - 0.2) < 0.05 and abs(y[-1] - 0.2) < 0.05
        assert abs(y[15] - 0.5) < 0.05
        y = ds.lineset.lines[5].vertices[:, 1]
        assert abs(y[0] - 0.8) < 0.05 and abs(y[-1] - 0.8) < 0.05

    def test_modes_share_density_grid(self):
        # the two modes repartition the same arm geometry, so densities
        # may differ only by line dedup right at the junction
        for seed in (1, 2):
            a = gen_continuation(seed=seed, mode="crossing")
            b = gen_continuation(seed=seed, mode="touching")
            spec = fit_grid(a.lineset, 256, 256)
            da = extract_feature_sets(a.lineset, spec, 1.0).counts
            db = extract_feature_sets(b.lineset, spec, 1.0).counts
            diff = np.abs(da.astype(int) - db.astype(int)).reshape(256, 256)
            assert diff.max() <= 10
            rows, cols = np.nonzero(diff)
            if len(rows):
                assert cols.min() >= 118 and cols.max() <= 138
                assert rows.min() >= 112 and rows.max() <= 144

    def test_deterministic(self):
        a = gen_continuation(seed=9, mode="touching")
        b = gen_continuation(seed=9, mode="touching")
        assert vertices_equal(a.lineset, b.lineset)


class TestDisconnected:
    def test_counts(self):
        ds = gen_disconnected(seed=1)
        assert len(ds.lineset) == 400
        assert list(ds.label_counts()) == [200, 200]

    def test_separation_bounds(self):
        with pytest.raises(ValueError, match="separation"):
            gen_disconnected(separation=-0.1)

    def test_dense_sides_oppose(self):
        ds = gen_disconnected(n_per_trend=50, separation=0.5, seed=3)
        y = np.stack([l.vertices[:, 1] for l in ds.lineset.lines])
        # trend 0 tight near x=0, spread near x=1; trend 1 mirrored
        assert y[:50, :4].std() < 0.02 and y[:50, -4:].std() > 0.05
        assert y[50:, -4:].std() < 0.02 and y[50:, :4].std() > 0.05

    def test_high_separation_regions_approach_center(self):
        near = gen_disconnected(separation=1.0, seed=5)
        far = gen_disconnected(separation=0.0, seed=5)
        # the tight extent of trend 0 reaches further right at high sep
        def tight_extent(ds):
            y = np.stack([l.vertices[:, 1]
                          for l, g in zip(ds.lineset.lines, ds.labels)
                          if g == 0])
            x = ds.lineset.lines[0].vertices[:, 0]
            spread = y.std(axis=0)
            return x[spread < 0.02].max()
        assert tight_extent(near) > tight_extent(far) + 0.2


class TestCsvRoundTrip:
    def test_through_ingest(self):
        ds = gen_illusory(n_pattern=10, n_noise=2, seed=6)
        buf = io.StringIO()
        write_trajectory_csv(ds.lineset, buf)
        buf.seek(0)
        back, _ = parse_trajectories(buf)
        assert len(back) == len(ds.lineset)
        for a, b in zip(ds.lineset.lines, back.lines):
            assert np.allclose(a.vertices, b.vertices, atol=1e-12)
