"""Feature extraction against an independent brute-force oracle.

The oracle evaluates the definition directly: for every bin center, the
minimum distance to each line over all of its segments, membership iff
strictly below the radius. It shares no traversal code with the library.
"""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from huelines.features import (
    dataset_fingerprint,
    density_of,
    extract_feature_sets,
    load_feature_grid,
    point_segment_distance,
    sample_bins,
    save_feature_grid,
)
from huelines.model import Affine, GridSpec, LineKind, LineSet, Polyline, fit_grid
from tests.conftest import random_lineset


def brute_force_sets(ls, spec, radius):
    """All-pairs reference: distance from every bin center to every line."""
    cols, rows = np.meshgrid(np.arange(spec.width), np.arange(spec.height))
    centers = np.stack([cols.ravel() + 0.5, rows.ravel() + 0.5], axis=1)
    out = [set() for _ in range(spec.n_bins)]
    for pline in ls.lines:
        pts = spec.transform.apply(pline.vertices)
        best = np.full(spec.n_bins, np.inf)
        for a, b in zip(pts[:-1], pts[1:]):
            d = b - a
            dd = float(d @ d)
            if dd == 0.0:
                dist = np.hypot(centers[:, 0] - a[0], centers[:, 1] - a[1])
            else:
                t = np.clip((centers - a) @ d / dd, 0.0, 1.0)
                proj = a[None, :] + t[:, None] * d[None, :]
                dist = np.hypot(centers[:, 0] - proj[:, 0], centers[:, 1] - proj[:, 1])
            best = np.minimum(best, dist)
        for flat in np.flatnonzero(best < radius):
            out[flat].add(pline.id)
    return out


def grids_equal(fg, oracle_sets):
    for flat in range(fg.spec.n_bins):
        if set(fg.bin_set(flat).tolist()) != oracle_sets[flat]:
            return False
    return True


class TestPointSegmentDistance:
    def test_perpendicular_foot(self):
        assert point_segment_distance((0, 1), (-1, 0), (1, 0)) == pytest.approx(1.0)

    def test_endpoint(self):
        assert point_segment_distance((2, 0), (-1, 0), (1, 0)) == pytest.approx(1.0)

    def test_degenerate_segment(self):
        assert point_segment_distance((0, 0), (0, 0), (0, 0)) == 0.0

    @given(st.lists(st.floats(-50, 50), min_size=6, max_size=6))
    def test_basic_properties(self, coords):
        q, a, b = (coords[0], coords[1]), (coords[2], coords[3]), (coords[4], coords[5])
        d = point_segment_distance(q, a, b)
        assert d >= 0.0
        # swapping endpoints changes nothing
        assert d == pytest.approx(point_segment_distance(q, b, a), abs=1e-9)
        # the segment is never farther than either endpoint
        ends = min(np.hypot(q[0] - a[0], q[1] - a[1]), np.hypot(q[0] - b[0], q[1] - b[1]))
        assert d <= ends + 1e-9


class TestExtraction:
    def test_horizontal_line_hits_its_own_row_only(self):
        spec = GridSpec(width=16, height=16, transform=Affine(1, 1, 0, 0))
        ls = LineSet(
            lines=[Polyline(id=0, vertices=np.array([[0.0, 3.5], [16.0, 3.5]]))],
            bbox=(0.0, 3.0, 16.0, 4.0),
            kind=LineKind.TRAJECTORY,
        )
        fg = extract_feature_sets(ls, spec, radius=1.0)
        counts2d = density_of(fg).as_array2d()
        assert np.all(counts2d[3, :] == 1)
        # adjacent rows sit at distance exactly 1.0: excluded by the strict test
        assert counts2d[np.arange(16) != 3, :].sum() == 0

    def test_duplicate_lines_share_every_set(self):
        pts = np.array([[0.5, 0.5], [7.0, 6.0], [3.0, 9.0]])
        ls = LineSet(
            lines=[Polyline(id=0, vertices=pts), Polyline(id=1, vertices=pts.copy())],
            bbox=(0.0, 0.0, 10.0, 10.0),
            kind=LineKind.TRAJECTORY,
        )
        spec = GridSpec(width=10, height=10, transform=Affine(1, 1, 0, 0))
        fg = extract_feature_sets(ls, spec, radius=1.0)
        for flat in fg.nonempty_bins():
            assert fg.bin_set(flat).tolist() == [0, 1]

    @pytest.mark.parametrize("seed,n_lines,w,h,radius", [
        (0, 12, 24, 24, 1.0),
        (1, 40, 32, 32, 1.0),
        (2, 3, 16, 48, 2.5),
        (3, 25, 48, 16, 0.75),
        (4, 60, 33, 29, 1.0),
    ])
    def test_matches_brute_force(self, seed, n_lines, w, h, radius):
        rng = np.random.default_rng(seed)
        ls = random_lineset(rng, n_lines=n_lines, n_vertices=6)
        spec = fit_grid(ls, w, h)
        fg = extract_feature_sets(ls, spec, radius=radius)
        assert grids_equal(fg, brute_force_sets(ls, spec, radius))

    def test_matches_brute_force_with_offgrid_geometry(self):
        # transform deliberately pushes segments outside the grid
        rng = np.random.default_rng(7)
        lines = [
            Polyline(id=i, vertices=rng.uniform(-5.0, 21.0, size=(5, 2)))
            for i in range(15)
        ]
        ls = LineSet.from_lines(lines, kind=LineKind.TRAJECTORY)
        spec = GridSpec(width=16, height=16, transform=Affine(1, 1, 0, 0))
        fg = extract_feature_sets(ls, spec, radius=1.0)
        assert grids_equal(fg, brute_force_sets(ls, spec, 1.0))

    def test_long_segments_subdivide_correctly(self):
        # two-vertex diagonals exercise the subdivision path
        lines = [
            Polyline(id=0, vertices=np.array([[0.0, 0.0], [40.0, 40.0]])),
            Polyline(id=1, vertices=np.array([[0.0, 40.0], [40.0, 0.0]])),
        ]
        ls = LineSet.from_lines(lines, kind=LineKind.TRAJECTORY)
        spec = GridSpec(width=40, height=40, transform=Affine(1, 1, 0, 0))
        fg = extract_feature_sets(ls, spec, radius=1.0)
        assert grids_equal(fg, brute_force_sets(ls, spec, 1.0))

    def test_monotone_in_radius(self, rng):
        ls = random_lineset(rng, n_lines=10, n_vertices=5)
        spec = fit_grid(ls, 24, 24)
        small = extract_feature_sets(ls, spec, radius=0.8)
        large = extract_feature_sets(ls, spec, radius=1.6)
        for flat in range(spec.n_bins):
            assert set(small.bin_set(flat)) <= set(large.bin_set(flat))

    def test_sets_sorted_ascending(self, rng):
        ls = random_lineset(rng, n_lines=30, n_vertices=4)
        spec = fit_grid(ls, 20, 20)
        fg = extract_feature_sets(ls, spec, radius=1.5)
        for flat in fg.nonempty_bins():
            s = fg.bin_set(flat)
            assert np.all(np.diff(s) > 0)


class TestDensity:
    def test_counts_match_set_sizes(self, rng):
        ls = random_lineset(rng, n_lines=12)
        spec = fit_grid(ls, 24, 24)
        fg = extract_feature_sets(ls, spec, radius=1.0)
        dg = density_of(fg)
        for flat in range(spec.n_bins):
            assert dg.counts[flat] == len(fg.bin_set(flat))

    def test_straight_line_covers_crossed_bins(self):
        ls = LineSet(
            lines=[Polyline(id=0, vertices=np.array([[0.0, 4.5], [12.0, 4.5]]))],
            bbox=(0.0, 4.0, 12.0, 5.0),
            kind=LineKind.TRAJECTORY,
        )
        spec = GridSpec(width=12, height=12, transform=Affine(1, 1, 0, 0))
        dg = density_of(extract_feature_sets(ls, spec, radius=1.0))
        assert dg.counts.sum() >= 12


class TestSampling:
    def _grid(self, rng, n_lines=25):
        ls = random_lineset(rng, n_lines=n_lines, n_vertices=6)
        spec = fit_grid(ls, 32, 32)
        return extract_feature_sets(ls, spec, radius=1.5)

    def test_threshold_respected(self, rng):
        fg = self._grid(rng)
        sample = sample_bins(fg, min_density=3, max_samples=5000, seed=0)
        assert np.all(fg.counts[sample.bin_indices] >= 3)

    def test_all_taken_when_few(self, rng):
        fg = self._grid(rng)
        n_candidates = int((fg.counts >= 2).sum())
        sample = sample_bins(fg, min_density=2, max_samples=n_candidates + 10, seed=0)
        assert len(sample) == n_candidates

    def test_subsampling_is_deterministic(self, rng):
        fg = self._grid(rng)
        a = sample_bins(fg, min_density=1, max_samples=50, seed=42)
        b = sample_bins(fg, min_density=1, max_samples=50, seed=42)
        np.testing.assert_array_equal(a.bin_indices, b.bin_indices)
        assert len(a) == 50
        c = sample_bins(fg, min_density=1, max_samples=50, seed=43)
        assert not np.array_equal(a.bin_indices, c.bin_indices)

    def test_no_duplicates_and_sorted(self, rng):
        fg = self._grid(rng)
        sample = sample_bins(fg, min_density=1, max_samples=64, seed=9)
        assert np.all(np.diff(sample.bin_indices) > 0)

    def test_too_few_candidates(self, rng):
        fg = self._grid(rng, n_lines=2)
        with pytest.raises(ValueError, match="nothing to cluster at this threshold"):
            sample_bins(fg, min_density=99, max_samples=100, seed=0)


class TestSidecarCache:
    def test_round_trip(self, rng, tmp_path):
        ls = random_lineset(rng, n_lines=10)
        spec = fit_grid(ls, 24, 24)
        fg = extract_feature_sets(ls, spec, radius=1.0)
        fp = dataset_fingerprint(b"payload", spec, 1.0)
        path = str(tmp_path / "grid.hlfg")
        save_feature_grid(fg, path, fp)
        back = load_feature_grid(path, fp)
        assert back is not None
        np.testing.assert_array_equal(back.indptr, fg.indptr)
        np.testing.assert_array_equal(back.line_ids, fg.line_ids)
        assert back.radius == fg.radius
        assert back.n_lines == fg.n_lines
        assert back.spec == fg.spec

    def test_stale_fingerprint_rejected(self, rng, tmp_path):
        ls = random_lineset(rng, n_lines=4)
        spec = fit_grid(ls, 24, 24)
        fg = extract_feature_sets(ls, spec, radius=1.0)
        path = str(tmp_path / "grid.hlfg")
        save_feature_grid(fg, path, dataset_fingerprint(b"old", spec, 1.0))
        assert load_feature_grid(path, dataset_fingerprint(b"new", spec, 1.0)) is None

    def test_truncated_file_rejected(self, rng, tmp_path):
        ls = random_lineset(rng, n_lines=4)
        spec = fit_grid(ls, 24, 24)
        fg = extract_feature_sets(ls, spec, radius=1.0)
        fp = dataset_fingerprint(b"x", spec, 1.0)
        path = str(tmp_path / "grid.hlfg")
        save_feature_grid(fg, path, fp)
        raw = open(path, "rb").read()
        open(path, "wb").write(raw[: len(raw) // 2])
        assert load_feature_grid(path, fp) is None

    def test_missing_file(self, tmp_path):
        assert load_feature_grid(str(tmp_path / "absent.hlfg"), "fp") is None
