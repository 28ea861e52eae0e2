import io as stdio

import numpy as np
import pytest

from huelines.io import (
    ParseError,
    parse_timeseries,
    parse_trajectories,
    read_labels_csv,
    write_labels_csv,
    write_trajectory_csv,
)
from huelines.model import LineKind


class TestTrajectories:
    def test_two_lines(self):
        ls, ids = parse_trajectories("0,0,0\n0,1,1\n1,0,1\n1,1,0")
        assert len(ls) == 2
        assert ls.bbox == (0.0, 0.0, 1.0, 1.0)
        assert ids == ["0", "1"]
        assert ls.kind is LineKind.TRAJECTORY

    def test_single_vertex_line_is_an_error(self):
        with pytest.warns(UserWarning):
            with pytest.raises(ParseError):
                parse_trajectories("0,0,0")

    def test_short_line_skipped_with_warning(self):
        with pytest.warns(UserWarning):
            ls, ids = parse_trajectories("7,0,0\n9,0,1\n9,1,0")
        assert len(ls) == 1
        assert ids == ["9"]
        assert ls.lines[0].id == 0  # re-densified

    def test_header_tolerated(self):
        ls, _ = parse_trajectories("line_id,x,y\n0,0,0\n0,1,1")
        assert len(ls) == 1

    def test_malformed_row_reports_line_number(self):
        with pytest.raises(ParseError) as err:
            parse_trajectories("0,0,0\n0,1,1\n0,oops,2")
        assert err.value.row == 3

    def test_empty_input(self):
        with pytest.raises(ParseError):
            parse_trajectories("")

    def test_vertex_order_preserved(self):
        ls, _ = parse_trajectories("0,3,0\n0,1,0\n0,2,0")
        np.testing.assert_allclose(ls.lines[0].vertices[:, 0], [3, 1, 2])

    def test_deterministic(self):
        text = "5,0,0\n5,2,1\n2,1,1\n2,0,3"
        a, ids_a = parse_trajectories(text)
        b, ids_b = parse_trajectories(text)
        assert ids_a == ids_b
        for la, lb in zip(a.lines, b.lines):
            np.testing.assert_array_equal(la.vertices, lb.vertices)

    def test_csv_round_trip(self, rng, tmp_path):
        from tests.conftest import random_lineset

        ls = random_lineset(rng, n_lines=5, n_vertices=6)
        path = tmp_path / "out.csv"
        with open(path, "w") as fh:
            write_trajectory_csv(ls, fh)
        back, _ = parse_trajectories(path.read_text())
        assert len(back) == len(ls)
        for orig, rt in zip(ls.lines, back.lines):
            np.testing.assert_allclose(rt.vertices, orig.vertices, atol=1e-9)


class TestTimeseries:
    def test_plain_row(self):
        ls, _ = parse_timeseries("1,2,3")
        np.testing.assert_allclose(ls.lines[0].vertices, [(0, 1), (1, 2), (2, 3)])
        assert ls.kind is LineKind.TIMESERIES

    def test_single_gap_omits_vertex(self):
        ls, _ = parse_timeseries("1,,3")
        np.testing.assert_allclose(ls.lines[0].vertices, [(0, 1), (2, 3)])

    def test_wide_gap_splits_series(self):
        ls, ids = parse_timeseries("1,2,,,5,6")
        assert len(ls) == 2
        np.testing.assert_allclose(ls.lines[0].vertices, [(0, 1), (1, 2)])
        np.testing.assert_allclose(ls.lines[1].vertices, [(4, 5), (5, 6)])
        assert ids == ["1.0", "1.1"]  # source row 1, pieces 0 and 1

    def test_leading_and_trailing_gaps_trimmed(self):
        ls, _ = parse_timeseries(",,3,4,5,")
        np.testing.assert_allclose(ls.lines[0].vertices, [(2, 3), (3, 4), (4, 5)])

    def test_all_empty_row_is_an_error(self):
        with pytest.raises(ParseError):
            parse_timeseries("1,2,3\n,,")

    def test_non_numeric_cell_is_an_error(self):
        with pytest.raises(ParseError) as err:
            parse_timeseries("1,2\n1,x")
        assert err.value.row == 2

    def test_multiple_rows_get_dense_ids(self):
        ls, ids = parse_timeseries("1,2,3\n4,5,6\n7,8,9")
        assert [ln.id for ln in ls.lines] == [0, 1, 2]
        assert ids == ["1", "2", "3"]  # 1-based source rows


class TestJsonAlternative:
    def test_accepted_by_both_parsers(self):
        text = '{"lines": [{"id": 3, "points": [[0, 0], [1, 2]]}]}'
        for parser in (parse_trajectories, parse_timeseries):
            ls, ids = parser(text)
            assert len(ls) == 1
            assert ids == ["3"]
            np.testing.assert_allclose(ls.lines[0].vertices, [(0, 0), (1, 2)])

    def test_bad_json_payload(self):
        with pytest.raises(ParseError):
            parse_trajectories('{"lines": [{"id": 0, "points": [[0, 0]]}]}')


class TestLabelsCsv:
    def test_round_trip(self, tmp_path):
        labels = {0: 2, 1: 0, 2: -1}
        path = tmp_path / "labels.csv"
        with open(path, "w") as fh:
            write_labels_csv(labels, fh)
        assert read_labels_csv(stdio.StringIO(path.read_text())) == labels
