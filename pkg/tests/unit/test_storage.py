"""
Tests for point files and report CSVs
"""

import numpy as np
import pandas as pd
import pytest

from evaluation.evaluator import EvalReport
from storage.point_files import (
    read_indices, read_normals, read_points, read_stem_list, write_indices, write_normals, write_points,
    write_stem_list,
)
from storage.reports import (
    category_table_path, read_csv_table, write_category_table, write_loss_trace, write_report_csv,
)
from tests.fixtures.sample_data import write_cloud
from utils.exceptions import InvalidInputError, PointFileParseError


def report(name, category, value):
    return EvalReport(per_point_errors=np.array([value]), rmse=value, pgp={5.0: 100.0, 10.0: 100.0},
                      category=category, name=name)


class TestReadPoints:
    def test_two_points(self, tmp_path):
        path = tmp_path / "two.xyz"
        path.write_text("0 0 0\n1 0 0\n")
        cloud = read_points(path)
        np.testing.assert_array_equal(cloud.points, [[0, 0, 0], [1, 0, 0]])
        assert cloud.name == "two"
        assert not cloud.has_normals

    def test_missing_value_names_line(self, tmp_path):
        path = tmp_path / "bad.xyz"
        path.write_text("1 2\n")
        with pytest.raises(PointFileParseError, match="line 1"):
            read_points(path)

    def test_bad_number_names_line(self, tmp_path):
        path = tmp_path / "bad.xyz"
        path.write_text("0 0 0\n\n1 x 0\n")
        with pytest.raises(PointFileParseError) as info:
            read_points(path)
        assert info.value.line_number == 3

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "bad.xyz"
        path.write_text("0 nan 0\n")
        with pytest.raises(PointFileParseError):
            read_points(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.xyz"
        path.write_text("")
        with pytest.raises(InvalidInputError):
            read_points(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidInputError):
            read_points(tmp_path / "absent.xyz")

    def test_sibling_normals_loaded(self, tmp_path, plane):
        path = write_cloud(tmp_path, plane, "plane")
        cloud = read_points(path)
        assert cloud.has_normals
        np.testing.assert_allclose(cloud.gt_normals, plane.gt_normals)

    def test_normal_count_must_match(self, tmp_path):
        (tmp_path / "c.xyz").write_text("0 0 0\n1 0 0\n")
        (tmp_path / "c.normals").write_text("0 0 1\n")
        with pytest.raises(InvalidInputError):
            read_points(tmp_path / "c.xyz")


class TestWriteRead:
    def test_points_round_trip_exactly(self, tmp_path, rng):
        points = rng.standard_normal((50, 3))
        write_points(tmp_path / "p.xyz", points)
        np.testing.assert_array_equal(read_points(tmp_path / "p.xyz").points, points)

    def test_normals_ten_digits(self, tmp_path, rng):
        normals = rng.standard_normal((20, 3))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        write_normals(tmp_path / "p.normals", normals)
        np.testing.assert_allclose(read_normals(tmp_path / "p.normals"), normals, atol=1e-9)

    def test_decimal_point(self, tmp_path):
        write_normals(tmp_path / "n.normals", [[0.5, 0.0, np.sqrt(0.75)]])
        text = (tmp_path / "n.normals").read_text()
        assert "," not in text
        assert text.startswith("0.5 0 0.866")

    def test_empty_normals_gives_empty_file(self, tmp_path):
        write_normals(tmp_path / "empty.normals", np.zeros((0, 3)))
        assert (tmp_path / "empty.normals").read_text() == ""

    def test_creates_parent_directories(self, tmp_path):
        path = write_points(tmp_path / "a" / "b" / "p.xyz", [[1.0, 2.0, 3.0]])
        assert path.is_file()


class TestReadNormals:
    def test_near_unit_rows_normalized(self, tmp_path):
        path = tmp_path / "n.normals"
        path.write_text("0 0 1.0005\n")
        np.testing.assert_allclose(read_normals(path), [[0.0, 0.0, 1.0]])

    def test_far_from_unit_rejected(self, tmp_path):
        path = tmp_path / "n.normals"
        path.write_text("0 0 1\n0 0 2\n")
        with pytest.raises(PointFileParseError, match="line 2"):
            read_normals(path)


class TestIndices:
    def test_round_trip(self, tmp_path):
        write_indices(tmp_path / "s.idx", [4, 0, 9])
        np.testing.assert_array_equal(read_indices(tmp_path / "s.idx", 10), [4, 0, 9])

    def test_out_of_range(self, tmp_path):
        (tmp_path / "s.idx").write_text("1\n10\n")
        with pytest.raises(PointFileParseError, match="line 2"):
            read_indices(tmp_path / "s.idx", 10)

    def test_not_an_integer(self, tmp_path):
        (tmp_path / "s.pidx").write_text("1.5\n")
        with pytest.raises(PointFileParseError):
            read_indices(tmp_path / "s.pidx")

    def test_stem_lists(self, tmp_path):
        write_stem_list(tmp_path / "testset.txt", ["a", "b_noise_white_0.006"])
        (tmp_path / "testset.txt").write_text((tmp_path / "testset.txt").read_text() + "\n\n")
        assert read_stem_list(tmp_path / "testset.txt") == ["a", "b_noise_white_0.006"]


class TestReports:
    def test_report_csv(self, tmp_path):
        path = write_report_csv(tmp_path / "report.csv", [report("a", "none", 1.5), report("b", "stripes", 2.5)])
        frame = read_csv_table(path)
        assert list(frame.columns) == ["shape", "category", "points", "rmse", "pgp5", "pgp10"]
        assert frame["rmse"].tolist() == [1.5, 2.5]

    def test_category_table(self, tmp_path):
        reports = [report("a", "none", 1.0), report("b", "stripes", 3.0)]
        path = write_category_table(category_table_path(tmp_path / "report.csv"), reports)
        assert path.name == "report.table.csv"
        frame = read_csv_table(path)
        assert frame["category"].tolist() == ["none", "stripes", "Average"]
        assert frame["rmse"].iloc[-1] == pytest.approx(2.0)

    def test_empty_report(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_report_csv(tmp_path / "report.csv", [])

    def test_loss_trace(self, tmp_path):
        trace = pd.DataFrame({"epoch": [1, 2], "mean_loss": [0.5, 0.25]})
        text = write_loss_trace(tmp_path / "trace.csv", trace).read_text()
        assert text == "epoch,mean_loss\n1,0.5\n2,0.25\n"

    def test_loss_trace_columns(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_loss_trace(tmp_path / "trace.csv", pd.DataFrame({"epoch": [1]}))

    def test_missing_table(self, tmp_path):
        with pytest.raises(InvalidInputError):
            read_csv_table(tmp_path / "absent.csv")
