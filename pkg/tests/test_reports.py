"""
Tests for bresse.reports: CSV and JSON reports and deterministic SVG plots.
"""

import os
import re

import numpy as np
import pytest

from bresse.exceptions import ReportError
from bresse.reports.csv_report import format_value, read_csv_report, write_csv_report
from bresse.reports.json_report import read_json_report, to_jsonable, write_json_report
from bresse.reports.svg_plot import SERIES_ID, emit_plot


def series_paths(svg_text):
    """Path data of the element carrying the series id."""
    match = re.search(r'<g id="%s">(.*?)</g>' % SERIES_ID, svg_text, re.S)
    assert match, "series group missing"
    return re.findall(r'\sd="([^"]*)"', match.group(1))


class TestCsvReport:
    """Atomic CSV reports"""

    def test_values_round_trip_exactly(self, tmp_path):
        values = [0.1, 1.0 / 3.0, 1e-300, -2.5e17]
        path = write_csv_report(str(tmp_path / "a.csv"), ("x", "y"), [(v, 2.0 * v) for v in values])
        data = read_csv_report(path, required=("x", "y"))
        assert list(data["x"]) == values
        assert list(data["y"]) == [2.0 * v for v in values]

    def test_format_value(self):
        assert format_value(0.1) == "0.1"
        assert format_value(np.float64(1e-20)) == "1e-20"
        assert format_value(np.int64(3)) == "3"
        assert format_value(True) == "True"
        assert format_value(float("inf")) == "inf"

    def test_header_only(self, tmp_path):
        path = write_csv_report(str(tmp_path / "empty.csv"), ("t", "E"), [])
        data = read_csv_report(path)
        assert data["t"].size == 0
        with open(path) as handle:
            assert handle.read() == "t,E\n"

    def test_no_temporary_files_left(self, tmp_path):
        write_csv_report(str(tmp_path / "a.csv"), ("x",), [(1.0,)])
        write_csv_report(str(tmp_path / "a.csv"), ("x",), [(2.0,)])
        assert os.listdir(tmp_path) == ["a.csv"]
        assert read_csv_report(str(tmp_path / "a.csv"))["x"][0] == 2.0

    def test_creates_directories(self, tmp_path):
        path = write_csv_report(str(tmp_path / "deep" / "er" / "a.csv"), ("x",), [(1.0,)])
        assert os.path.exists(path)

    def test_ragged_row(self, tmp_path):
        with pytest.raises(ReportError):
            write_csv_report(str(tmp_path / "a.csv"), ("x", "y"), [(1.0,)])

    def test_missing_column(self, tmp_path):
        path = write_csv_report(str(tmp_path / "a.csv"), ("x",), [(1.0,)])
        with pytest.raises(ReportError) as excinfo:
            read_csv_report(path, required=("x", "y"))
        assert "y" in str(excinfo.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ReportError):
            read_csv_report(str(tmp_path / "nope.csv"))


class TestJsonReport:
    """Sorted JSON summaries"""

    def test_sorted_and_indented(self, tmp_path):
        path = write_json_report(str(tmp_path / "s.json"), {"b": 1, "a": np.float64(0.5)})
        with open(path) as handle:
            text = handle.read()
        assert text == '{\n  "a": 0.5,\n  "b": 1\n}\n'

    def test_non_finite_and_complex(self):
        payload = to_jsonable({"x": float("inf"), "z": 1.0 - 2.0j, "v": np.array([1, 2])})
        assert payload == {"x": "inf", "z": {"re": 1.0, "im": -2.0}, "v": [1, 2]}

    def test_read_back(self, tmp_path):
        path = write_json_report(str(tmp_path / "s.json"), {"passed": np.bool_(True), "values": (1.5, 2)})
        assert read_json_report(path) == {"passed": True, "values": [1.5, 2]}

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ReportError):
            read_json_report(str(path))


class TestEmitPlot:
    """SVG rendering of CSV reports"""

    def test_two_points_give_one_segment(self, tmp_path):
        csv_path = write_csv_report(str(tmp_path / "resolvent.csv"), ("lambda", "norm"), [(0.0, 1.0), (1.0, 2.0)])
        svg_path = emit_plot(csv_path, "resolvent")
        assert svg_path == str(tmp_path / "resolvent.svg")
        with open(svg_path) as handle:
            paths = series_paths(handle.read())
        assert len(paths) == 1
        assert paths[0].count("M") == 1
        assert paths[0].count("L") == 1

    def test_empty_report_has_no_series(self, tmp_path):
        csv_path = write_csv_report(str(tmp_path / "energy.csv"), ("t", "E", "loss"), [])
        with open(emit_plot(csv_path, "energy")) as handle:
            text = handle.read()
        assert text.lstrip().startswith("<?xml")
        assert 'id="%s"' % SERIES_ID not in text

    def test_deterministic(self, tmp_path):
        rows = [(t, float(np.exp(-t))) for t in np.linspace(0.0, 5.0, 30)]
        csv_path = write_csv_report(str(tmp_path / "energy.csv"), ("t", "E"), rows)
        first = open(emit_plot(csv_path, "energy", str(tmp_path / "a.svg"))).read()
        second = open(emit_plot(csv_path, "energy", str(tmp_path / "b.svg"))).read()
        assert first == second

    def test_spectrum_is_markers(self, tmp_path):
        csv_path = write_csv_report(str(tmp_path / "spectrum.csv"), ("re", "im"),
                                    [(-0.5, 1.0), (-0.5, -1.0), (-0.3, 4.0)])
        with open(emit_plot(csv_path, "spectrum")) as handle:
            assert 'id="%s"' % SERIES_ID in handle.read()

    def test_unknown_kind(self, tmp_path):
        csv_path = write_csv_report(str(tmp_path / "a.csv"), ("x",), [(1.0,)])
        with pytest.raises(ReportError):
            emit_plot(csv_path, "histogram")

    def test_missing_columns(self, tmp_path):
        csv_path = write_csv_report(str(tmp_path / "a.csv"), ("t",), [(1.0,)])
        with pytest.raises(ReportError):
            emit_plot(csv_path, "energy")
