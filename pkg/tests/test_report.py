"""Tests for channel rows and report files."""

import json
import math

import pytest

from ringcore_sim.constants import Direction, Polarization
from ringcore_sim.envelope import ModeId
from ringcore_sim.report import (
    CSV_COLUMNS,
    ChannelRow,
    LinkReport,
    json_safe,
    read_report,
    read_results_csv,
)


def _mode(mode_group: int = 3, direction: Direction = Direction.FORWARD) -> ModeId:
    return ModeId(1, mode_group, Polarization.R, direction)


class TestChannelRow:
    """Test cases for per-channel result rows."""

    def test_pass_needs_whole_interval_below_threshold(self):
        assert ChannelRow.measured(_mode(), 0.02, (0.019, 0.021), 10.0, 30.0).passed
        straddling = ChannelRow.measured(_mode(), 0.0239, (0.0230, 0.0245), 9.0, 33.0)
        assert straddling.status == "fail"

    def test_failed_rows(self):
        row = ChannelRow.failed(_mode(), "no_lock")
        assert row.status == "no_lock"
        assert math.isnan(row.ber)
        with pytest.raises(ValueError):
            ChannelRow.failed(_mode(), "exploded")

    def test_record_has_every_column(self):
        record = ChannelRow.measured(_mode(), 1e-3, (9e-4, 1.1e-3), 14.0, 20.0).as_record()
        assert tuple(record) == CSV_COLUMNS
        assert record["direction"] == "forward"


class TestJsonSafe:
    """Test cases for strict-JSON conversion."""

    def test_non_finite_values(self):
        data = {"a": math.inf, "b": [-math.inf, math.nan], 3: 1.5}
        assert json_safe(data) == {"a": "inf", "b": ["-inf", "nan"], "3": 1.5}


class TestLinkReport:
    """Test cases for LinkReport."""

    def test_acceptance(self):
        report = LinkReport("ber_grid", 1, "00")
        assert report.check("first", True)
        assert report.accepted
        assert not report.check("second", False, "detail")
        assert not report.accepted

    def test_counts(self):
        report = LinkReport("ber_grid", 1, "00")
        report.rows = [
            ChannelRow.measured(_mode(2), 1e-3, (9e-4, 1.1e-3), 14.0, 20.0),
            ChannelRow.failed(_mode(4), "diverged"),
        ]
        assert report.counts() == {"total": 2, "passed": 1, "failed": 1}

    def test_write_files(self, tmp_path):
        report = LinkReport("ber_grid", 7, "cd" * 32, summary={"snr": math.inf})
        report.rows = [
            ChannelRow.failed(_mode(4, Direction.BACKWARD), "no_lock"),
            ChannelRow.measured(_mode(2), 1e-3, (9e-4, 1.1e-3), 14.0, 20.0),
        ]
        report.taps = {"core1/MG2/forward/w0": [[0.0, 1.0]]}
        written = report.write(tmp_path / "out")
        assert [p.name for p in written] == ["results.csv", "report.json", "taps.json"]

        rows = read_results_csv(tmp_path / "out" / "results.csv")
        assert [r["direction"] for r in rows] == ["backward", "forward"]
        assert rows[0]["ber"] == ""
        assert rows[1]["ber"] == "0.001"

        document = read_report(tmp_path / "out")
        assert document["summary"]["snr"] == "inf"
        assert document["seed"] == 7
        json.loads((tmp_path / "out" / "report.json").read_text())

    def test_no_taps_file_without_taps(self, tmp_path):
        written = LinkReport("budget_check", 1, "00").write(tmp_path)
        assert "taps.json" not in [p.name for p in written]

    def test_missing_report(self, tmp_path):
        assert read_report(tmp_path) is None
