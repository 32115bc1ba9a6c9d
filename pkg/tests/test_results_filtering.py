"""Tests for result row filtering."""

import pytest

from ringcore_sim.app import ResultsViewerApp
from ringcore_sim.result_rows import ResultRow


class TestResultsFiltering:
    """Test cases for results filtering."""

    @pytest.fixture
    def rows(self, sample_records):
        return [ResultRow(record) for record in sample_records]

    @pytest.fixture
    def app(self, tmp_path):
        return ResultsViewerApp(tmp_path)

    def test_empty_filter_matches_all(self, app, rows):
        app.filter_text = ""
        assert all(app.matches_filter(row) for row in rows)

    def test_filter_by_mode_group(self, app, rows):
        app.filter_text = "MG3"
        assert [app.matches_filter(row) for row in rows] == [False, True, False]

    def test_filter_by_status_is_case_insensitive(self, app, rows):
        app.filter_text = "no_lock"
        assert [app.matches_filter(row) for row in rows] == [False, False, True]

    def test_filter_by_direction(self, app, rows):
        app.filter_text = "backward"
        assert [app.matches_filter(row) for row in rows] == [False, False, True]

    def test_filter_by_mode_label(self, app, rows):
        app.filter_text = "<+2,R>"
        assert app.matches_filter(rows[0])
        assert not app.matches_filter(rows[1])

    def test_failures_only(self, app, rows):
        app.failures_only = True
        assert [app.matches_filter(row) for row in rows] == [False, True, True]

    def test_failures_only_combines_with_text(self, app, rows):
        app.failures_only = True
        app.filter_text = "forward"
        assert [app.matches_filter(row) for row in rows] == [False, True, False]

    def test_no_match(self, app, rows):
        app.filter_text = "core7"
        assert not any(app.matches_filter(row) for row in rows)
