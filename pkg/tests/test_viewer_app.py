"""Tests for ResultsViewerApp TUI interactions."""

from unittest.mock import patch

import pytest
from textual.widgets import Checkbox, RichLog, Static

from ringcore_sim.app import FilterInput, ResultsViewerApp
from ringcore_sim.constants import RunState
from ringcore_sim.ui_components import ModeGroupToggleBar, RunStatusBar


class TestResultsViewerApp:
    """Test cases for ResultsViewerApp TUI interactions."""

    @pytest.mark.asyncio
    async def test_app_loads_results(self, results_dir):
        """Rows and report are read on mount."""
        app = ResultsViewerApp(results_dir)

        async with app.run_test():
            assert app.row_count == 3
            assert app.shown_count == 3
            assert app.report is not None
            assert app.report["experiment"] == "ber_grid"

    @pytest.mark.asyncio
    async def test_app_compose_structure(self, results_dir):
        app = ResultsViewerApp(results_dir)

        async with app.run_test():
            assert app.query_one("#filter_input", FilterInput).has_focus
            assert app.query_one("#results_display", RichLog)
            assert app.query_one("#summary_bar", Static)
            assert app.query_one("#run_status_bar", RunStatusBar)

    @pytest.mark.asyncio
    async def test_missing_directory_shows_nothing(self, tmp_path):
        app = ResultsViewerApp(tmp_path / "missing")

        async with app.run_test():
            assert app.row_count == 0
            assert app.report is None
            status_bar = app.query_one("#run_status_bar", RunStatusBar)
            assert status_bar.state == RunState.PENDING

    @pytest.mark.asyncio
    async def test_typing_filters_rows(self, results_dir):
        app = ResultsViewerApp(results_dir)

        async with app.run_test() as pilot:
            await pilot.press("M", "G", "3")
            assert app.filter_text == "MG3"
            assert app.shown_count == 1

    @pytest.mark.asyncio
    async def test_toggle_failures_with_f(self, results_dir):
        app = ResultsViewerApp(results_dir)

        async with app.run_test() as pilot:
            app.query_one("#results_display", RichLog).focus()
            await pilot.pause()
            await pilot.press("f")
            assert app.failures_only
            assert app.shown_count == 2
            await pilot.press("f")
            assert not app.failures_only
            assert app.shown_count == 3

    @pytest.mark.asyncio
    async def test_mode_groups_discovered(self, results_dir):
        app = ResultsViewerApp(results_dir)

        async with app.run_test() as pilot:
            await pilot.pause()
            toggle_bar = app.query_one("#mode_group_toggle_bar", ModeGroupToggleBar)
            assert toggle_bar.mode_groups == [2, 3, 4]
            assert app.query_one("#mg_3", Checkbox).value

    @pytest.mark.asyncio
    async def test_disabling_mode_group_hides_rows(self, results_dir):
        app = ResultsViewerApp(results_dir)

        async with app.run_test() as pilot:
            await pilot.pause()
            app.query_one("#mg_2", Checkbox).value = False
            await pilot.pause()
            assert app.shown_count == 2

    @pytest.mark.asyncio
    async def test_toggle_all(self, results_dir):
        app = ResultsViewerApp(results_dir)

        async with app.run_test() as pilot:
            await pilot.pause()
            toggle_bar = app.query_one("#mode_group_toggle_bar", ModeGroupToggleBar)
            toggle_bar.toggle_all()
            await pilot.pause()
            assert toggle_bar.enabled_groups == set()
            assert app.shown_count == 0
            toggle_bar.toggle_all()
            await pilot.pause()
            assert app.shown_count == 3

    @pytest.mark.asyncio
    async def test_reload_picks_up_new_rows(self, results_dir):
        app = ResultsViewerApp(results_dir)

        async with app.run_test() as pilot:
            csv_path = results_dir / "results.csv"
            lines = csv_path.read_text().splitlines()
            csv_path.write_text("\n".join(lines[:2]) + "\n")
            app.query_one("#results_display", RichLog).focus()
            await pilot.pause()
            await pilot.press("r")
            assert app.row_count == 1

    @pytest.mark.asyncio
    async def test_status_bar_from_report(self, results_dir):
        app = ResultsViewerApp(results_dir)

        async with app.run_test():
            status_bar = app.query_one("#run_status_bar", RunStatusBar)
            assert status_bar.state == RunState.DONE
            assert status_bar.experiment == "ber_grid"
            assert status_bar.counts["failed"] == 2

    @pytest.mark.asyncio
    async def test_action_quit(self, results_dir):
        app = ResultsViewerApp(results_dir)

        async with app.run_test():
            with patch.object(app, "exit") as mock_exit:
                app.action_quit()
                mock_exit.assert_called_once()

    @pytest.mark.asyncio
    async def test_escape_blurs_input(self, results_dir):
        app = ResultsViewerApp(results_dir)

        async with app.run_test() as pilot:
            await pilot.press("escape")
            assert not app.query_one("#filter_input", FilterInput).has_focus

    @pytest.mark.asyncio
    async def test_tab_cycles_focus(self, results_dir):
        app = ResultsViewerApp(results_dir)

        async with app.run_test() as pilot:
            await pilot.press("tab")
            assert app.query_one("#results_display", RichLog).has_focus
            await pilot.press("tab")
            assert app.query_one("#filter_input", FilterInput).has_focus


class TestModeGroupToggleBar:
    """Test cases for the toggle bar outside a running app."""

    def test_add_mode_group_before_mount(self):
        bar = ModeGroupToggleBar()
        bar.add_mode_group(4)
        bar.add_mode_group(2)
        bar.add_mode_group(4)
        assert bar.mode_groups == [2, 4]
        assert bar.is_enabled(2)

    def test_toggle_all_unmounted(self):
        bar = ModeGroupToggleBar([2, 3])
        with patch.object(bar, "post_message"):
            bar.toggle_all()
            assert not bar.is_enabled(2)
            bar.toggle_all()
            assert bar.is_enabled(3)
