"""Results browser for a ringcore-sim output directory."""

import logging
from pathlib import Path

from textual.app import App, ComposeResult
from textual.binding import Binding
from textual.containers import Vertical
from textual.reactive import reactive
from textual.widgets import Footer, Header, Input, RichLog, Static

from .report import read_report, read_results_csv
from .result_rows import ResultRow
from .ui_components import ModeGroupToggleBar, RunStatusBar
from .utils import apply_rich_coloring

logger = logging.getLogger(__name__)


class FilterInput(Input):
    """Filter input that lets app bindings through when unfocused."""

    def check_consume_key(self, key: str, character: str | None) -> bool:
        return character is not None and character.isprintable()


class ResultsViewerApp(App):
    """Browse, filter and re-read the rows of results.csv."""

    CSS = """
    #results_display {
        height: 1fr;
        border: solid $primary;
        scrollbar-gutter: stable;
        background: transparent;
    }

    #main_container {
        height: 1fr;
    }

    #filter_input {
        height: 3;
        border: solid $accent;
        margin: 0 1 0 1;
    }

    #mode_group_toggle_bar {
        height: auto;
        margin: 0;
        padding: 0;
    }

    #mode_group_toggle_bar Checkbox {
        margin: 0 1;
        padding: 0;
        width: auto;
    }

    #mode_group_toggle_bar Button {
        margin: 0 1;
        padding: 0;
        width: auto;
        height: 1;
        min-width: 10;
        max-width: 10;
    }

    #run_status_bar {
        height: 1;
        background: $surface;
        color: $text;
        padding: 0 1;
    }

    #run_status_bar Static {
        margin: 0 1;
        padding: 0;
        width: auto;
    }

    #summary_bar {
        height: auto;
        background: $surface;
        padding: 0 1;
        border-top: solid $accent;
        border-bottom: solid $accent;
        text-style: bold;
    }
    """

    BINDINGS = [
        Binding("q", "quit", "Quit", priority=True),
        Binding("ctrl+c", "quit", "Quit", priority=True),
        Binding("tab", "focus_next", "Focus Next", priority=True),
        Binding("shift+tab", "focus_previous", "Focus Previous", priority=True),
        Binding("escape", "focus_app", "Focus App", priority=True),
        Binding("f", "toggle_failures", "Failures Only"),
        Binding("r", "reload", "Reload"),
    ]

    filter_text = reactive("")
    failures_only = reactive(False)
    row_count = reactive(0)
    shown_count = reactive(0)

    def __init__(self, results_dir: "str | Path"):
        super().__init__()
        self.results_dir = Path(results_dir)
        self.rows: list[ResultRow] = []
        self.report: dict | None = None

    def compose(self) -> ComposeResult:
        yield Header()
        yield Static("", id="summary_bar")
        yield Vertical(
            FilterInput(placeholder="Filter rows...", id="filter_input"),
            ModeGroupToggleBar(id="mode_group_toggle_bar"),
            RunStatusBar(id="run_status_bar"),
            RichLog(id="results_display", auto_scroll=False),
            id="main_container",
        )
        yield Footer()

    def on_mount(self) -> None:
        self.title = f"ringcore-sim: {self.results_dir}"
        self.query_one("#filter_input", FilterInput).focus()
        self.load_results()

    def load_results(self) -> None:
        """(Re)read results.csv and report.json from the results directory."""
        csv_path = self.results_dir / "results.csv"
        try:
            records = read_results_csv(csv_path) if csv_path.exists() else []
            self.rows = [ResultRow(record) for record in records]
        except (OSError, ValueError) as exc:
            logger.warning("Cannot read %s: %s", csv_path, exc)
            self.rows = []
        try:
            self.report = read_report(self.results_dir)
        except (OSError, ValueError) as exc:
            logger.warning("Cannot read report in %s: %s", self.results_dir, exc)
            self.report = None
        self.row_count = len(self.rows)

        toggle_bar = self.query_one("#mode_group_toggle_bar", ModeGroupToggleBar)
        for row in self.rows:
            toggle_bar.add_mode_group(row.mode_group)
        self.query_one("#run_status_bar", RunStatusBar).update_from_report(self.report)
        self.update_results_display()

    def matches_filter(self, row: ResultRow) -> bool:
        if self.failures_only and row.passed:
            return False
        try:
            toggle_bar = self.query_one("#mode_group_toggle_bar", ModeGroupToggleBar)
            if toggle_bar.mode_groups and not toggle_bar.is_enabled(row.mode_group):
                return False
        except Exception:
            # Toggle bar absent outside a running app
            pass
        if not self.filter_text:
            return True
        return self.filter_text.lower() in row.content.lower()

    def update_results_display(self) -> None:
        display = self.query_one("#results_display", RichLog)
        display.clear()
        shown = 0
        for row in self.rows:
            if self.matches_filter(row):
                display.write(apply_rich_coloring(row.content, row.mode_group))
                shown += 1
        self.shown_count = shown
        self.update_summary_bar()

    def update_summary_bar(self) -> None:
        filter_text = (
            f"Filter: [bold]{self.filter_text}[/bold]"
            if self.filter_text
            else "Filter: [dim]none[/dim]"
        )
        if self.shown_count != self.row_count:
            rows_text = f"Rows: [bold]{self.shown_count:,}[/bold] / {self.row_count:,}"
        else:
            rows_text = f"Rows: [bold]{self.row_count:,}[/bold]"
        parts = [filter_text, rows_text]
        if self.failures_only:
            parts.append("[red]failures only[/red]")
        self.query_one("#summary_bar", Static).update(" | ".join(parts))

    def on_input_changed(self, event: Input.Changed) -> None:
        if event.input.id == "filter_input":
            self.filter_text = event.value
            self.update_results_display()

    def on_mode_group_toggle_bar_mode_group_toggled(
        self, event: ModeGroupToggleBar.ModeGroupToggled
    ) -> None:
        self.update_results_display()

    def action_toggle_failures(self) -> None:
        self.failures_only = not self.failures_only
        self.update_results_display()

    def action_reload(self) -> None:
        self.load_results()

    def action_quit(self) -> None:
        self.exit()

    def action_focus_next(self) -> None:
        if self.focused is not None and self.focused.id == "filter_input":
            self.query_one("#results_display", RichLog).focus()
        else:
            self.query_one("#filter_input", FilterInput).focus()

    def action_focus_previous(self) -> None:
        if self.focused is not None and self.focused.id == "results_display":
            self.query_one("#filter_input", FilterInput).focus()
        else:
            self.query_one("#results_display", RichLog).focus()

    def action_focus_app(self) -> None:
        if self.focused is not None:
            self.focused.blur()
