"""UI components for the ringcore-sim results browser."""

from typing import Any, Optional

from textual.app import ComposeResult
from textual.containers import Horizontal
from textual.message import Message
from textual.widgets import Button, Checkbox, Static

from .constants import RunState


class ModeGroupToggleBar(Horizontal):
    """Horizontal bar with one checkbox per discovered mode group."""

    class ModeGroupToggled(Message):
        """Message sent when a mode group is toggled."""

        def __init__(self, mode_group: int, enabled: bool):
            self.mode_group = mode_group
            self.enabled = enabled
            super().__init__()

    def __init__(self, mode_groups: Optional[list[int]] = None, **kwargs):
        super().__init__(**kwargs)
        self.mode_groups = sorted(set(mode_groups or []))
        self.enabled_groups = set(self.mode_groups)

    def compose(self) -> ComposeResult:
        if self.mode_groups:
            yield Button("Toggle All", id="toggle_all_button", compact=True)
        for mg in self.mode_groups:
            yield Checkbox(f"[b]MG{mg}[/b]", value=True, id=f"mg_{mg}", compact=True)

    def add_mode_group(self, mode_group: int) -> None:
        """Add a mode group if it is new; new groups start enabled."""
        if mode_group in self.mode_groups:
            return
        self.mode_groups.append(mode_group)
        self.mode_groups.sort()
        self.enabled_groups.add(mode_group)
        if self.is_mounted:
            if len(self.mode_groups) == 1:
                self.mount(Button("Toggle All", id="toggle_all_button", compact=True))
            self.mount(
                Checkbox(
                    f"[b]MG{mode_group}[/b]",
                    value=True,
                    id=f"mg_{mode_group}",
                    compact=True,
                )
            )

    def on_checkbox_changed(self, event: Checkbox.Changed) -> None:
        if event.checkbox.id and event.checkbox.id.startswith("mg_"):
            mode_group = int(event.checkbox.id.removeprefix("mg_"))
            if event.checkbox.value:
                self.enabled_groups.add(mode_group)
            else:
                self.enabled_groups.discard(mode_group)
            self.post_message(self.ModeGroupToggled(mode_group, event.checkbox.value))

    def on_button_pressed(self, event: Button.Pressed) -> None:
        if event.button.id == "toggle_all_button":
            self.toggle_all()

    def toggle_all(self) -> None:
        """Disable all groups when all are enabled; otherwise enable all."""
        if not self.mode_groups:
            return
        target = len(self.enabled_groups) != len(self.mode_groups)
        for mg in self.mode_groups:
            if self.is_mounted:
                self.query_one(f"#mg_{mg}", Checkbox).value = target
            if target:
                self.enabled_groups.add(mg)
            else:
                self.enabled_groups.discard(mg)
            self.post_message(self.ModeGroupToggled(mg, target))

    def is_enabled(self, mode_group: int) -> bool:
        return mode_group in self.enabled_groups


class RunStatusBar(Horizontal):
    """Status bar with experiment name, config hash, run state and counts."""

    STATE_COLORS = {
        RunState.PENDING: "dim",
        RunState.RUNNING: "yellow",
        RunState.DONE: "green",
        RunState.FAILED: "red",
    }

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.experiment = ""
        self.config_hash = ""
        self.state = RunState.PENDING
        self.counts: dict[str, int] = {}

    def compose(self) -> ComposeResult:
        yield Static("Run: ", id="run_label")
        yield Static("PENDING", id="run_state_display")
        yield Static("", id="run_info_display")

    def update_status(
        self,
        experiment: str,
        config_hash: str,
        state: RunState,
        counts: Optional[dict[str, int]] = None,
        accepted: Optional[bool] = None,
    ) -> None:
        self.experiment = experiment
        self.config_hash = config_hash
        self.state = state
        self.counts = counts or {}

        color = self.STATE_COLORS.get(state, "white")
        self.query_one("#run_state_display", Static).update(
            f"[{color}]{state.value.upper()}[/]"
        )

        info_parts = [experiment or "no report"]
        if config_hash:
            info_parts.append(f"config {config_hash[:12]}")
        if self.counts:
            info_parts.append(
                f"[green]{self.counts.get('passed', 0)} pass[/] / "
                f"[red]{self.counts.get('failed', 0)} fail[/] "
                f"of {self.counts.get('total', 0)}"
            )
        if accepted is not None:
            info_parts.append("[green]accepted[/]" if accepted else "[red]rejected[/]")
        self.query_one("#run_info_display", Static).update(" | ".join(info_parts))

    def update_from_report(self, report: Optional[dict[str, Any]]) -> None:
        """Fill the bar from a report.json document (None when absent)."""
        if report is None:
            self.update_status("", "", RunState.PENDING)
            return
        runner = report.get("telemetry", {}).get("runner", {})
        state = RunState(runner.get("state", RunState.DONE.value))
        self.update_status(
            report.get("experiment", ""),
            report.get("config_hash", ""),
            state,
            report.get("counts"),
            report.get("accepted"),
        )
