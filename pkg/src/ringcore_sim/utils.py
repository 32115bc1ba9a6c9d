"""Utility functions for ringcore-sim."""

import logging
import os
from typing import Any, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table
from rich.text import Text

from .constants import MODE_GROUP_COLORS, STATUS_COLORS

LOG_LEVEL_ENV = "RINGCORE_SIM_LOG_LEVEL"
PACKAGE_LOGGER = "ringcore_sim"


def resolve_log_level(level: Optional[str] = None) -> int:
    """Flag value, else the environment, else WARNING."""
    name = (level or os.environ.get(LOG_LEVEL_ENV) or "WARNING").upper()
    value = logging.getLevelName(name)
    if not isinstance(value, int):
        raise ValueError(f"unknown log level {name!r}")
    return value


def configure_logging(
    level: Optional[str] = None, console: Optional[Console] = None
) -> logging.Logger:
    """Install one RichHandler on the package logger (idempotent)."""
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel(resolve_log_level(level))
    handler = next((h for h in logger.handlers if isinstance(h, RichHandler)), None)
    if handler is None:
        handler = RichHandler(
            console=console or Console(stderr=True),
            show_path=False,
            rich_tracebacks=True,
        )
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(handler)
    logger.propagate = False
    return logger


def format_ber(value: Optional[float]) -> str:
    if value is None:
        return "-"
    return f"{value:.3e}"


def format_db(value: Optional[float]) -> str:
    if value is None:
        return "-"
    if value == float("inf"):
        return "inf"
    return f"{value:.2f}"


def apply_rich_coloring(text: str, mode_group: Optional[int] = None) -> Text:
    """Color a rendered result row by mode group and pass/fail status."""
    rich_text = Text(text)

    if mode_group in MODE_GROUP_COLORS:
        r, g, b = MODE_GROUP_COLORS[mode_group]
        rich_text.highlight_regex(r"\bMG\d+\b", style=f"rgb({r},{g},{b})")

    for status, color in STATUS_COLORS.items():
        rich_text.highlight_regex(rf"\b{status.upper()}\b", style=f"bold {color}")

    # Mode labels like <+3,R>
    rich_text.highlight_regex(r"<[+-]\d+,[RL]>", style="bold")
    rich_text.highlight_regex(r"\b(forward|backward)\b", style="dim")

    return rich_text


def summary_table(report: dict[str, Any]) -> Table:
    """Console table with the acceptance checks of a report document."""
    table = Table(title=f"{report.get('experiment', '?')} (seed {report.get('seed')})")
    table.add_column("check")
    table.add_column("result")
    table.add_column("detail", overflow="fold")
    for check in report.get("acceptance", []):
        passed = check.get("passed")
        table.add_row(
            check.get("name", ""),
            Text("PASS" if passed else "FAIL", style="green" if passed else "bold red"),
            check.get("detail", ""),
        )
    counts = report.get("counts", {})
    table.caption = (
        f"{counts.get('passed', 0)} of {counts.get('total', 0)} channels pass"
    )
    summary = report.get("summary", {})
    for name, label in (("worst_intermg_db", "inter-MG"), ("worst_intercore_db", "inter-core")):
        if name in summary:
            value = summary[name]
            shown = f"{value:.1f}" if isinstance(value, (int, float)) else str(value)
            table.caption += f", worst {label} XT {shown} dB"
    return table
