"""Tests for package logging setup."""

import io
import logging

import pytest
from rich.console import Console
from rich.logging import RichHandler

from ringcore_sim.utils import (
    LOG_LEVEL_ENV,
    PACKAGE_LOGGER,
    configure_logging,
    resolve_log_level,
)


@pytest.fixture
def clean_logger():
    logger = logging.getLogger(PACKAGE_LOGGER)
    saved = (list(logger.handlers), logger.level, logger.propagate)
    logger.handlers.clear()
    yield logger
    logger.handlers[:] = saved[0]
    logger.setLevel(saved[1])
    logger.propagate = saved[2]


class TestResolveLogLevel:
    """Test cases for log-level resolution."""

    def test_default_is_warning(self, monkeypatch):
        monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)
        assert resolve_log_level() == logging.WARNING

    def test_environment_used_without_flag(self, monkeypatch):
        monkeypatch.setenv(LOG_LEVEL_ENV, "debug")
        assert resolve_log_level() == logging.DEBUG

    def test_flag_overrides_environment(self, monkeypatch):
        monkeypatch.setenv(LOG_LEVEL_ENV, "DEBUG")
        assert resolve_log_level("error") == logging.ERROR

    def test_unknown_level_rejected(self):
        with pytest.raises(ValueError):
            resolve_log_level("chatty")


class TestConfigureLogging:
    """Test cases for the rich logging handler."""

    def test_single_handler_installed(self, clean_logger):
        console = Console(file=io.StringIO())
        configure_logging("INFO", console=console)
        configure_logging("DEBUG", console=console)
        handlers = [h for h in clean_logger.handlers if isinstance(h, RichHandler)]
        assert len(handlers) == 1
        assert clean_logger.level == logging.DEBUG
        assert not clean_logger.propagate

    def test_module_records_reach_console(self, clean_logger):
        buffer = io.StringIO()
        configure_logging("INFO", console=Console(file=buffer, width=120))
        logging.getLogger("ringcore_sim.experiments").info("Starting ber_grid")
        assert "Starting ber_grid" in buffer.getvalue()
