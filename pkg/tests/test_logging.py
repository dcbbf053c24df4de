"""
Tests for logging configuration.
"""

import logging

import pytest
from tqdm.contrib.logging import _TqdmLoggingHandler

from utils.logging import ROOT_LOGGER_NAME, get_logger, progress_logging, setup_logging


@pytest.fixture(autouse=True)
def restore_root():
    """Leave the multiscatter logger as the test found it."""
    root = logging.getLogger(ROOT_LOGGER_NAME)
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


class TestSetupLogging:
    """Tests for setup_logging."""

    def test_levels(self):
        """INFO by default, DEBUG when verbose."""
        assert setup_logging().level == logging.INFO
        assert setup_logging(verbose=True).level == logging.DEBUG

    def test_handlers_are_replaced(self):
        """Repeated setup does not stack console handlers."""
        setup_logging()
        root = setup_logging()
        assert len(root.handlers) == 1

    def test_log_file(self, tmp_path):
        """The file handler receives records in the detailed format."""
        path = tmp_path / "logs" / "run.log"
        root = setup_logging(log_file=path)
        get_logger("simulation.kernel").info("shard %d done", 3)
        for handler in root.handlers:
            handler.flush()
        line = path.read_text().strip()
        assert "multiscatter.simulation.kernel" in line
        assert line.endswith("shard 3 done")


class TestGetLogger:
    """Tests for get_logger."""

    def test_namespacing(self):
        """Module loggers are children of the multiscatter logger."""
        assert get_logger("radio.topology").name == "multiscatter.radio.topology"
        assert get_logger("multiscatter.main").name == "multiscatter.main"
        assert get_logger(ROOT_LOGGER_NAME).name == ROOT_LOGGER_NAME


class TestProgressLogging:
    """Tests for progress_logging."""

    def test_console_goes_through_tqdm(self):
        """Inside the context the console handler is swapped for a tqdm one, then restored."""
        root = setup_logging()
        original = list(root.handlers)
        with progress_logging():
            assert any(isinstance(h, _TqdmLoggingHandler) for h in root.handlers)
        assert root.handlers == original
