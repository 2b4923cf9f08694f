"""Tests for core modules."""

import json
import logging
import threading
from unittest.mock import patch

import pytest

from lindblad_lab.core.config import settings
from lindblad_lab.core.context import get_logging_context, run_context
from lindblad_lab.core.exceptions import (
    ConfigValidationError,
    DimensionError,
    DomainError,
    FitError,
    InvariantViolationError,
    LabException,
    NoFixedPointError,
    ParameterError,
    ResolutionError,
)
from lindblad_lab.core.logging_config import ContextFilter, JSONFormatter, close_file_logging, setup_logging
from lindblad_lab.core.workers import run_ordered


class TestSettings:
    """Tests for settings configuration."""

    def test_project_name_is_set(self):
        """Test project name is configured."""
        assert settings.PROJECT_NAME == "lindblad_lab"

    def test_debug_mode_default(self):
        """Test debug mode has default value."""
        assert isinstance(settings.DEBUG, bool)

    def test_worker_pool_size_positive(self):
        """Test the worker pool has at least one worker."""
        assert settings.MAX_WORKERS >= 1


class TestExceptions:
    """Tests for custom exceptions."""

    def test_lab_exception(self):
        """Test LabException initialization."""
        error = LabException(message="Test error", code="TEST_ERROR", details={"x": 1})
        assert error.message == "Test error"
        assert error.code == "TEST_ERROR"
        assert error.details == {"x": 1}
        assert str(error) == "Test error"

    def test_defaults_come_from_class(self):
        """Test class-level message and code are used when omitted."""
        error = DomainError()
        assert error.message == "Input outside the operation's domain"
        assert error.code == "DOMAIN_ERROR"
        assert error.details == {}

    @pytest.mark.parametrize(
        ("exc", "exit_code"),
        [
            (DimensionError, 2),
            (ParameterError, 2),
            (DomainError, 2),
            (ResolutionError, 2),
            (ConfigValidationError, 2),
            (FitError, 1),
            (NoFixedPointError, 3),
            (InvariantViolationError, 3),
        ],
    )
    def test_exit_codes(self, exc, exit_code):
        """Test every error maps onto its CLI exit status."""
        assert exc.exit_code == exit_code
        assert issubclass(exc, LabException)

    def test_repr(self):
        """Test repr shows class, message and code."""
        assert repr(FitError("few")) == "FitError(message='few', code='FIT_ERROR')"


class TestRunContext:
    """Tests for the run-scoped logging context."""

    def test_context_bound_inside_block(self):
        """Test run_id and scenario are visible inside the block and reset after."""
        with run_context("prepare-ground", run_id="abc") as rid:
            assert rid == "abc"
            assert get_logging_context() == {"run_id": "abc", "scenario": "prepare-ground"}
        assert get_logging_context() == {"run_id": None, "scenario": None}

    def test_generated_run_id(self):
        """Test a run id is generated when none is given."""
        with run_context("mixing-scan") as rid:
            assert len(rid) == 12

    def test_context_filter_adds_fields(self):
        """Test ContextFilter copies the context onto records."""
        record = logging.LogRecord("x", logging.INFO, __file__, 1, "msg", None, None)
        with run_context("quasilocality", run_id="r1"):
            ContextFilter().filter(record)
        assert record.run_id == "r1"
        assert record.scenario == "quasilocality"


class TestLogging:
    """Tests for structured logging."""

    def test_json_formatter_includes_extras(self):
        """Test JSON records carry message, level and extra fields."""
        record = logging.LogRecord("lab", logging.WARNING, __file__, 7, "hello %s", ("world",), None)
        record.residual = 1e-3
        data = json.loads(JSONFormatter().format(record))
        assert data["message"] == "hello world"
        assert data["level"] == "WARNING"
        assert data["residual"] == 1e-3
        assert data["location"]["line"] == 7

    def test_file_logging_writes_json(self, tmp_path):
        """Test setup_logging writes JSON lines to the run log."""
        log_file = tmp_path / "run.log"
        setup_logging(log_file=log_file)
        try:
            with run_context("error-order", run_id="file-test"):
                logging.getLogger("lindblad_lab.test").info("written", extra={"dt": 0.5})
        finally:
            close_file_logging()
        lines = [json.loads(line) for line in log_file.read_text().splitlines()]
        entry = next(line for line in lines if line["message"] == "written")
        assert entry["run_id"] == "file-test"
        assert entry["dt"] == 0.5


class TestLogfireSetup:
    """Tests for Logfire setup."""

    @patch("lindblad_lab.core.logfire_setup.logfire")
    def test_setup_logfire_configures(self, mock_logfire):
        """Test setup_logfire calls configure without forcing export."""
        from lindblad_lab.core.logfire_setup import setup_logfire

        setup_logfire()
        mock_logfire.configure.assert_called_once()
        assert mock_logfire.configure.call_args.kwargs["send_to_logfire"] == "if-token-present"

    @patch("lindblad_lab.core.logfire_setup.logfire")
    def test_service_name_defaults_to_project(self, mock_logfire):
        """Test the service name falls back to the project name and an explicit one wins."""
        from lindblad_lab.core.logfire_setup import setup_logfire

        with patch.object(settings, "LOGFIRE_SERVICE_NAME", None):
            setup_logfire()
        assert mock_logfire.configure.call_args.kwargs["service_name"] == settings.PROJECT_NAME
        with patch.object(settings, "LOGFIRE_SERVICE_NAME", "lab-batch"):
            setup_logfire()
        assert mock_logfire.configure.call_args.kwargs["service_name"] == "lab-batch"


class TestWorkers:
    """Tests for the ordered worker pool."""

    def test_preserves_order(self):
        """Test results come back in input order regardless of completion order."""
        assert run_ordered(lambda x: x * x, list(range(20)), max_workers=4) == [x * x for x in range(20)]

    def test_inline_with_one_worker(self):
        """Test a single worker runs on the calling thread."""
        caller = threading.get_ident()
        threads = run_ordered(lambda _: threading.get_ident(), [1, 2, 3], max_workers=1)
        assert threads == [caller] * 3

    def test_context_reaches_workers(self):
        """Test run_id propagates into pool threads."""
        with run_context("mixing-scan", run_id="pool"):
            seen = run_ordered(lambda _: get_logging_context()["run_id"], [1, 2, 3], max_workers=3)
        assert seen == ["pool"] * 3

    def test_exception_propagates(self):
        """Test a failing cell raises in the caller."""

        def boom(x: int) -> int:
            raise FitError("cell failed")

        with pytest.raises(FitError):
            run_ordered(boom, [1, 2], max_workers=2)
