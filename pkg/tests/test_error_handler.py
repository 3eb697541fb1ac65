"""
Unit tests for the exception hierarchy and the CLI error handling
"""

import logging

import pytest

from src.error_handler import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    BlowUpError,
    ConfigError,
    ConfigViolation,
    ErrorCategory,
    ErrorContext,
    ErrorHandler,
    ErrorSeverity,
    FluxError,
    InvalidParameterError,
    OutputError,
    SolverError,
)


@pytest.fixture
def handler():
    """Fresh handler sharing the package logger."""
    return ErrorHandler()


class TestExceptions:
    """Test cases for the exception types."""

    @pytest.mark.unit
    def test_violation_text(self):
        assert str(ConfigViolation(4, "ell", "ell must be > 0")) == "line 4: ell: ell must be > 0"
        assert str(ConfigViolation(0, "grid.n", "missing")) == "document: grid.n: missing"

    @pytest.mark.unit
    def test_config_error_collects_violations(self):
        violations = [ConfigViolation(2, "flux", "unknown flux"), ConfigViolation(0, "solver.T", "missing")]
        error = ConfigError(violations)
        assert error.violations == violations
        assert error.details["violations"] == [str(v) for v in violations]
        assert error.category == ErrorCategory.CONFIG
        assert isinstance(error, ValueError)

    @pytest.mark.unit
    def test_argument_errors_are_value_errors(self):
        assert isinstance(InvalidParameterError("bad"), ValueError)
        assert isinstance(FluxError("bad"), ValueError)

    @pytest.mark.unit
    def test_output_error_keeps_path(self):
        error = OutputError("cannot write", "/nowhere/x.csv")
        assert error.path == "/nowhere/x.csv"
        assert error.details["path"] == "/nowhere/x.csv"
        assert str(error) == "cannot write (/nowhere/x.csv)"

    @pytest.mark.unit
    def test_blowup_is_a_warning(self):
        error = BlowUpError("blew up", 1.25)
        assert error.breakdown_time == 1.25
        assert error.severity == ErrorSeverity.WARNING


class TestErrorContext:
    """Test cases for exit code mapping."""

    @pytest.mark.unit
    def test_no_error(self, handler):
        with ErrorContext(handler, "run") as ctx:
            pass
        assert ctx.exit_code == EXIT_OK
        assert handler.error_count == 0

    @pytest.mark.unit
    def test_config_error(self, handler):
        with ErrorContext(handler, "validate") as ctx:
            raise ConfigError([ConfigViolation(1, "flux", "unknown flux")])
        assert ctx.exit_code == EXIT_CONFIG_ERROR
        assert isinstance(handler.last_error, ConfigError)

    @pytest.mark.unit
    @pytest.mark.parametrize("error", [SolverError("boom"), OSError("disk full"), OutputError("x", "y")])
    def test_other_errors(self, handler, error):
        with ErrorContext(handler, "run") as ctx:
            raise error
        assert ctx.exit_code == EXIT_CHECK_FAILED
        assert handler.error_count == 1

    @pytest.mark.unit
    def test_programming_errors_propagate(self, handler):
        with pytest.raises(KeyError):
            with ErrorContext(handler, "run"):
                raise KeyError("missing")
        assert handler.error_count == 0

    @pytest.mark.unit
    def test_reraise(self, handler):
        with pytest.raises(SolverError):
            with ErrorContext(handler, "run", reraise=True):
                raise SolverError("boom")


class TestLogging:
    """Test cases for severity-based logging."""

    @pytest.mark.unit
    def test_logged_with_context_and_category(self, handler, caplog):
        with caplog.at_level(logging.INFO, logger="src"):
            handler.handle_error(FluxError("unknown flux 'x'"), context="run")
        (entry,) = [r for r in caplog.records if "unknown flux" in r.getMessage()]
        assert entry.levelno == logging.ERROR
        assert entry.getMessage() == "[run] [FLUX] unknown flux 'x'"

    @pytest.mark.unit
    def test_severity_maps_to_level(self, handler, caplog):
        with caplog.at_level(logging.INFO, logger="src"):
            handler.handle_error(BlowUpError("slope blow-up", 0.5))
            handler.handle_error(RuntimeError("odd"))
        levels = {r.getMessage(): r.levelno for r in caplog.records}
        assert levels["[NUMERICS] slope blow-up"] == logging.WARNING
        assert levels["[UNKNOWN] RuntimeError: odd"] == logging.ERROR
