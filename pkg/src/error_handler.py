"""
Error Handling and Logging System

Centralized error handling and logging for the regularized conservation law
solver suite. Provides the exception hierarchy shared by every solver module,
consistent logger configuration and the CLI-facing error handler.
"""

import logging
import os
import sys
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

# =============================================================================
# ERROR TYPES
# =============================================================================


class ErrorSeverity(Enum):
    """Error severity levels."""

    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class ErrorCategory(Enum):
    """Error categories for classification."""

    CONFIG = "CONFIG"
    FLUX = "FLUX"
    GRID = "GRID"
    NUMERICS = "NUMERICS"
    TRAJECTORY = "TRAJECTORY"
    RESOURCE = "RESOURCE"
    OUTPUT = "OUTPUT"
    UNKNOWN = "UNKNOWN"


# =============================================================================
# CUSTOM EXCEPTIONS
# =============================================================================


class SolverError(Exception):
    """Base exception for solver-related errors."""

    def __init__(
        self,
        message: str,
        category: ErrorCategory = ErrorCategory.NUMERICS,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.message = message
        self.category = category
        self.severity = severity
        self.details = details or {}
        self.timestamp = datetime.now()


class InvalidParameterError(SolverError, ValueError):
    """Argument outside the admissible range of a pure function."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, ErrorCategory.NUMERICS, ErrorSeverity.ERROR, details)


class FluxError(SolverError, ValueError):
    """Unknown flux or invalid flux parameters."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, ErrorCategory.FLUX, ErrorSeverity.ERROR, details)


class GridError(SolverError, ValueError):
    """Grid invariant violation or grid mismatch."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, ErrorCategory.GRID, ErrorSeverity.ERROR, details)


class NonFiniteStateError(SolverError):
    """A state or right-hand side contains NaN or infinite values."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, ErrorCategory.NUMERICS, ErrorSeverity.CRITICAL, details)


class BlowUpError(SolverError):
    """Slope blow-up of a run without cut-off."""

    def __init__(
        self,
        message: str,
        breakdown_time: float,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message, ErrorCategory.NUMERICS, ErrorSeverity.WARNING, details)
        self.breakdown_time = breakdown_time


class TrajectoryError(SolverError):
    """A trajectory does not satisfy the preconditions of an analysis."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, ErrorCategory.TRAJECTORY, ErrorSeverity.ERROR, details)


class ResourceCapError(SolverError):
    """Requested work exceeds the configured cells x steps budget."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, ErrorCategory.RESOURCE, ErrorSeverity.ERROR, details)


class OutputError(SolverError):
    """Output sink could not be written."""

    def __init__(self, message: str, path: str, details: Optional[Dict[str, Any]] = None):
        details = dict(details or {})
        details["path"] = path
        super().__init__(
            f"{message} ({path})",
            ErrorCategory.OUTPUT,
            ErrorSeverity.ERROR,
            details,
        )
        self.path = path


@dataclass(frozen=True)
class ConfigViolation:
    """One problem found in a configuration document."""

    line: int
    key: str
    message: str

    def __str__(self) -> str:
        where = f"line {self.line}" if self.line > 0 else "document"
        return f"{where}: {self.key}: {self.message}"


class ConfigError(SolverError, ValueError):
    """Configuration document errors, all violations collected."""

    def __init__(self, violations: List[ConfigViolation]):
        self.violations = list(violations)
        summary = "; ".join(str(v) for v in self.violations)
        super().__init__(
            f"invalid configuration: {summary}",
            ErrorCategory.CONFIG,
            ErrorSeverity.ERROR,
            {"violations": [str(v) for v in self.violations]},
        )


# =============================================================================
# LOGGING CONFIGURATION
# =============================================================================

LOGGER_NAME = "src"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_SEVERITY_LEVELS = {
    ErrorSeverity.INFO: logging.INFO,
    ErrorSeverity.WARNING: logging.WARNING,
    ErrorSeverity.ERROR: logging.ERROR,
    ErrorSeverity.CRITICAL: logging.CRITICAL,
}


class SolverLogger:
    """The package logger "src", configured once per process."""

    def __init__(self, log_file: Optional[str] = None, level: Optional[int] = None):
        self.logger = logging.getLogger(LOGGER_NAME)

        if level is None:
            level_name = os.getenv("RSCL_LOG_LEVEL", "INFO").upper()
            level = getattr(logging, level_name, logging.INFO)
        self.logger.setLevel(level)

        if log_file is None:
            log_file = os.getenv("RSCL_LOG_FILE") or None

        # Module loggers (src.helmholtz, ...) propagate here; attach handlers once
        if not self.logger.handlers:
            self._setup_handlers(log_file)

    def _setup_handlers(self, log_file: Optional[str]) -> None:
        formatter = logging.Formatter(LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")
        handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
        if log_file:
            handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
        for handler in handlers:
            handler.setFormatter(formatter)
            self.logger.addHandler(handler)

    def set_level(self, level: int) -> None:
        self.logger.setLevel(level)

    def log(self, level: int, message: str) -> None:
        self.logger.log(level, message)


# =============================================================================
# ERROR HANDLER
# =============================================================================

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2


class ErrorHandler:
    """Logs solver errors by severity and maps them to exit codes."""

    def __init__(self, logger: Optional[SolverLogger] = None):
        self.logger = logger or SolverLogger()
        self.error_count = 0
        self.last_error: Optional[BaseException] = None

    def handle_error(self, error: BaseException, context: Optional[str] = None) -> None:
        """Log an error according to its severity."""
        self.error_count += 1
        self.last_error = error

        if isinstance(error, SolverError):
            category, severity, message = error.category, error.severity, error.message
        else:
            category, severity = ErrorCategory.UNKNOWN, ErrorSeverity.ERROR
            message = f"{type(error).__name__}: {error}"

        log_message = f"[{category.value}] {message}"
        if context:
            log_message = f"[{context}] {log_message}"
        self.logger.log(_SEVERITY_LEVELS[severity], log_message)

    def exit_code_for(self, error: Optional[BaseException]) -> int:
        """0 without error, 2 for configuration errors, 1 otherwise."""
        if error is None:
            return EXIT_OK
        if isinstance(error, ConfigError):
            return EXIT_CONFIG_ERROR
        return EXIT_CHECK_FAILED


# =============================================================================
# CONTEXT MANAGERS
# =============================================================================


class ErrorContext:
    """
    Context manager around one CLI verb: solver errors and OS errors are
    logged and turned into exit_code, anything else propagates.
    """

    def __init__(self, error_handler: ErrorHandler, context: str, reraise: bool = False):
        self.error_handler = error_handler
        self.context = context
        self.reraise = reraise
        self.exit_code = EXIT_OK

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_val is None:
            return False
        if not isinstance(exc_val, (SolverError, OSError)):
            return False
        self.error_handler.handle_error(exc_val, context=self.context)
        self.exit_code = self.error_handler.exit_code_for(exc_val)
        return not self.reraise


# =============================================================================
# GLOBAL INSTANCES
# =============================================================================

logger = SolverLogger()
error_handler = ErrorHandler(logger)


def log_info(message: str) -> None:
    logger.log(logging.INFO, message)


def log_warning(message: str) -> None:
    logger.log(logging.WARNING, message)


def log_debug(message: str) -> None:
    logger.log(logging.DEBUG, message)


def handle_error(error: BaseException, context: Optional[str] = None) -> None:
    """Handle an error with the global handler."""
    error_handler.handle_error(error, context)
