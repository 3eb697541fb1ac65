"""
Path Service for Output Path Management

This module handles all path-related operations including:
- Output directory resolution (command line, environment, scenario)
- Directory creation
- Scenario file existence and readability checks
"""

import os
from pathlib import Path
from typing import Optional, Tuple

from .config import ScenarioConfig, get_runtime_config
from .error_handler import OutputError, log_debug


class PathService:
    """Service for resolving and preparing output paths."""

    def resolve_output_dir(self, config: ScenarioConfig, override: Optional[str] = None) -> Path:
        """
        Pick the output directory.

        Args:
            config: Scenario whose [output] dir is the fallback
            override: Directory given on the command line

        Returns:
            Absolute directory path; an explicit override wins, then
            RSCL_OUTPUT_DIR, then the scenario setting
        """
        if override:
            chosen = override
        elif os.getenv("RSCL_OUTPUT_DIR"):
            chosen = get_runtime_config().output_dir
        else:
            chosen = config.output.directory
        return Path(chosen).expanduser().resolve()

    def ensure_directory(self, directory: Path) -> Path:
        """Create the directory (and parents); OutputError when that fails."""
        try:
            directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise OutputError(f"cannot create output directory: {e}", str(directory)) from e
        log_debug(f"output directory {directory}")
        return directory

    def validate_scenario_path(self, path: str) -> Tuple[bool, str]:
        """
        Validate a scenario file path.

        Args:
            path: Path to validate

        Returns:
            Tuple of (is_valid, error_message)
        """
        if not path:
            return False, "Path is empty"
        candidate = Path(path)
        if not candidate.exists():
            return False, f"File does not exist: {path}"
        if not candidate.is_file():
            return False, f"Path is not a file: {path}"
        if not os.access(candidate, os.R_OK):
            return False, f"File is not readable: {path}"
        return True, ""
