"""
Performance Monitoring

Wall-clock and resident-memory accounting for solver runs, worker sizing and
the cells x steps resource cap.
"""

import time
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import psutil

from .config import get_runtime_config
from .error_handler import ResourceCapError, log_debug, log_warning

# =============================================================================
# PERFORMANCE METRICS
# =============================================================================


@dataclass
class PerformanceMetrics:
    """Performance metrics data structure."""

    wall_time_s: float = 0.0
    rss_start_mb: float = 0.0
    rss_end_mb: float = 0.0
    timestamp: float = field(default_factory=time.time)

    @property
    def rss_delta_mb(self) -> float:
        return self.rss_end_mb - self.rss_start_mb

    def to_dict(self) -> Dict[str, Any]:
        return {
            "wall_time_s": self.wall_time_s,
            "rss_start_mb": self.rss_start_mb,
            "rss_end_mb": self.rss_end_mb,
        }


def _rss_mb() -> float:
    return psutil.Process().memory_info().rss / 1024 / 1024


class RunTimer:
    """Context manager measuring one run."""

    def __init__(self, label: str):
        self.label = label
        self.metrics = PerformanceMetrics()
        self._start = 0.0

    def __enter__(self) -> "RunTimer":
        self.metrics.rss_start_mb = _rss_mb()
        self._start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.metrics.wall_time_s = time.perf_counter() - self._start
        self.metrics.rss_end_mb = _rss_mb()
        log_debug(
            f"{self.label}: {self.metrics.wall_time_s:.3f}s, "
            f"rss {self.metrics.rss_end_mb:.1f}MB ({self.metrics.rss_delta_mb:+.1f}MB)",
        )
        return False


# =============================================================================
# RESOURCE LIMITS
# =============================================================================


def default_worker_count(requested: Optional[int] = None) -> int:
    """Worker cap for sweeps: explicit request, else runtime config, else CPUs."""
    if requested is not None and requested > 0:
        return requested
    workers = get_runtime_config().workers
    if workers and workers > 0:
        return workers
    return psutil.cpu_count(logical=True) or 1


def check_resource_cap(cells: int, steps: float, label: str = "run") -> float:
    """Raise ResourceCapError when cells x steps exceeds the configured cap."""
    return check_work_cap(float(cells) * float(steps), label, {"cells": cells, "steps": steps})


def check_work_cap(work: float, label: str, details: Optional[Dict[str, Any]] = None) -> float:
    """Same cap applied to a precomputed cell-step total (a whole sweep)."""
    cap = get_runtime_config().max_cell_steps
    if work > cap:
        raise ResourceCapError(
            f"{label} needs about {work:.3g} cell-steps, cap is {cap:.3g}",
            {**(details or {}), "work": work, "cap": cap},
        )
    if work > 0.5 * cap:
        log_warning(f"{label} uses more than half of the resource cap ({work:.3g})")
    return work
