"""
Writer Service for Result Files

This module writes solver results in the supported formats:
- CSV diagnostics time series with a fixed header
- NDJSON snapshots, one {"t", "x", "u"} object per line
- NDJSON check and sweep reports

Floats are written with repr so identical runs give identical bytes.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

from .config import OutputSection
from .diagnostics import CSV_COLUMNS, csv_rows
from .error_handler import OutputError, log_info
from .rscl_core import Trajectory

PathLike = Union[str, Path]


def _number(value: float) -> str:
    return repr(float(value))


class WriterService:
    """Service for writing trajectories and reports to disk."""

    def write_diagnostics_csv(self, file_path: PathLike, trajectory: Trajectory) -> Path:
        """Diagnostics time series, one row per record."""
        path = Path(file_path)
        try:
            with open(path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                for row in csv_rows(trajectory.records):
                    writer.writerow([_number(v) for v in row])
        except OSError as e:
            raise OutputError(f"cannot write diagnostics: {e}", str(path)) from e
        return path

    def write_snapshots(self, file_path: PathLike, trajectory: Trajectory, every: int = 1) -> Path:
        """Every `every`-th stored state plus the last one as NDJSON lines."""
        path = Path(file_path)
        states = trajectory.states
        picked = [k for k in range(len(states)) if k % every == 0]
        if states and picked[-1] != len(states) - 1:
            picked.append(len(states) - 1)
        x = trajectory.grid.x.tolist()
        lines = (
            {"t": states[k].t, "x": x, "u": states[k].u.values.tolist()} for k in picked
        )
        return self.write_ndjson(path, lines)

    def write_ndjson(self, file_path: PathLike, objects: Iterable[Dict[str, Any]]) -> Path:
        """One JSON object per line."""
        path = Path(file_path)
        try:
            with open(path, "w", encoding="utf-8") as f:
                for obj in objects:
                    f.write(json.dumps(obj))
                    f.write("\n")
        except (OSError, TypeError) as e:
            raise OutputError(f"cannot write {path.name}: {e}", str(path)) from e
        return path

    def write_reports(self, file_path: PathLike, reports: Sequence[Any]) -> Path:
        """Reports given as dicts or objects with to_dict()."""
        return self.write_ndjson(
            file_path,
            (r if isinstance(r, dict) else r.to_dict() for r in reports),
        )

    def write_outputs(self, directory: Path, trajectory: Trajectory, output: OutputSection) -> List[Path]:
        """
        Write the formats requested by the [output] section.

        Args:
            directory: Existing output directory
            trajectory: Finished run
            output: Naming, formats and snapshot stride

        Returns:
            Paths written, in format order
        """
        written = []
        if "csv" in output.formats:
            written.append(
                self.write_diagnostics_csv(directory / f"{output.name}_diagnostics.csv", trajectory),
            )
        if "ndjson" in output.formats:
            written.append(
                self.write_snapshots(
                    directory / f"{output.name}_snapshots.ndjson",
                    trajectory,
                    output.snapshot_every,
                ),
            )
        log_info(f"{output.name}: wrote {', '.join(p.name for p in written)}")
        return written


def write_outputs(directory: PathLike, trajectory: Trajectory, output: OutputSection) -> List[Path]:
    """Write the requested formats of one run into an existing directory."""
    return WriterService().write_outputs(Path(directory), trajectory, output)
