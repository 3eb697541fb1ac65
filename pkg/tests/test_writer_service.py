"""
Unit tests for WriterService and PathService

Tests CSV and NDJSON output, byte determinism, cross-format consistency,
I/O error reporting and output directory resolution.
"""

import csv
import json
import os
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from src.diagnostics import CSV_COLUMNS, CheckReport
from src.error_handler import OutputError
from src.grid_field import Grid1D
from src.path_service import PathService
from src.rscl_core import Trajectory, run
from src.writer_service import WriterService, write_outputs

from .conftest import make_config, write_document


@pytest.fixture(scope="module")
def short_run():
    return run(make_config(n=64, T=0.1, name="short"))


class TestWriterService:
    """Test cases for WriterService."""

    @pytest.fixture
    def service(self):
        """Create a fresh service instance for each test."""
        return WriterService()

    @pytest.mark.unit
    def test_empty_trajectory_header_only(self, service, temp_dir, burgers):
        """Test that an empty trajectory gives a header-only CSV."""
        traj = Trajectory(Grid1D(0.0, 1.0, 16), burgers, 1.0, 0.0, 1.0)
        path = service.write_diagnostics_csv(os.path.join(temp_dir, "empty.csv"), traj)
        assert path.read_text(encoding="utf-8") == ",".join(CSV_COLUMNS) + "\n"

    @pytest.mark.integration
    def test_diagnostics_rows(self, service, temp_dir, short_run):
        """Test one CSV row per record with repr floats."""
        path = service.write_diagnostics_csv(os.path.join(temp_dir, "d.csv"), short_run)
        with open(path, encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert len(rows) == len(short_run.records) + 1
        assert float(rows[-1][0]) == short_run.final.t
        assert float(rows[1][1]) == short_run.records[0].energy

    @pytest.mark.integration
    def test_formats_are_consistent(self, temp_dir, short_run):
        """Test that CSV and NDJSON carry the same time grid."""
        output = make_config(name="short", formats=("csv", "ndjson")).output
        csv_path, ndjson_path = write_outputs(temp_dir, short_run, output)
        assert csv_path.name == "short_diagnostics.csv"
        assert ndjson_path.name == "short_snapshots.ndjson"

        with open(csv_path, encoding="utf-8", newline="") as f:
            csv_times = [float(row["t"]) for row in csv.DictReader(f)]
        snapshots = [json.loads(line) for line in ndjson_path.read_text(encoding="utf-8").splitlines()]
        assert [s["t"] for s in snapshots] == csv_times
        assert np.allclose(snapshots[-1]["u"], short_run.final.u.values)
        assert len(snapshots[0]["x"]) == short_run.grid.n

    @pytest.mark.integration
    def test_only_requested_formats(self, service, temp_dir, short_run):
        """Test that formats = csv writes no snapshots."""
        output = make_config(name="only", formats=("csv",)).output
        written = service.write_outputs(Path(temp_dir), short_run, output)
        assert [p.name for p in written] == ["only_diagnostics.csv"]
        assert not (Path(temp_dir) / "only_snapshots.ndjson").exists()

    @pytest.mark.integration
    def test_snapshot_stride_keeps_last(self, service, temp_dir, short_run):
        """Test that a stride keeps every k-th state and the final one."""
        path = service.write_snapshots(os.path.join(temp_dir, "s.ndjson"), short_run, every=4)
        times = [json.loads(line)["t"] for line in path.read_text(encoding="utf-8").splitlines()]
        stored = short_run.times
        expected = [stored[k] for k in range(0, len(stored), 4)]
        if expected[-1] != stored[-1]:
            expected.append(stored[-1])
        assert times == expected

    @pytest.mark.integration
    def test_byte_identical_reruns(self, service, temp_dir):
        """Test that identical configs give identical CSV bytes."""
        config = make_config(n=64, T=0.1, epsilon=0.05)
        first = service.write_diagnostics_csv(os.path.join(temp_dir, "a.csv"), run(config))
        second = service.write_diagnostics_csv(os.path.join(temp_dir, "b.csv"), run(config))
        assert first.read_bytes() == second.read_bytes()

    @pytest.mark.unit
    def test_reports(self, service, temp_dir):
        """Test report objects and plain dicts side by side."""
        reports = [CheckReport("oleinik", True, 0.9, 1.05, {"t_worst": 0.5}), {"verdict": "decreasing"}]
        path = service.write_reports(os.path.join(temp_dir, "r.ndjson"), reports)
        lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
        assert lines[0] == {"check": "oleinik", "passed": True, "value": 0.9, "threshold": 1.05, "t_worst": 0.5}
        assert lines[1] == {"verdict": "decreasing"}

    @pytest.mark.unit
    def test_missing_directory(self, service, temp_dir, short_run):
        """Test that I/O failures carry the path."""
        target = os.path.join(temp_dir, "missing", "d.csv")
        with pytest.raises(OutputError) as info:
            service.write_diagnostics_csv(target, short_run)
        assert info.value.path == target
        assert target in str(info.value)

    @pytest.mark.unit
    def test_unserializable_report(self, service, temp_dir):
        """Test that non-JSON values surface as OutputError."""
        with pytest.raises(OutputError):
            service.write_ndjson(os.path.join(temp_dir, "bad.ndjson"), [{"value": object()}])


class TestPathService:
    """Test cases for PathService."""

    @pytest.fixture
    def service(self):
        return PathService()

    @pytest.mark.unit
    def test_override_wins(self, service, temp_dir, monkeypatch):
        """Test precedence: command line, environment, scenario."""
        config = make_config(directory="from_config")
        monkeypatch.setenv("RSCL_OUTPUT_DIR", temp_dir)
        with patch("src.path_service.get_runtime_config") as runtime:
            runtime.return_value.output_dir = temp_dir
            assert service.resolve_output_dir(config, "cli_dir") == Path("cli_dir").resolve()
            assert service.resolve_output_dir(config) == Path(temp_dir).resolve()
        monkeypatch.delenv("RSCL_OUTPUT_DIR")
        assert service.resolve_output_dir(config) == Path("from_config").resolve()

    @pytest.mark.unit
    def test_ensure_directory(self, service, temp_dir):
        """Test nested directory creation."""
        target = Path(temp_dir) / "a" / "b"
        assert service.ensure_directory(target).is_dir()

    @pytest.mark.unit
    def test_ensure_directory_failure(self, service, temp_dir):
        """Test that a file in the way raises OutputError."""
        blocker = Path(write_document(temp_dir, "x", "blocker"))
        with pytest.raises(OutputError):
            service.ensure_directory(blocker / "sub")

    @pytest.mark.unit
    def test_validate_scenario_path(self, service, temp_dir, minimal_document):
        """Test scenario path checks."""
        path = write_document(temp_dir, minimal_document)
        assert service.validate_scenario_path(path) == (True, "")
        assert service.validate_scenario_path("")[0] is False
        assert "does not exist" in service.validate_scenario_path(os.path.join(temp_dir, "nope.cfg"))[1]
        assert "not a file" in service.validate_scenario_path(temp_dir)[1]
