"""
Unit tests for scenario dataclasses and the runtime configuration manager
"""

import pytest

from src.config import ConfigManager, GridSection

from .conftest import make_config


class TestScenarioConfig:
    """Test cases for ScenarioConfig helpers."""

    @pytest.mark.unit
    def test_with_overrides(self, smooth_config):
        changed = smooth_config.with_overrides(ell=0.1, n=512.0, name="fine", beta=0.3, T=2.0)
        assert changed.solver.ell == 0.1
        assert changed.solver.T == 2.0
        assert changed.grid.n == 512
        assert isinstance(changed.grid.n, int)
        assert changed.output.name == "fine"
        assert changed.flux.beta == 0.3
        assert smooth_config.solver.ell == 0.5
        assert changed.solver.epsilon == smooth_config.solver.epsilon

    @pytest.mark.unit
    def test_ic_params_are_merged(self):
        config = make_config(ic="gaussian", ic_params={"amplitude": 2.0, "sigma": 0.5})
        changed = config.with_overrides(ic_params={"sigma": 0.25})
        assert changed.ic.params == {"amplitude": 2.0, "sigma": 0.25}
        assert config.ic.params == {"amplitude": 2.0, "sigma": 0.5}

    @pytest.mark.unit
    def test_no_overrides_is_equal(self, smooth_config):
        assert smooth_config.with_overrides() == smooth_config

    @pytest.mark.unit
    def test_measurement_window(self):
        assert GridSection(-8.0, 8.0, 64).measurement_window() == (-4.0, 4.0)
        assert GridSection(0.0, 4.0, 64).measurement_window() == (1.0, 3.0)
        assert GridSection(-8.0, 8.0, 64, (-1.0, 2.0)).measurement_window() == (-1.0, 2.0)
        assert GridSection(-8.0, 8.0, 64).length == 16.0


class TestConfigManager:
    """Test cases for environment overrides."""

    @pytest.mark.unit
    def test_defaults(self, monkeypatch):
        for name in ("SOLVER_WORKERS", "RSCL_MAX_CELL_STEPS", "RSCL_LOG_LEVEL", "RSCL_LOG_FILE", "RSCL_OUTPUT_DIR"):
            monkeypatch.delenv(name, raising=False)
        manager = ConfigManager()
        assert manager.runtime.workers >= 1
        assert manager.runtime.max_cell_steps == 2e10
        assert manager.runtime.log_file is None
        assert manager.validate_config()["valid"]

    @pytest.mark.unit
    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("SOLVER_WORKERS", "3")
        monkeypatch.setenv("RSCL_MAX_CELL_STEPS", "1e6")
        monkeypatch.setenv("RSCL_LOG_LEVEL", "debug")
        monkeypatch.setenv("RSCL_OUTPUT_DIR", "elsewhere")
        manager = ConfigManager()
        assert manager.runtime.workers == 3
        assert manager.runtime.max_cell_steps == 1e6
        assert manager.runtime.log_level == "DEBUG"
        assert manager.to_dict()["runtime"]["output_dir"] == "elsewhere"

    @pytest.mark.unit
    def test_validation(self, monkeypatch):
        monkeypatch.setenv("RSCL_LOG_LEVEL", "chatty")
        manager = ConfigManager()
        manager.runtime.workers = 0
        manager.runtime.max_cell_steps = -1.0
        result = manager.validate_config()
        assert not result["valid"]
        assert len(result["errors"]) == 2
        assert len(result["warnings"]) == 1
