"""
Pytest configuration and common fixtures for the test suite.

This module provides shared fixtures, scenario factories and marker
registration for all tests of the solver suite.
"""

import os
import sys
import tempfile

import numpy as np
import pytest

# Repository root on the path so that `src` imports as a package
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from src.config import (  # noqa: E402
    FluxSection,
    GridSection,
    ICSection,
    OutputSection,
    ScenarioConfig,
    SolverSection,
)
from src.fluxes import builtin_flux  # noqa: E402
from src.grid_field import Grid1D  # noqa: E402


def make_config(
    flux="burgers",
    beta=None,
    ic="sine",
    ic_params=None,
    x_min=0.0,
    x_max=2.0 * np.pi,
    n=128,
    window=None,
    ell=0.5,
    epsilon=0.0,
    T=0.5,
    cfl=0.4,
    record_every=1,
    reconstruction="minmod",
    name="test",
    directory="out",
    formats=("csv", "ndjson"),
    snapshot_every=1,
    mollify=False,
) -> ScenarioConfig:
    """Build a ScenarioConfig from flat keyword arguments."""
    return ScenarioConfig(
        flux=FluxSection(name=flux, beta=beta),
        ic=ICSection(name=ic, params=dict(ic_params or {}), mollify=mollify),
        grid=GridSection(x_min=x_min, x_max=x_max, n=n, window=window),
        solver=SolverSection(
            ell=ell,
            epsilon=epsilon,
            T=T,
            cfl=cfl,
            record_every=record_every,
            reconstruction=reconstruction,
        ),
        output=OutputSection(
            name=name,
            directory=directory,
            formats=tuple(formats),
            snapshot_every=snapshot_every,
        ),
    )


MINIMAL_DOCUMENT = """\
# smallest valid scenario
[flux]
flux = burgers

[ic]
ic = gaussian

[grid]
x_min = -20
x_max = 20
n = 64

[solver]
ell = 0.5
T = 0.25
"""


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield temp_dir


@pytest.fixture
def periodic_grid():
    """[0, 2 pi) with 256 cells."""
    return Grid1D(0.0, 2.0 * np.pi, 256)


@pytest.fixture
def burgers():
    return builtin_flux("burgers")


@pytest.fixture
def cosine():
    return builtin_flux("cosine", (0.5,))


@pytest.fixture
def smooth_config():
    """Short smooth Burgers run with the cut-off active."""
    return make_config(epsilon=0.1)


@pytest.fixture
def minimal_document():
    return MINIMAL_DOCUMENT


@pytest.fixture
def rng():
    """Seeded generator for bulk random sampling."""
    return np.random.default_rng(20240611)


def write_document(directory: str, text: str, name: str = "scenario.cfg") -> str:
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return path


# Test markers for different test types
def pytest_configure(config):
    """Configure custom markers."""
    config.addinivalue_line(
        "markers", "unit: mark test as a unit test",
    )
    config.addinivalue_line(
        "markers", "integration: mark test as an integration test",
    )
    config.addinivalue_line(
        "markers", "slow: mark test as slow running",
    )
    config.addinivalue_line(
        "markers", "expensive: mark test as excluded from the quick suite",
    )
