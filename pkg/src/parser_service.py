"""
Parser Service for Scenario Documents

Parses the line-oriented scenario format

    [section]
    key = value            # comment
    flux = cosine; beta = 0.5

into a validated ScenarioConfig, collecting every violation with its line
number, and renders a ScenarioConfig back into canonical text.
"""

import logging
import math
import re
from typing import Dict, List, Optional, Tuple

import numpy as np

from .config import (
    FLUX_NAMES,
    IC_NAMES,
    OUTPUT_FORMATS,
    RECONSTRUCTIONS,
    FluxSection,
    GridSection,
    ICSection,
    OutputSection,
    ScenarioConfig,
    SolverSection,
)
from .error_handler import ConfigError, ConfigViolation, ResourceCapError, SolverError
from .initial_conditions import IC_PARAMETERS, initial_state
from .performance import check_resource_cap

logger = logging.getLogger(__name__)

SECTIONS = ("flux", "ic", "grid", "solver", "output")
SECTION_KEYS = {
    "flux": ("flux", "beta"),
    "ic": ("ic", "mollify"),  # plus the parameters of the chosen profile
    "grid": ("x_min", "x_max", "n", "window"),
    "solver": ("ell", "epsilon", "T", "cfl", "record_every", "reconstruction"),
    "output": ("name", "dir", "formats", "snapshot_every"),
}
REQUIRED_KEYS = {
    "flux": ("flux",),
    "ic": ("ic",),
    "grid": ("x_min", "x_max", "n"),
    "solver": ("ell", "T"),
}
_SECTION_RE = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_NAME_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")
_TRUE = ("true", "yes", "on", "1")
_FALSE = ("false", "no", "off", "0")

RawEntry = Tuple[str, int]


class ConfigParserService:
    """Service for parsing and rendering scenario documents."""

    def __init__(self):
        self.violations: List[ConfigViolation] = []
        self.warnings: List[str] = []

    # -------------------------------------------------------------------------
    # tokenizing
    # -------------------------------------------------------------------------

    def _tokenize(self, text: str) -> Dict[str, Dict[str, RawEntry]]:
        raw: Dict[str, Dict[str, RawEntry]] = {}
        section: Optional[str] = None

        for number, line in enumerate(text.splitlines(), start=1):
            content = line.split("#", 1)[0].strip()
            if not content:
                continue

            header = _SECTION_RE.match(content)
            if header:
                section = header.group(1).lower()
                if section not in SECTIONS:
                    self._violate(number, section, "unknown section")
                    section = None
                    continue
                raw.setdefault(section, {})
                continue

            for pair in content.split(";"):
                pair = pair.strip()
                if not pair:
                    continue
                if "=" not in pair:
                    self._violate(number, pair, "expected 'key = value'")
                    continue
                key, value = (part.strip() for part in pair.split("=", 1))
                if section is None:
                    self._violate(number, key, "key outside of a known section")
                    continue
                if key in raw[section]:
                    self._violate(number, key, f"duplicate key (first on line {raw[section][key][1]})")
                    continue
                raw[section][key] = (value, number)
        return raw

    def _violate(self, line: int, key: str, message: str) -> None:
        self.violations.append(ConfigViolation(line, key, message))

    # -------------------------------------------------------------------------
    # typed readers
    # -------------------------------------------------------------------------

    def _float(self, entries: Dict[str, RawEntry], key: str, default=None) -> Optional[float]:
        if key not in entries:
            return default
        value, line = entries[key]
        try:
            number = float(value)
        except ValueError:
            self._violate(line, key, f"expected a number, got '{value}'")
            return default
        if not math.isfinite(number):
            self._violate(line, key, "must be finite")
            return default
        return number

    def _int(self, entries: Dict[str, RawEntry], key: str, default=None) -> Optional[int]:
        number = self._float(entries, key, None)
        if number is None:
            return default
        if number != int(number):
            self._violate(entries[key][1], key, f"expected an integer, got {entries[key][0]}")
            return default
        return int(number)

    def _bool(self, entries: Dict[str, RawEntry], key: str, default: bool) -> bool:
        if key not in entries:
            return default
        value, line = entries[key]
        if value.lower() in _TRUE:
            return True
        if value.lower() in _FALSE:
            return False
        self._violate(line, key, f"expected true or false, got '{value}'")
        return default

    def _floats(self, entries: Dict[str, RawEntry], key: str) -> Optional[List[float]]:
        if key not in entries:
            return None
        value, line = entries[key]
        try:
            return [float(part) for part in value.split(",") if part.strip()]
        except ValueError:
            self._violate(line, key, f"expected comma-separated numbers, got '{value}'")
            return None

    def _check(self, entries: Dict[str, RawEntry], key: str, ok: bool, message: str) -> None:
        if not ok:
            self._violate(entries[key][1] if key in entries else 0, key, message)

    # -------------------------------------------------------------------------
    # sections
    # -------------------------------------------------------------------------

    def _flux(self, entries: Dict[str, RawEntry]) -> FluxSection:
        name = entries.get("flux", ("burgers", 0))[0].lower()
        self._check(entries, "flux", name in FLUX_NAMES, f"unknown flux '{name}'")
        beta = self._float(entries, "beta")
        if name == "cosine":
            if beta is None:
                self._check(entries, "beta", False, "cosine flux requires beta")
            else:
                self._check(entries, "beta", 0.0 < beta < 1.0, "beta must satisfy 0 < beta < 1")
        elif beta is not None:
            self._check(entries, "beta", False, f"{name} flux takes no beta")
            beta = None
        return FluxSection(name=name, beta=beta)

    def _ic(self, entries: Dict[str, RawEntry]) -> ICSection:
        name = entries.get("ic", ("gaussian", 0))[0].lower()
        self._check(entries, "ic", name in IC_NAMES, f"unknown initial condition '{name}'")
        mollify = self._bool(entries, "mollify", False)
        params: Dict[str, float] = {}
        allowed = IC_PARAMETERS.get(name, {})
        for key in entries:
            if key in SECTION_KEYS["ic"]:
                continue
            if key not in allowed:
                self._violate(entries[key][1], key, f"unknown key for initial condition '{name}'")
                continue
            value = self._float(entries, key)
            if value is not None:
                params[key] = value
        return ICSection(name=name, params=params, mollify=mollify)

    def _grid(self, entries: Dict[str, RawEntry]) -> GridSection:
        x_min = self._float(entries, "x_min", GridSection.x_min)
        x_max = self._float(entries, "x_max", GridSection.x_max)
        n = self._int(entries, "n", GridSection.n)
        self._check(entries, "x_max", x_max > x_min, "x_max must be greater than x_min")
        self._check(entries, "n", n >= 8, "n must be at least 8")

        window = None
        bounds = self._floats(entries, "window")
        if bounds is not None:
            if len(bounds) != 2 or not bounds[0] < bounds[1]:
                self._check(entries, "window", False, "window must be 'a, b' with a < b")
            elif bounds[0] < x_min or bounds[1] > x_max:
                self._check(entries, "window", False, "window must lie inside [x_min, x_max]")
            else:
                window = (bounds[0], bounds[1])
        return GridSection(x_min=x_min, x_max=x_max, n=n, window=window)

    def _solver(self, entries: Dict[str, RawEntry]) -> SolverSection:
        defaults = SolverSection()
        ell = self._float(entries, "ell", defaults.ell)
        epsilon = self._float(entries, "epsilon", defaults.epsilon)
        T = self._float(entries, "T", defaults.T)
        cfl = self._float(entries, "cfl", defaults.cfl)
        record_every = self._int(entries, "record_every", defaults.record_every)
        reconstruction = entries.get("reconstruction", (defaults.reconstruction, 0))[0].lower()

        self._check(entries, "ell", ell > 0, "ell must be > 0")
        self._check(entries, "epsilon", epsilon >= 0, "epsilon must be >= 0")
        self._check(entries, "T", T > 0, "T must be > 0")
        self._check(entries, "cfl", 0 < cfl <= 1, "cfl must satisfy 0 < cfl <= 1")
        self._check(entries, "record_every", record_every >= 1, "record_every must be >= 1")
        self._check(
            entries,
            "reconstruction",
            reconstruction in RECONSTRUCTIONS,
            f"reconstruction must be one of {', '.join(RECONSTRUCTIONS)}",
        )
        if epsilon >= 1:
            self.warnings.append(f"epsilon = {epsilon:g} >= 1; values below 1 are recommended")
        return SolverSection(
            ell=ell,
            epsilon=epsilon,
            T=T,
            cfl=cfl,
            record_every=record_every,
            reconstruction=reconstruction,
        )

    def _output(self, entries: Dict[str, RawEntry]) -> OutputSection:
        defaults = OutputSection()
        name = entries.get("name", (defaults.name, 0))[0]
        self._check(entries, "name", bool(_NAME_RE.match(name)), "name may use letters, digits, '_', '-', '.'")
        directory = entries.get("dir", (defaults.directory, 0))[0]
        self._check(entries, "dir", bool(directory), "dir must not be empty")

        formats = defaults.formats
        if "formats" in entries:
            formats = tuple(
                part.strip().lower() for part in entries["formats"][0].split(",") if part.strip()
            )
            unknown = [f for f in formats if f not in OUTPUT_FORMATS]
            self._check(entries, "formats", bool(formats) and not unknown,
                        f"formats must be a non-empty subset of {', '.join(OUTPUT_FORMATS)}")
        snapshot_every = self._int(entries, "snapshot_every", defaults.snapshot_every)
        self._check(entries, "snapshot_every", snapshot_every >= 1, "snapshot_every must be >= 1")
        return OutputSection(
            name=name,
            directory=directory,
            formats=formats,
            snapshot_every=snapshot_every,
        )

    # -------------------------------------------------------------------------
    # entry points
    # -------------------------------------------------------------------------

    def parse(self, text: str) -> ScenarioConfig:
        """Parse and validate; raises ConfigError listing every violation."""
        self.violations = []
        self.warnings = []
        raw = self._tokenize(text)

        for section, keys in REQUIRED_KEYS.items():
            for key in keys:
                if key not in raw.get(section, {}):
                    self._violate(0, f"{section}.{key}", "missing required key")
        for section in ("flux", "grid", "solver", "output"):
            for key, (_, line) in raw.get(section, {}).items():
                if key not in SECTION_KEYS[section]:
                    self._violate(line, key, f"unknown key in [{section}]")

        config = ScenarioConfig(
            flux=self._flux(raw.get("flux", {})),
            ic=self._ic(raw.get("ic", {})),
            grid=self._grid(raw.get("grid", {})),
            solver=self._solver(raw.get("solver", {})),
            output=self._output(raw.get("output", {})),
        )
        if not self.violations:
            self._domain_checks(config, raw)
        if self.violations:
            self.violations.sort(key=lambda v: (v.line, v.key))
            raise ConfigError(self.violations)

        for warning in self.warnings:
            logger.warning(warning)
        return config

    def _domain_checks(self, config: ScenarioConfig, raw: Dict[str, Dict[str, RawEntry]]) -> None:
        """
        Resource cap first, from the fewest steps any run of this size takes
        (dt <= cfl dx), then build the initial data once: parameter errors and
        the domain-width rule.
        """
        grid, solver = config.grid, config.solver
        try:
            check_resource_cap(
                grid.n,
                math.ceil(solver.T * grid.n / (solver.cfl * grid.length)),
                config.output.name,
            )
        except ResourceCapError as error:
            self._violate(raw.get("grid", {}).get("n", ("", 0))[1], "n", error.message)
            return
        try:
            _, model, u0 = initial_state(config)
        except SolverError as error:
            line = raw.get("ic", {}).get("ic", ("", 0))[1]
            self._violate(line, "ic", error.message)
            return
        speed = float(np.max(np.abs(model.f1(u0.values))))
        self.warnings.extend(domain_warnings(config, speed))

    def render(self, config: ScenarioConfig) -> str:
        """Canonical document that parses back to an equal config."""
        lines = ["[flux]", f"flux = {config.flux.name}"]
        if config.flux.beta is not None:
            lines.append(f"beta = {config.flux.beta!r}")

        lines += ["", "[ic]", f"ic = {config.ic.name}",
                  f"mollify = {'true' if config.ic.mollify else 'false'}"]
        for key in sorted(config.ic.params):
            lines.append(f"{key} = {float(config.ic.params[key])!r}")

        grid = config.grid
        lines += ["", "[grid]", f"x_min = {float(grid.x_min)!r}",
                  f"x_max = {float(grid.x_max)!r}", f"n = {grid.n}"]
        if grid.window is not None:
            lines.append(f"window = {float(grid.window[0])!r}, {float(grid.window[1])!r}")

        solver = config.solver
        lines += [
            "",
            "[solver]",
            f"ell = {float(solver.ell)!r}",
            f"epsilon = {float(solver.epsilon)!r}",
            f"T = {float(solver.T)!r}",
            f"cfl = {float(solver.cfl)!r}",
            f"record_every = {solver.record_every}",
            f"reconstruction = {solver.reconstruction}",
        ]

        output = config.output
        lines += [
            "",
            "[output]",
            f"name = {output.name}",
            f"dir = {output.directory}",
            f"formats = {', '.join(output.formats)}",
            f"snapshot_every = {output.snapshot_every}",
        ]
        return "\n".join(lines) + "\n"


def domain_warnings(config: ScenarioConfig, max_speed: float) -> List[str]:
    """Half-width below 10 l + max|f'(u0)| T: the Green kernel feels the images."""
    half_width = 0.5 * config.grid.length
    needed = 10.0 * config.solver.ell + max_speed * config.solver.T
    if half_width < needed:
        return [
            f"domain half-width {half_width:g} is below 10*ell + max|f'(u0)|*T = {needed:g}; "
            "periodic images may influence the solution",
        ]
    return []


_parser = ConfigParserService()


def parse_config(text: str) -> ScenarioConfig:
    return ConfigParserService().parse(text)


def parse_config_file(path: str) -> ScenarioConfig:
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read())


def render_config(config: ScenarioConfig) -> str:
    return _parser.render(config)
