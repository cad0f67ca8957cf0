"""Run configuration: sectioned key = value text, validated, reference default values."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

from .bloch import DecayModel, LaserField
from .levels import D1_WAVELENGTH_NM, Manifold, build_level_scheme
from .pumping import DEFAULT_PUMP_DURATION_MS, PumpConfig
from .spectrum import ExperimentModel, PopulationDistribution


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    # experiment
    omega_c: float = 78.0        # coupling Rabi scale, MHz
    omega_p: float = 1.0         # probe Rabi scale, MHz
    coupling_detuning: float = 0.0
    gamma_ab: float = 2.0
    gamma_ac: float = 4.0
    b_field: float = 0.15        # G
    n_f1: float = 1.2e11         # cm^-3
    path_length: float = 2.0     # mm
    wavelength: float = D1_WAVELENGTH_NM  # nm
    # scan
    scan_start: float = -80.0
    scan_stop: float = 80.0
    scan_step: float = 1.0
    # fit
    fit_init: tuple = (1 / 3, 1 / 3, 1 / 3)
    fit_init_density: float = None
    fit_density: bool = True
    fit_multistart: bool = True
    fit_max_iterations: int = 200
    # pump
    pump_polarization: int = -1
    pump_power: float = 13.6     # mW
    pump_beam_diameter: float = 2.0  # mm
    pump_duration: float = DEFAULT_PUMP_DURATION_MS  # ms
    # output
    out_path: str = ""

    def __post_init__(self):
        if self.fit_init_density is None:
            self.fit_init_density = self.n_f1
        self.validate()

    def validate(self):
        def check(cond, name, value):
            if not cond:
                raise ConfigError(f"{name} out of range: {value!r}")

        check(0 <= self.omega_c <= 500, "experiment.omega_c", self.omega_c)
        check(0 <= self.omega_p <= 500, "experiment.omega_p", self.omega_p)
        check(1e9 <= self.n_f1 <= 1e13, "experiment.n_f1", self.n_f1)
        check(0 <= self.b_field <= 10, "experiment.b_field", self.b_field)
        check(self.gamma_ab >= 0, "experiment.gamma_ab", self.gamma_ab)
        check(self.gamma_ac > self.gamma_ab, "experiment.gamma_ac", self.gamma_ac)
        check(self.path_length > 0, "experiment.path_length", self.path_length)
        check(self.wavelength > 0, "experiment.wavelength", self.wavelength)
        check(self.scan_step > 0, "scan.step", self.scan_step)
        check(self.scan_start < self.scan_stop, "scan.start", self.scan_start)
        check(self.fit_max_iterations > 0, "fit.max_iterations", self.fit_max_iterations)
        check(len(self.fit_init) == 3 and abs(sum(self.fit_init) - 1) < 1e-6
              and min(self.fit_init) >= 0, "fit.init", self.fit_init)
        check(1e9 <= self.fit_init_density <= 1e13, "fit.init_density", self.fit_init_density)
        check(self.pump_polarization in (-1, 0, 1), "pump.polarization", self.pump_polarization)
        check(self.pump_power >= 0, "pump.power", self.pump_power)
        check(self.pump_beam_diameter > 0, "pump.beam_diameter", self.pump_beam_diameter)
        check(self.pump_duration > 0, "pump.duration", self.pump_duration)

    # --- derived model objects -------------------------------------------

    def experiment_model(self) -> ExperimentModel:
        scheme = build_level_scheme(self.b_field)
        return ExperimentModel(
            scheme=scheme,
            coupling=LaserField(0, self.omega_c, self.coupling_detuning,
                                (Manifold.G2, Manifold.E2)),
            probe=LaserField(-1, self.omega_p, 0.0, (Manifold.G1, Manifold.E2)),
            decay=DecayModel(self.gamma_ab, self.gamma_ac),
            n_f1=self.n_f1,
            path_length_mm=self.path_length,
            wavelength_nm=self.wavelength,
        )

    def scan_grid(self):
        import numpy as np

        n = int(round((self.scan_stop - self.scan_start) / self.scan_step)) + 1
        return self.scan_start + self.scan_step * np.arange(n)

    def pump_config(self) -> PumpConfig:
        return PumpConfig(self.pump_polarization, self.pump_power,
                          self.pump_beam_diameter, self.pump_duration)

    def fit_init_pops(self) -> PopulationDistribution:
        total = sum(self.fit_init)
        return PopulationDistribution(*(p / total for p in self.fit_init))


_FIELD_MAP = {
    ("experiment", "omega_c"): ("omega_c", float),
    ("experiment", "omega_p"): ("omega_p", float),
    ("experiment", "coupling_detuning"): ("coupling_detuning", float),
    ("experiment", "gamma_ab"): ("gamma_ab", float),
    ("experiment", "gamma_ac"): ("gamma_ac", float),
    ("experiment", "b_field"): ("b_field", float),
    ("experiment", "n_f1"): ("n_f1", float),
    ("experiment", "path_length"): ("path_length", float),
    ("experiment", "wavelength"): ("wavelength", float),
    ("scan", "start"): ("scan_start", float),
    ("scan", "stop"): ("scan_stop", float),
    ("scan", "step"): ("scan_step", float),
    ("fit", "init"): ("fit_init", "triple"),
    ("fit", "init_density"): ("fit_init_density", float),
    ("fit", "density"): ("fit_density", "bool"),
    ("fit", "multistart"): ("fit_multistart", "bool"),
    ("fit", "max_iterations"): ("fit_max_iterations", int),
    ("pump", "polarization"): ("pump_polarization", int),
    ("pump", "power"): ("pump_power", float),
    ("pump", "beam_diameter"): ("pump_beam_diameter", float),
    ("pump", "duration"): ("pump_duration", float),
    ("output", "path"): ("out_path", str),
}


def _convert(kind, raw, where):
    try:
        if kind is float:
            return float(raw)
        if kind is int:
            return int(raw)
        if kind is str:
            return raw
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "triple":
            parts = [float(x) for x in raw.replace(",", " ").split()]
            if len(parts) != 3:
                raise ValueError(raw)
            return tuple(parts)
    except ValueError:
        raise ConfigError(f"cannot parse value for {where}: {raw!r}") from None
    raise AssertionError(kind)


def parse_config(text: str) -> RunConfig:
    """Parse sectioned key = value config text; empty input gives the reference defaults."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None

    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            where = f"{section}.{key}"
            if (section, key) not in _FIELD_MAP:
                raise ConfigError(f"unknown config field {where}")
            attr, kind = _FIELD_MAP[(section, key)]
            values[attr] = _convert(kind, raw, where)
    try:
        return RunConfig(**values)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
