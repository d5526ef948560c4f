"""Experiment configuration: presets, the key = value file format, digests.

A configuration names a scenario plus every physical parameter the
simulator needs. The nine built-in presets cover the bench layouts the
package models; a config file starts from its scenario's preset and
overrides individual keys. The file format is line-oriented
``key = value`` with ``#`` comments and dotted keys for nesting, chosen
so configs stay diffable and trivially parseable.
"""

from __future__ import annotations

import cmath
import hashlib
import math
from dataclasses import dataclass
from typing import Optional, Union

from .composite import PATTERN_CONVENTIONS, PhaseNoise, StateVector, TRIVIAL_STATE
from .measurement import MeasurementOperator, WeakScreen
from .wavefield import TWO_PI, BeamSpec, CrossingRegion, MZGeometry, ScreenGrid, TwoSlitGeometry

PRESET_NAMES = (
    "young_baseline",
    "young_random_phase",
    "young_internal_incoherent",
    "young_micromaser",
    "young_single_cavity",
    "mz_with_bs2",
    "mz_without_bs2",
    "mz_weak_screen",
    "eraser_modulation",
)

MZ_SCENARIOS = ("mz_with_bs2", "mz_without_bs2", "mz_weak_screen")

#: Scenarios whose runs attach photon-cavity which-way records to events.
CAVITY_SCENARIOS = ("young_micromaser", "young_single_cavity", "eraser_modulation")

# Desk-scale defaults shared by every preset.
DEFAULT_WAVELENGTH = 500e-9
DEFAULT_SLIT_SEPARATION = 10e-6
DEFAULT_SLIT_WIDTH = 2e-6
DEFAULT_SCREEN_DISTANCE = 1.0
DEFAULT_SCREEN_HALF_WIDTH = 0.15
DEFAULT_SCREEN_POINTS = 2048
DEFAULT_CROSSING_SIZE = 3e-6


class ConfigError(Exception):
    """Invalid configuration text or values, with a line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs: bench layout, states, noise, readout."""

    scenario: str
    beam: BeamSpec
    geometry: Union[TwoSlitGeometry, MZGeometry]
    noise: PhaseNoise
    internal_overlap: float = 1.0
    internal_overlap_phase: float = 0.0
    detector_overlap: float = 1.0
    detector_overlap_phase: float = 0.0
    weak_screen: Optional[WeakScreen] = None
    measurement: Optional[MeasurementOperator] = None
    pattern_convention: str = "literal"
    single_cavity: bool = False

    def __post_init__(self) -> None:
        if self.scenario not in PRESET_NAMES:
            raise ValueError(f"unknown scenario {self.scenario!r}; valid: {', '.join(PRESET_NAMES)}")
        for name in ("internal_overlap", "detector_overlap"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        for name in ("internal_overlap_phase", "detector_overlap_phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.pattern_convention not in PATTERN_CONVENTIONS:
            raise ValueError(f"pattern_convention must be one of {PATTERN_CONVENTIONS}")
        is_mz = self.scenario in MZ_SCENARIOS
        if is_mz and not isinstance(self.geometry, MZGeometry):
            raise ValueError(f"scenario {self.scenario} needs interferometer geometry")
        if not is_mz and not isinstance(self.geometry, TwoSlitGeometry):
            raise ValueError(f"scenario {self.scenario} needs two-slit geometry")
        if self.scenario == "mz_weak_screen":
            if self.weak_screen is None:
                raise ValueError("mz_weak_screen requires a weak_screen section")
        elif self.weak_screen is not None:
            raise ValueError("weak_screen applies only to the mz_weak_screen scenario")
        if is_mz:
            if self.noise.distribution != "none":
                raise ValueError("phase noise applies to the two-slit bench, not interferometer scenarios")
            if self.measurement is not None:
                raise ValueError("measurement operators apply to screen scenarios only")
        if self.pattern_convention == "measurement_mediated" and not is_mz and self.measurement is None:
            raise ValueError("measurement_mediated convention requires a measurement operator")
        if self.single_cavity and self.scenario not in CAVITY_SCENARIOS:
            raise ValueError("single_cavity applies only to cavity-tagging scenarios")
        if self.scenario in CAVITY_SCENARIOS:
            if self.detector_overlap != 0.0:
                raise ValueError("cavity tagging requires orthogonal detector states (detector_overlap = 0)")
            if self.noise.distribution != "none":
                raise ValueError("phase noise is not modeled for cavity-tagging scenarios")

    @property
    def overlap_product(self) -> complex:
        """Combined cross-term factor of the internal and detector overlaps."""
        return (self.internal_overlap * cmath.exp(1j * self.internal_overlap_phase)
                * self.detector_overlap * cmath.exp(1j * self.detector_overlap_phase))


def _default_two_slit() -> TwoSlitGeometry:
    return TwoSlitGeometry(
        slit_separation=DEFAULT_SLIT_SEPARATION,
        slit_width=DEFAULT_SLIT_WIDTH,
        screen_distance=DEFAULT_SCREEN_DISTANCE,
        slit_amplitudes=(1.0, 1.0),
        screen_grid=ScreenGrid(-DEFAULT_SCREEN_HALF_WIDTH, DEFAULT_SCREEN_HALF_WIDTH, DEFAULT_SCREEN_POINTS),
    )


def _default_mz(bs2_present: bool) -> MZGeometry:
    return MZGeometry(
        bs2_present=bs2_present,
        phase_difference=0.0,
        crossing_wavenumber=TWO_PI / DEFAULT_WAVELENGTH,
        crossing_region=CrossingRegion(0.0, DEFAULT_CROSSING_SIZE, 0.0, DEFAULT_CROSSING_SIZE),
    )


def _uniform_response_operator() -> MeasurementOperator:
    """Internal-mode readout whose four matrix elements are all 1.

    This is the best-case detector: it responds identically whichever
    branch was taken, so the recorded signal keeps the full fringe term.
    """
    basis0 = StateVector((1.0, 0.0))
    return MeasurementOperator.internal((basis0, basis0), ((1.0, 1.0), (1.0, 1.0)))


def build_preset(name: str) -> ExperimentConfig:
    """Fully populated configuration for one of the named scenarios."""
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}")
    beam = BeamSpec(wavelength=DEFAULT_WAVELENGTH, amplitude=1.0)
    none = PhaseNoise.none()
    if name == "young_baseline":
        return ExperimentConfig(name, beam, _default_two_slit(), none)
    if name == "young_random_phase":
        return ExperimentConfig(name, beam, _default_two_slit(), PhaseNoise.uniform(0.0, TWO_PI))
    if name == "young_internal_incoherent":
        return ExperimentConfig(name, beam, _default_two_slit(), none, internal_overlap=0.0)
    if name == "young_micromaser":
        return ExperimentConfig(name, beam, _default_two_slit(), none, detector_overlap=0.0)
    if name == "young_single_cavity":
        return ExperimentConfig(
            name, beam, _default_two_slit(), none,
            internal_overlap=0.0, detector_overlap=0.0,
            measurement=_uniform_response_operator(),
            pattern_convention="measurement_mediated", single_cavity=True,
        )
    if name == "eraser_modulation":
        return ExperimentConfig(
            name, beam, _default_two_slit(), none,
            detector_overlap=0.0,
            measurement=_uniform_response_operator(),
            pattern_convention="measurement_mediated",
        )
    if name == "mz_with_bs2":
        return ExperimentConfig(name, beam, _default_mz(True), none)
    if name == "mz_without_bs2":
        return ExperimentConfig(name, beam, _default_mz(False), none)
    return ExperimentConfig(name, beam, _default_mz(False), none, weak_screen=WeakScreen())


def _parse_bool(text: str) -> bool:
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _parse_complex(text: str) -> complex:
    return complex(text.replace(" ", ""))


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float, complex)):
        return repr(value)
    return str(value)


# key -> (parser, one-line validity check or None)
def _in_unit_interval(v: float) -> None:
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"must lie in [0, 1], got {v!r}")


def _positive(v: float) -> None:
    if not v > 0:
        raise ValueError(f"must be positive, got {v!r}")


_KEY_TABLE = {
    "scenario": (str, None),
    "beam.wavelength": (float, _positive),
    "beam.amplitude": (_parse_complex, None),
    "noise.distribution": (str, None),
    "noise.independent_per_branch": (_parse_bool, None),
    "noise.value": (float, None),
    "noise.low": (float, None),
    "noise.high": (float, None),
    "noise.sigma": (float, None),
    "internal_overlap": (float, _in_unit_interval),
    "internal_overlap_phase": (float, None),
    "detector_overlap": (float, _in_unit_interval),
    "detector_overlap_phase": (float, None),
    "pattern_convention": (str, None),
    "single_cavity": (_parse_bool, None),
    "geometry.slit_separation": (float, _positive),
    "geometry.slit_width": (float, _positive),
    "geometry.screen_distance": (float, _positive),
    "geometry.slit_amplitude1": (_parse_complex, None),
    "geometry.slit_amplitude2": (_parse_complex, None),
    "geometry.screen_x_min": (float, None),
    "geometry.screen_x_max": (float, None),
    "geometry.screen_points": (int, None),
    "mz.bs2_present": (_parse_bool, None),
    "mz.phase_difference": (float, None),
    "mz.crossing_wavenumber": (float, _positive),
    "mz.crossing_x_min": (float, None),
    "mz.crossing_x_max": (float, None),
    "mz.crossing_y_min": (float, None),
    "mz.crossing_y_max": (float, None),
    "weak_screen.transmittance": (float, _in_unit_interval),
    "weak_screen.scatter_fraction": (float, _in_unit_interval),
    "measurement.mode": (str, None),
    "measurement.com_factor": (_parse_complex, None),
    "measurement.g11": (_parse_complex, None),
    "measurement.g12": (_parse_complex, None),
    "measurement.g21": (_parse_complex, None),
    "measurement.g22": (_parse_complex, None),
}


def _raw_items(config: ExperimentConfig) -> dict[str, object]:
    """Flatten a config to the key table's value set, in canonical order."""
    items: dict[str, object] = {"scenario": config.scenario}
    items["beam.wavelength"] = config.beam.wavelength
    items["beam.amplitude"] = config.beam.amplitude
    n = config.noise
    items["noise.distribution"] = n.distribution
    items["noise.independent_per_branch"] = n.independent_per_branch
    items["noise.value"] = n.value
    items["noise.low"] = n.low
    items["noise.high"] = n.high
    items["noise.sigma"] = n.sigma
    items["internal_overlap"] = config.internal_overlap
    items["internal_overlap_phase"] = config.internal_overlap_phase
    items["detector_overlap"] = config.detector_overlap
    items["detector_overlap_phase"] = config.detector_overlap_phase
    items["pattern_convention"] = config.pattern_convention
    items["single_cavity"] = config.single_cavity
    if isinstance(config.geometry, TwoSlitGeometry):
        g = config.geometry
        items["geometry.slit_separation"] = g.slit_separation
        items["geometry.slit_width"] = g.slit_width
        items["geometry.screen_distance"] = g.screen_distance
        items["geometry.slit_amplitude1"] = g.slit_amplitudes[0]
        items["geometry.slit_amplitude2"] = g.slit_amplitudes[1]
        items["geometry.screen_x_min"] = g.screen_grid.x_min
        items["geometry.screen_x_max"] = g.screen_grid.x_max
        items["geometry.screen_points"] = g.screen_grid.n_points
    else:
        m = config.geometry
        items["mz.bs2_present"] = m.bs2_present
        items["mz.phase_difference"] = m.phase_difference
        items["mz.crossing_wavenumber"] = m.crossing_wavenumber
        items["mz.crossing_x_min"] = m.crossing_region.x_min
        items["mz.crossing_x_max"] = m.crossing_region.x_max
        items["mz.crossing_y_min"] = m.crossing_region.y_min
        items["mz.crossing_y_max"] = m.crossing_region.y_max
    if config.weak_screen is not None:
        items["weak_screen.transmittance"] = config.weak_screen.transmittance
        items["weak_screen.scatter_fraction"] = config.weak_screen.scatter_fraction
    if config.measurement is not None:
        op = config.measurement
        items["measurement.mode"] = op.mode
        if op.mode == "center_of_mass":
            items["measurement.com_factor"] = op.com_factor
        else:
            g = op.matrix_elements
            items["measurement.g11"] = g[0][0]
            items["measurement.g12"] = g[0][1]
            items["measurement.g21"] = g[1][0]
            items["measurement.g22"] = g[1][1]
    return items


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical text form; identical configs serialize byte-identically."""
    lines = [f"{key} = {_format_value(value)}" for key, value in _raw_items(config).items()]
    return "\n".join(lines) + "\n"


def config_digest(config: ExperimentConfig) -> str:
    """Content hash of the canonical serialization."""
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()


def _build_from_raw(raw: dict[str, object]) -> ExperimentConfig:
    scenario = raw["scenario"]
    if scenario not in PRESET_NAMES:
        raise ConfigError(f"unknown scenario {scenario!r}; valid: {', '.join(PRESET_NAMES)}")
    is_mz = scenario in MZ_SCENARIOS
    try:
        beam = BeamSpec(wavelength=raw["beam.wavelength"], amplitude=raw["beam.amplitude"])
        noise = PhaseNoise(
            distribution=raw["noise.distribution"],
            independent_per_branch=raw["noise.independent_per_branch"],
            value=raw["noise.value"],
            low=raw["noise.low"],
            high=raw["noise.high"],
            sigma=raw["noise.sigma"],
        )
        if is_mz:
            geometry: Union[TwoSlitGeometry, MZGeometry] = MZGeometry(
                bs2_present=raw["mz.bs2_present"],
                phase_difference=raw["mz.phase_difference"],
                crossing_wavenumber=raw["mz.crossing_wavenumber"],
                crossing_region=CrossingRegion(
                    raw["mz.crossing_x_min"], raw["mz.crossing_x_max"],
                    raw["mz.crossing_y_min"], raw["mz.crossing_y_max"],
                ),
            )
        else:
            geometry = TwoSlitGeometry(
                slit_separation=raw["geometry.slit_separation"],
                slit_width=raw["geometry.slit_width"],
                screen_distance=raw["geometry.screen_distance"],
                slit_amplitudes=(raw["geometry.slit_amplitude1"], raw["geometry.slit_amplitude2"]),
                screen_grid=ScreenGrid(
                    raw["geometry.screen_x_min"], raw["geometry.screen_x_max"],
                    raw["geometry.screen_points"],
                ),
            )
        weak_screen = None
        if "weak_screen.transmittance" in raw or "weak_screen.scatter_fraction" in raw:
            weak_screen = WeakScreen(
                transmittance=raw.get("weak_screen.transmittance", 0.99),
                scatter_fraction=raw.get("weak_screen.scatter_fraction", 0.01),
            )
        measurement = None
        if any(k.startswith("measurement.") for k in raw) and "measurement.mode" not in raw:
            raise ConfigError("measurement.mode is required when measurement keys are set")
        if "measurement.mode" in raw:
            mode = raw["measurement.mode"]
            if mode == "center_of_mass":
                measurement = MeasurementOperator.center_of_mass(raw.get("measurement.com_factor", 1.0))
            else:
                basis0 = StateVector((1.0, 0.0))
                measurement = MeasurementOperator.internal(
                    (basis0, basis0),
                    ((raw.get("measurement.g11", 1.0), raw.get("measurement.g12", 1.0)),
                     (raw.get("measurement.g21", 1.0), raw.get("measurement.g22", 1.0))),
                )
        return ExperimentConfig(
            scenario=scenario,
            beam=beam,
            geometry=geometry,
            noise=noise,
            internal_overlap=raw["internal_overlap"],
            internal_overlap_phase=raw["internal_overlap_phase"],
            detector_overlap=raw["detector_overlap"],
            detector_overlap_phase=raw["detector_overlap_phase"],
            weak_screen=weak_screen,
            measurement=measurement,
            pattern_convention=raw["pattern_convention"],
            single_cavity=raw["single_cavity"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _scenario_keys(scenario: str) -> set[str]:
    """Keys that may appear for a given scenario."""
    keys = {k for k in _KEY_TABLE if "." not in k or k.split(".", 1)[0] in ("beam", "noise")}
    if scenario in MZ_SCENARIOS:
        keys |= {k for k in _KEY_TABLE if k.startswith("mz.")}
        if scenario == "mz_weak_screen":
            keys |= {k for k in _KEY_TABLE if k.startswith("weak_screen.")}
    else:
        keys |= {k for k in _KEY_TABLE if k.startswith("geometry.")}
        keys |= {k for k in _KEY_TABLE if k.startswith("measurement.")}
    return keys


def parse_config(text: str, overrides: Optional[dict[str, str]] = None) -> ExperimentConfig:
    """Parse key = value text into a validated configuration.

    The scenario key selects the preset whose defaults fill every key the
    text does not mention. overrides, when given, are applied on top of
    the text (replacing file values); they are raw value strings keyed
    like file keys, used by the sweep command.
    """
    entries: dict[str, tuple[int, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected key = value, got {body!r}", lineno)
        key, _, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError("missing key before '='", lineno)
        if not value:
            raise ConfigError(f"empty value for key {key!r}", lineno)
        if key not in _KEY_TABLE:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r} (first set on line {entries[key][0]})", lineno)
        entries[key] = (lineno, value)
    if overrides:
        for key, value in overrides.items():
            if key not in _KEY_TABLE:
                raise ConfigError(f"unknown key {key!r}")
            entries[key] = (entries.get(key, (0, ""))[0] or 0, value)
    if "scenario" not in entries:
        raise ConfigError("missing required key: scenario")
    scenario_line, scenario = entries["scenario"]
    if scenario not in PRESET_NAMES:
        raise ConfigError(
            f"unknown scenario {scenario!r}; valid: {', '.join(PRESET_NAMES)}",
            scenario_line or None,
        )
    allowed = _scenario_keys(scenario)
    raw: dict[str, object] = dict(_raw_items(build_preset(scenario)))
    for key, (lineno, value) in entries.items():
        if key == "scenario":
            continue
        if key not in allowed:
            raise ConfigError(f"key {key!r} is not valid for scenario {scenario}", lineno or None)
        parser, check = _KEY_TABLE[key]
        try:
            parsed = parser(value)
            if check is not None:
                check(parsed)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}", lineno or None) from exc
        raw[key] = parsed
    return _build_from_raw(raw)
