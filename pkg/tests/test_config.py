"""Presets, the key = value config format, validation, and digests."""

import math

import pytest

from fringelab.config import (
    CAVITY_SCENARIOS,
    MZ_SCENARIOS,
    PRESET_NAMES,
    ConfigError,
    ExperimentConfig,
    build_preset,
    config_digest,
    parse_config,
    serialize_config,
)
from fringelab.wavefield import MZGeometry, TwoSlitGeometry


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_every_preset_builds_and_round_trips(name):
    config = build_preset(name)
    assert config.scenario == name
    text = serialize_config(config)
    again = parse_config(text)
    assert again == config
    assert config_digest(again) == config_digest(config)


def test_unknown_preset_lists_valid_names():
    with pytest.raises(ConfigError) as err:
        build_preset("young_quadruple_slit")
    message = str(err.value)
    for name in PRESET_NAMES:
        assert name in message


def test_preset_defaults():
    config = build_preset("young_baseline")
    assert config.beam.wavelength == 500e-9
    geo = config.geometry
    assert isinstance(geo, TwoSlitGeometry)
    assert geo.slit_separation == 10e-6
    assert geo.slit_width == 2e-6
    assert geo.screen_distance == 1.0
    assert config.noise.distribution == "none"
    assert config.internal_overlap == 1.0
    assert config.detector_overlap == 1.0


def test_preset_scenario_structure():
    assert build_preset("young_random_phase").noise.distribution == "uniform"
    assert build_preset("young_internal_incoherent").internal_overlap == 0.0
    assert build_preset("young_micromaser").detector_overlap == 0.0
    single = build_preset("young_single_cavity")
    assert single.single_cavity
    assert single.pattern_convention == "measurement_mediated"
    eraser = build_preset("eraser_modulation")
    assert eraser.pattern_convention == "measurement_mediated"
    assert eraser.measurement is not None
    assert build_preset("mz_with_bs2").geometry.bs2_present
    assert not build_preset("mz_without_bs2").geometry.bs2_present
    screen = build_preset("mz_weak_screen")
    assert screen.weak_screen.transmittance == 0.99
    assert screen.weak_screen.scatter_fraction == 0.01


def test_minimal_config_applies_preset_defaults():
    config = parse_config("scenario = young_baseline\n")
    assert config == build_preset("young_baseline")


def test_comments_and_blank_lines_are_ignored():
    text = """
# full-line comment
scenario = young_baseline   # trailing comment

beam.wavelength = 6.33e-07
"""
    config = parse_config(text)
    assert config.beam.wavelength == 6.33e-7


def test_syntax_error_carries_line_number():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("scenario = young_baseline\nwavelength without equals\n")


def test_unknown_key_carries_line_number():
    with pytest.raises(ConfigError, match="line 2.*slit_count"):
        parse_config("scenario = young_baseline\ngeometry.slit_count = 3\n")


def test_duplicate_key_reports_both_lines():
    text = "scenario = young_baseline\nbeam.wavelength = 5e-7\nbeam.wavelength = 6e-7\n"
    with pytest.raises(ConfigError, match="line 3.*line 2"):
        parse_config(text)


def test_empty_value_is_an_error():
    with pytest.raises(ConfigError, match="scenario"):
        parse_config("scenario =\n")


def test_missing_scenario_is_an_error():
    with pytest.raises(ConfigError, match="scenario"):
        parse_config("beam.wavelength = 5e-7\n")


def test_range_error_cites_interval():
    with pytest.raises(ConfigError, match=r"line 2.*\[0, 1\]"):
        parse_config("scenario = young_baseline\ndetector_overlap = 1.5\n")


def test_bad_boolean_is_rejected():
    with pytest.raises(ConfigError, match="true or false"):
        parse_config("scenario = mz_with_bs2\nmz.bs2_present = yes\n")


def test_geometry_keys_must_match_scenario():
    with pytest.raises(ConfigError, match="not valid for scenario"):
        parse_config("scenario = young_baseline\nmz.phase_difference = 0.5\n")
    with pytest.raises(ConfigError, match="not valid for scenario"):
        parse_config("scenario = mz_with_bs2\ngeometry.slit_separation = 1e-5\n")


def test_overrides_replace_file_values():
    text = "scenario = young_baseline\ndetector_overlap = 0.2\n"
    config = parse_config(text, overrides={"detector_overlap": "0.8"})
    assert config.detector_overlap == 0.8


def test_complex_values_parse():
    text = "scenario = young_baseline\ngeometry.slit_amplitude2 = 0.5+0.5j\n"
    config = parse_config(text)
    assert config.geometry.slit_amplitudes[1] == 0.5 + 0.5j


def test_measurement_keys_require_mode():
    # the preset carries no operator here, so a bare element key would
    # otherwise be silently dropped
    text = "scenario = young_baseline\nmeasurement.g12 = 0\n"
    with pytest.raises(ConfigError, match="measurement.mode"):
        parse_config(text)


def test_preset_operator_elements_can_be_overridden():
    text = "scenario = eraser_modulation\nmeasurement.g12 = 0\nmeasurement.g21 = 0\n"
    config = parse_config(text)
    g = config.measurement.matrix_elements
    assert g[0][1] == 0.0
    assert g[1][0] == 0.0
    assert g[0][0] == 1.0


def test_measurement_center_of_mass_from_text():
    text = (
        "scenario = young_baseline\n"
        "pattern_convention = measurement_mediated\n"
        "measurement.mode = center_of_mass\n"
        "measurement.com_factor = 0.5j\n"
    )
    config = parse_config(text)
    assert config.measurement.mode == "center_of_mass"
    assert config.measurement.com_factor == 0.5j


def test_digest_distinguishes_configs():
    a = build_preset("young_baseline")
    b = parse_config("scenario = young_baseline\ndetector_overlap = 0.5\n")
    assert config_digest(a) != config_digest(b)
    assert len(config_digest(a)) == 64


def test_serialization_is_stable():
    config = build_preset("mz_weak_screen")
    assert serialize_config(config) == serialize_config(build_preset("mz_weak_screen"))


# --- cross-field physics validation ---


def test_mz_scenarios_reject_noise_and_operators():
    with pytest.raises(ConfigError, match="noise"):
        parse_config("scenario = mz_with_bs2\nnoise.distribution = uniform\n")


def test_cavity_scenarios_need_orthogonal_detector_states():
    with pytest.raises(ConfigError, match="detector"):
        parse_config("scenario = young_micromaser\ndetector_overlap = 0.5\n")


def test_cavity_scenarios_reject_phase_noise():
    with pytest.raises(ConfigError, match="noise"):
        parse_config("scenario = young_micromaser\nnoise.distribution = gaussian\nnoise.sigma = 0.5\n")


def test_single_cavity_limited_to_cavity_scenarios():
    with pytest.raises(ConfigError, match="single_cavity"):
        parse_config("scenario = young_baseline\nsingle_cavity = true\n")


def test_mediated_convention_requires_operator():
    with pytest.raises(ConfigError, match="measurement"):
        parse_config("scenario = young_baseline\npattern_convention = measurement_mediated\n")


def test_scenario_names_are_partitioned():
    assert set(MZ_SCENARIOS) <= set(PRESET_NAMES)
    assert set(CAVITY_SCENARIOS) <= set(PRESET_NAMES)
    assert not set(MZ_SCENARIOS) & set(CAVITY_SCENARIOS)


def test_direct_construction_validates_geometry_match():
    base = build_preset("young_baseline")
    mz = build_preset("mz_with_bs2")
    with pytest.raises(ValueError):
        ExperimentConfig(
            scenario="young_baseline",
            beam=base.beam,
            geometry=mz.geometry,
            noise=base.noise,
        )
