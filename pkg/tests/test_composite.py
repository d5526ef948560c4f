"""Composite two-branch states, overlap algebra, and phase-noise averaging."""

import cmath
import math

import numpy as np
import pytest

from fringelab.composite import (
    Branch,
    CompositeState,
    PhaseNoise,
    StateVector,
    TRIVIAL_STATE,
    dephase,
    ensemble_pattern,
    inner,
    literal_pattern,
    noise_averaged_pattern,
    overlap_pair,
    pattern_terms,
    slit_branch_amplitude,
    two_slit_composite,
)
from fringelab.wavefield import BeamSpec, TwoSlitGeometry, single_slit_intensity

BEAM = BeamSpec(wavelength=500e-9)
GEO = TwoSlitGeometry(slit_separation=10e-6, slit_width=2e-6, screen_distance=1.0)
PERIOD = 500e-9 * 1.0 / 10e-6

# E[e^{i delta}] checked against numerical quadrature of the densities;
# the uniform(0.3, 1.9) and gaussian values are the quadrature results.
UNIFORM_0_3_1_9_MEAN = 0.40673742564129695 + 0.7991412849931933j
GAUSS_1_3_MEAN = 0.4295573582107392
TWO_OVER_PI = 0.6366197723675814


def test_state_vector_requires_unit_norm():
    with pytest.raises(ValueError):
        StateVector((0.5, 0.5))
    sv = StateVector((1.0, 0.0))
    assert sv.dim == 2
    assert sv.asarray().dtype == complex


def test_state_vector_normalize():
    sv = StateVector.normalize((3.0, 4.0j))
    assert abs(sv.components[0] - 0.6) < 1e-15
    assert abs(sv.components[1] - 0.8j) < 1e-15
    with pytest.raises(ValueError):
        StateVector.normalize((0.0, 0.0))


def test_inner_is_conjugate_linear_in_first_argument():
    a = StateVector.normalize((1.0, 1.0j))
    b = StateVector.normalize((1.0, -1.0j))
    # <a|b> = conj(a) . b = (1 - i*(-i))/2 = (1 - 1)/2 ... restate directly
    expected = (np.conj([1, 1j]) @ np.array([1, -1j])) / 2.0
    assert inner(a, b) == pytest.approx(complex(expected), abs=1e-15)
    assert inner(a, b) == pytest.approx(np.conj(inner(b, a)), abs=1e-15)
    assert inner(a, a) == pytest.approx(1.0, abs=1e-15)


def test_inner_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        inner(TRIVIAL_STATE, StateVector((1.0, 0.0)))


@pytest.mark.parametrize("magnitude", [0.0, 0.25, 0.5, 0.75, 1.0])
@pytest.mark.parametrize("phase", [0.0, 0.8, -2.1])
def test_overlap_pair_realizes_requested_overlap(magnitude, phase):
    s1, s2 = overlap_pair(magnitude, phase)
    got = inner(s1, s2)
    want = magnitude * cmath.exp(1j * phase)
    assert abs(got - want) < 1e-12
    assert abs(inner(s1, s1) - 1.0) < 1e-12
    assert abs(inner(s2, s2) - 1.0) < 1e-12


def test_overlap_pair_validation():
    with pytest.raises(ValueError):
        overlap_pair(1.5)
    with pytest.raises(ValueError):
        overlap_pair(0.5, dim=1)


def test_branch_and_composite_validation():
    amp = slit_branch_amplitude(GEO, BEAM, 1)
    with pytest.raises(ValueError):
        Branch(3, amp, TRIVIAL_STATE, TRIVIAL_STATE)
    b1 = Branch(1, amp, TRIVIAL_STATE, TRIVIAL_STATE)
    b2 = Branch(2, amp, TRIVIAL_STATE, TRIVIAL_STATE)
    with pytest.raises(ValueError):
        CompositeState((b2, b1))
    with pytest.raises(ValueError):
        CompositeState((b1, b2), pattern_convention="sideways")


def test_overlap_product_factorizes():
    internal = overlap_pair(0.7, 0.2)
    detector = overlap_pair(0.4, -0.5)
    state = two_slit_composite(GEO, BEAM, internal, detector)
    want = 0.7 * cmath.exp(0.2j) * 0.4 * cmath.exp(-0.5j)
    assert abs(state.overlap_product() - want) < 1e-12


def test_literal_pattern_matches_term_by_term_expansion():
    internal = overlap_pair(0.6, 0.3)
    detector = overlap_pair(0.9, -0.1)
    state = two_slit_composite(GEO, BEAM, internal, detector)
    from dataclasses import replace

    b1 = replace(state.branch1, extra_phase=0.4)
    b2 = replace(state.branch2, extra_phase=-0.7)
    state = CompositeState((b1, b2))
    x = np.linspace(-PERIOD, PERIOD, 101)
    psi1 = b1.com_amplitude(x)
    psi2 = b2.com_amplitude(x)
    factor = inner(internal[0], internal[1]) * inner(detector[0], detector[1])
    expected = (
        np.abs(psi1) ** 2
        + np.abs(psi2) ** 2
        + 2.0 * np.real(factor * np.conj(psi1) * psi2 * cmath.exp(1j * (-0.7 - 0.4)))
    )
    np.testing.assert_allclose(literal_pattern(state, x), expected, rtol=1e-12)


def test_orthogonal_detector_states_remove_fringes():
    state = two_slit_composite(GEO, BEAM, detector=overlap_pair(0.0))
    x = np.linspace(-2 * PERIOD, 2 * PERIOD, 301)
    pattern = literal_pattern(state, x)
    expected = single_slit_intensity(GEO, BEAM, 1, x) + single_slit_intensity(GEO, BEAM, 2, x)
    np.testing.assert_allclose(pattern, expected, rtol=0, atol=1e-12)


def test_flat_modulus_amplitude_isolates_interference():
    amp = slit_branch_amplitude(GEO, BEAM, 1, include_envelope=False)
    x = np.linspace(-2 * PERIOD, 2 * PERIOD, 301)
    np.testing.assert_allclose(np.abs(amp(x)), 1.0, rtol=1e-12)


def test_pattern_terms_exclude_extra_phases():
    from dataclasses import replace

    state = two_slit_composite(GEO, BEAM)
    shifted = CompositeState(
        (replace(state.branch1, extra_phase=1.0), replace(state.branch2, extra_phase=2.0))
    )
    x = np.linspace(-PERIOD, PERIOD, 51)
    base_a, cross_a = pattern_terms(state, x)
    base_b, cross_b = pattern_terms(shifted, x)
    np.testing.assert_array_equal(base_a, base_b)
    np.testing.assert_array_equal(cross_a, cross_b)


# --- phase noise ---


def test_noise_validation():
    with pytest.raises(ValueError):
        PhaseNoise("weibull")
    with pytest.raises(ValueError):
        PhaseNoise.uniform(2.0, 1.0)
    with pytest.raises(ValueError):
        PhaseNoise.gaussian(-0.1)


def test_mean_phase_factor_against_quadrature():
    assert PhaseNoise.none().mean_phase_factor() == 1.0
    assert PhaseNoise.constant(0.9).mean_phase_factor() == pytest.approx(cmath.exp(0.9j), abs=1e-15)
    got = PhaseNoise.uniform(0.3, 1.9).mean_phase_factor()
    assert abs(got - UNIFORM_0_3_1_9_MEAN) < 1e-12
    got = PhaseNoise.uniform(-math.pi / 2, math.pi / 2).mean_phase_factor()
    assert abs(got - TWO_OVER_PI) < 1e-12
    got = PhaseNoise.uniform(0.0, 2 * math.pi).mean_phase_factor()
    assert abs(got) < 1e-12
    got = PhaseNoise.gaussian(1.3).mean_phase_factor()
    assert abs(got - GAUSS_1_3_MEAN) < 1e-12


def test_cross_phase_factor_independent_vs_shared():
    independent = PhaseNoise.uniform(-math.pi / 2, math.pi / 2)
    assert abs(independent.cross_phase_factor() - TWO_OVER_PI**2) < 1e-12
    shared = PhaseNoise.uniform(-math.pi / 2, math.pi / 2, independent_per_branch=False)
    assert shared.cross_phase_factor() == 1.0
    assert PhaseNoise.constant(1.3).cross_phase_factor() == 1.0


def test_dephase_none_returns_same_object_and_draws_nothing():
    state = two_slit_composite(GEO, BEAM)
    rng = np.random.Generator(np.random.Philox(key=[11, 0]))
    assert dephase(state, PhaseNoise.none(), rng) is state
    fresh = np.random.Generator(np.random.Philox(key=[11, 0]))
    assert rng.random() == fresh.random()


def test_dephase_constant_sets_both_phases_without_drawing():
    state = two_slit_composite(GEO, BEAM)
    rng = np.random.Generator(np.random.Philox(key=[11, 0]))
    out = dephase(state, PhaseNoise.constant(0.77), rng)
    assert out.branch1.extra_phase == 0.77
    assert out.branch2.extra_phase == 0.77
    fresh = np.random.Generator(np.random.Philox(key=[11, 0]))
    assert rng.random() == fresh.random()


def test_dephase_draws_branch_one_first():
    noise = PhaseNoise.uniform(0.0, 1.0)
    state = two_slit_composite(GEO, BEAM)
    rng = np.random.Generator(np.random.Philox(key=[11, 0]))
    out = dephase(state, noise, rng)
    ref = np.random.Generator(np.random.Philox(key=[11, 0]))
    d1 = ref.uniform(0.0, 1.0)
    d2 = ref.uniform(0.0, 1.0)
    assert out.branch1.extra_phase == d1
    assert out.branch2.extra_phase == d2


def test_dephase_shared_draw_shifts_both_branches_equally():
    noise = PhaseNoise.uniform(0.0, 1.0, independent_per_branch=False)
    state = two_slit_composite(GEO, BEAM)
    rng = np.random.Generator(np.random.Philox(key=[11, 0]))
    out = dephase(state, noise, rng)
    assert out.branch1.extra_phase == out.branch2.extra_phase
    x = np.linspace(-PERIOD, PERIOD, 51)
    np.testing.assert_allclose(literal_pattern(out, x), literal_pattern(state, x), rtol=1e-12)


def test_noise_averaged_pattern_uses_exact_cross_factor():
    state = two_slit_composite(GEO, BEAM)
    noise = PhaseNoise.uniform(-math.pi / 2, math.pi / 2)
    x = np.linspace(-PERIOD, PERIOD, 101)
    base, cross = pattern_terms(state, x)
    expected = base + 2.0 * np.real(cross * TWO_OVER_PI**2)
    np.testing.assert_allclose(noise_averaged_pattern(state, noise, x), expected, rtol=1e-12)


def test_ensemble_pattern_matches_manual_average():
    state = two_slit_composite(GEO, BEAM, include_envelope=False)
    noise = PhaseNoise.uniform(0.0, 2 * math.pi)
    x = np.linspace(-PERIOD, PERIOD, 41)
    n = 200
    got = ensemble_pattern(state, noise, n, np.random.Generator(np.random.Philox(key=[5, 0])), x)
    # manual average over the same draws, one dephased copy at a time
    ref = np.random.Generator(np.random.Philox(key=[5, 0]))
    d1 = ref.uniform(0.0, 2 * math.pi, n)
    d2 = ref.uniform(0.0, 2 * math.pi, n)
    acc = np.zeros_like(x)
    base, cross = pattern_terms(state, x)
    for a, b in zip(d1, d2):
        acc += base + 2.0 * np.real(cross * cmath.exp(1j * (b - a)))
    np.testing.assert_allclose(got, acc / n, rtol=0, atol=1e-10)


def test_ensemble_pattern_converges_to_noise_average():
    state = two_slit_composite(GEO, BEAM, include_envelope=False)
    noise = PhaseNoise.uniform(0.0, 2 * math.pi)
    x = np.linspace(-PERIOD, PERIOD, 101)
    n = 100_000
    rng = np.random.Generator(np.random.Philox(key=[21, 0]))
    got = ensemble_pattern(state, noise, n, rng, x)
    exact = noise_averaged_pattern(state, noise, x)
    # the averaged phase factor has standard error ~ 1/sqrt(n); the
    # pattern amplitude doubles it
    assert float(np.max(np.abs(got - exact))) < 2.0 * 3.0 / math.sqrt(n)


def test_ensemble_pattern_requires_draws():
    state = two_slit_composite(GEO, BEAM)
    rng = np.random.Generator(np.random.Philox(key=[1, 0]))
    with pytest.raises(ValueError):
        ensemble_pattern(state, PhaseNoise.none(), 0, rng, 0.0)


def test_constant_noise_leaves_pattern_exactly_unchanged():
    state = two_slit_composite(GEO, BEAM)
    x = np.linspace(-2 * PERIOD, 2 * PERIOD, 201)
    rng = np.random.Generator(np.random.Philox(key=[9, 0]))
    noiseless = literal_pattern(state, x)
    for value in (0.0, 1.1, -2.9):
        out = ensemble_pattern(state, PhaseNoise.constant(value), 50, rng, x)
        np.testing.assert_array_equal(out, noiseless)
