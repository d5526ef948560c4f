"""Full experiment runs: a configuration in, an event log out.

Each scenario samples its terminal records from the analytic intensity
layer. Draw accounting is fixed so runs are reproducible: every event
consumes a documented number of uniforms from its stream, and the
vectorized fast paths consume the stream in exactly the same order as
the equivalent per-event loop over the scalar operations.

Per-event uniforms by scenario family:

* plain screen scenarios: (cell, jitter)
* cavity-tagged screen scenarios: (slit tag, cell, jitter)
* interferometer port scenarios: (port)
* weak-screen runs: (classify), then (cell, jitter) when scattered or
  (port) when transmitted; absorbed particles end after one draw and
  leave no record, so those runs can log fewer events than particles.
"""

from __future__ import annotations

import numpy as np

from .composite import CompositeState, noise_averaged_pattern, overlap_pair, two_slit_composite
from .config import CAVITY_SCENARIOS, MZ_SCENARIOS, ExperimentConfig, config_digest
from .measurement import WhichWayRecord, measured_signal, midline_profile, weak_screen_interact
from .montecarlo import DetectionEvent, EventLog, RngStream, sample_positions, sampling_grid
from .wavefield import TwoSlitGeometry, mz_port_intensity

#: Cells in the inverse-CDF sampling grid across the screen.
SAMPLING_CELLS = 4096


def composite_from_config(config: ExperimentConfig, include_envelope: bool = True) -> CompositeState:
    """The two-branch state a screen scenario propagates."""
    if not isinstance(config.geometry, TwoSlitGeometry):
        raise ValueError(f"scenario {config.scenario} has no two-slit composite state")
    internal = overlap_pair(config.internal_overlap, config.internal_overlap_phase)
    detector = overlap_pair(config.detector_overlap, config.detector_overlap_phase)
    return two_slit_composite(
        config.geometry, config.beam, internal, detector,
        config.pattern_convention, include_envelope,
    )


def pattern_profile(config: ExperimentConfig, x, include_envelope: bool = True) -> np.ndarray:
    """Position density (unnormalized) that screen events are drawn from.

    Under the literal convention this is the noise-averaged squared
    modulus of the composite state, overlap suppression included. Under
    the measurement_mediated convention it is the configured operator's
    recorded signal, which ignores internal and detector overlaps.
    """
    state = composite_from_config(config, include_envelope)
    if config.pattern_convention == "measurement_mediated":
        return np.asarray(measured_signal(config.measurement, state, x))
    return np.asarray(noise_averaged_pattern(state, config.noise, x))


def slit_probabilities(geometry: TwoSlitGeometry) -> tuple[float, float]:
    """Traversal probabilities proportional to the squared slit amplitudes."""
    w1 = abs(geometry.slit_amplitudes[0]) ** 2
    w2 = abs(geometry.slit_amplitudes[1]) ** 2
    total = w1 + w2
    if not total > 0:
        raise ValueError("slit amplitudes cannot both vanish")
    return w1 / total, w2 / total


def fringe_window(config: ExperimentConfig) -> tuple[int, tuple[float, float]] | None:
    """Estimator-friendly binning for a two-slit config's screen events.

    65 bins over |x| <= 2P + P/32, P the fringe period. The bin width is
    P/16 and the half-bin overhang places every fringe extremum at a bin
    center, so the histogram carries the full peak and trough amplitudes
    instead of splitting them across two bins. Returns None for
    interferometer configs, which have no screen fringes to bin.
    """
    if not isinstance(config.geometry, TwoSlitGeometry):
        return None
    g = config.geometry
    period = config.beam.wavelength * g.screen_distance / g.slit_separation
    half = 2.0 * period + period / 32.0
    return 65, (-half, half)


def _screen_grid(config: ExperimentConfig) -> np.ndarray:
    grid = config.geometry.screen_grid
    return sampling_grid(grid.x_min, grid.x_max, SAMPLING_CELLS)


def _append_screen_events(events: list, config: ExperimentConfig, n: int, rng, stream_id: int) -> None:
    grid = _screen_grid(config)
    profile = pattern_profile(config, grid)
    name = config.scenario
    for x in sample_positions(grid, profile, rng, n).tolist():
        events.append(DetectionEvent(len(events), name, screen_x=x, stream_id=stream_id))


def _append_tagged_events(events: list, config: ExperimentConfig, n: int, rng, stream_id: int) -> None:
    """Cavity scenarios: a slit tag, then a position conditioned per the
    pattern convention.

    literal: the tagged particle's position follows its own slit's
    single-slit profile, so the marginal over tags is the fringeless
    two-slit sum. measurement_mediated: positions follow the recorded
    fringe signal independent of the tag. The uniforms consumed per
    event are (tag, cell, jitter) either way, identical to composing
    micromaser_record with sample_position.
    """
    grid = _screen_grid(config)
    state = composite_from_config(config)
    p1, _ = slit_probabilities(config.geometry)
    if config.pattern_convention == "measurement_mediated":
        profile = np.asarray(measured_signal(config.measurement, state, grid))
        cdf1 = cdf2 = np.cumsum(profile)
    else:
        b1, b2 = state.branches
        cdf1 = np.cumsum(np.abs(np.asarray(b1.com_amplitude(grid))) ** 2)
        cdf2 = np.cumsum(np.abs(np.asarray(b2.com_amplitude(grid))) ** 2)
    if not (cdf1[-1] > 0 and cdf2[-1] > 0):
        raise ValueError("sampling profile must have positive total weight")
    draws = rng.random((n, 3))
    through1 = draws[:, 0] < p1
    idx = np.where(
        through1,
        np.searchsorted(cdf1, draws[:, 1] * cdf1[-1], side="right"),
        np.searchsorted(cdf2, draws[:, 1] * cdf2[-1], side="right"),
    )
    idx = np.minimum(idx, grid.size - 1)
    width = grid[1] - grid[0]
    xs = grid[idx] + (draws[:, 2] - 0.5) * width
    name = config.scenario
    single = config.single_cavity
    for x, tag1 in zip(xs.tolist(), through1.tolist()):
        if single:
            record = WhichWayRecord(1 if tag1 else 0, 0, single_cavity_mode=True)
        else:
            record = WhichWayRecord(1 if tag1 else 0, 0 if tag1 else 1)
        events.append(DetectionEvent(len(events), name, screen_x=x, whichway=record, stream_id=stream_id))


def _port_x_fraction(config: ExperimentConfig) -> float:
    ix = mz_port_intensity(config.geometry, config.beam, "x")
    iy = mz_port_intensity(config.geometry, config.beam, "y")
    return ix / (ix + iy)


def _append_port_events(events: list, config: ExperimentConfig, n: int, rng, stream_id: int) -> None:
    px = _port_x_fraction(config)
    name = config.scenario
    for u in rng.random(n).tolist():
        port = "x" if u < px else "y"
        events.append(DetectionEvent(len(events), name, mz_port=port, stream_id=stream_id))


def _append_weak_screen_events(events: list, config: ExperimentConfig, n: int, rng, stream_id: int) -> None:
    mz, beam, screen = config.geometry, config.beam, config.weak_screen
    midline = midline_profile(mz, beam, SAMPLING_CELLS)
    px = _port_x_fraction(config)
    name = config.scenario
    for _ in range(n):
        outcome = weak_screen_interact(screen, mz, beam, rng, midline)
        if outcome.kind == "scattered":
            events.append(DetectionEvent(
                len(events), name, scatter_xy=(outcome.x, outcome.y), stream_id=stream_id,
            ))
        elif outcome.kind == "transmitted":
            port = "x" if rng.random() < px else "y"
            events.append(DetectionEvent(len(events), name, mz_port=port, stream_id=stream_id))


def _generate(events: list, config: ExperimentConfig, n: int, rng, stream_id: int) -> None:
    if config.scenario == "mz_weak_screen":
        _append_weak_screen_events(events, config, n, rng, stream_id)
    elif config.scenario in MZ_SCENARIOS:
        _append_port_events(events, config, n, rng, stream_id)
    elif config.scenario in CAVITY_SCENARIOS:
        _append_tagged_events(events, config, n, rng, stream_id)
    else:
        _append_screen_events(events, config, n, rng, stream_id)


def run_experiment(config: ExperimentConfig, n_events: int, seed: int, n_streams: int = 1) -> EventLog:
    """Simulate n_events particles and log their terminal records.

    Deterministic given (config, n_events, seed, n_streams): stream s
    draws from the generator keyed (seed, s), streams are concatenated
    in stream order, and event ids are assigned densely across the
    merged log. n_events counts particles sent in; only the weak-screen
    scenario can absorb a particle without a record, every other
    scenario logs exactly one event per particle.
    """
    if n_events < 1:
        raise ValueError(f"n_events must be at least 1, got {n_events}")
    if n_streams < 1:
        raise ValueError(f"n_streams must be at least 1, got {n_streams}")
    base, remainder = divmod(n_events, n_streams)
    events: list[DetectionEvent] = []
    for stream_id in range(n_streams):
        chunk = base + (1 if stream_id < remainder else 0)
        if chunk == 0:
            continue
        rng = RngStream(seed, stream_id).generator()
        _generate(events, config, chunk, rng, stream_id)
    return EventLog(tuple(events), config_digest(config))
