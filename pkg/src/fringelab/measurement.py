"""Measurement backends: operator taxonomy, weak screen, cavity tagging.

Two distinct readout families live here. Operators acting on the
center of mass multiply both branch amplitudes by a common factor and
leave the fringes alone; operators acting on internal freedoms couple
through a 2x2 table of matrix elements whose off-diagonal entries decide
whether the recorded signal keeps any fringe term at all. The weak
scattering screen and the photon-cavity path tag are the two concrete
detectors built on these rules, and coincidence_modulate is the pure
post-processing step that blends a joint histogram with its per-path
singles.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .analysis import FringeHistogram
from .composite import CompositeState, StateVector
from .montecarlo import sample_position, sampling_grid
from .wavefield import BeamSpec, MZGeometry, crossing_intensity

MEASUREMENT_MODES = ("center_of_mass", "internal")

OUTCOME_KINDS = ("scattered", "transmitted", "absorbed")


def _coerce_elements(elements) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
    rows = tuple(tuple(complex(v) for v in row) for row in elements)
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise ValueError("matrix_elements must be a 2x2 table")
    for row in rows:
        for v in row:
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError("matrix elements must be finite")
    return rows


@dataclass(frozen=True)
class MeasurementOperator:
    """A readout channel, either on the center of mass or internal space.

    center_of_mass mode uses com_factor, the single linear amplitude
    factor applied to both branches. internal mode uses internal_map,
    the post-measurement internal states (one per branch), together with
    matrix_elements[j][i], the amplitude for the detector to respond in
    channel j when branch i+1 was taken.
    """

    mode: str
    com_factor: complex = 1.0 + 0.0j
    internal_map: Optional[tuple[StateVector, StateVector]] = None
    matrix_elements: Optional[tuple[tuple[complex, complex], tuple[complex, complex]]] = None

    def __post_init__(self) -> None:
        if self.mode not in MEASUREMENT_MODES:
            raise ValueError(f"mode must be one of {MEASUREMENT_MODES}, got {self.mode!r}")
        factor = complex(self.com_factor)
        if not (math.isfinite(factor.real) and math.isfinite(factor.imag)):
            raise ValueError("com_factor must be finite")
        object.__setattr__(self, "com_factor", factor)
        if self.mode == "center_of_mass":
            if factor == 0:
                raise ValueError("com_factor must be nonzero in center_of_mass mode")
            return
        if self.internal_map is None or self.matrix_elements is None:
            raise ValueError("internal mode needs internal_map and matrix_elements")
        m1, m2 = self.internal_map
        if m1.dim != m2.dim:
            raise ValueError("mapped internal states must share a dimension")
        object.__setattr__(self, "internal_map", (m1, m2))
        object.__setattr__(self, "matrix_elements", _coerce_elements(self.matrix_elements))

    @classmethod
    def center_of_mass(cls, factor: complex) -> "MeasurementOperator":
        return cls("center_of_mass", com_factor=factor)

    @classmethod
    def internal(cls, mapped_states: tuple[StateVector, StateVector], elements) -> "MeasurementOperator":
        return cls("internal", internal_map=tuple(mapped_states), matrix_elements=elements)


def matrix_elements_from_operator(
    operator,
    originals: tuple[StateVector, StateVector],
    mapped: tuple[StateVector, StateVector],
) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
    """Tabulate g[j][i] = <original_j | operator | mapped_i>."""
    op = np.asarray(operator, dtype=complex)
    dim = originals[0].dim
    if op.shape != (dim, dim):
        raise ValueError(f"operator must be {dim}x{dim} for these states, got {op.shape}")
    rows = []
    for j in range(2):
        bra = originals[j].asarray()
        rows.append(tuple(complex(np.vdot(bra, op @ mapped[i].asarray())) for i in range(2)))
    return _coerce_elements(rows)


def apply_measurement(op: MeasurementOperator, state: CompositeState) -> CompositeState:
    """State after the readout acted once.

    center_of_mass: both branch amplitudes gain the factor, internal
    states untouched. internal: branch internal states are replaced by
    the mapped states, amplitudes untouched.
    """
    b1, b2 = state.branches
    if op.mode == "center_of_mass":
        factor = op.com_factor

        def scaled(amp):
            def amplitude(x):
                return factor * np.asarray(amp(x))

            return amplitude

        new = (replace(b1, com_amplitude=scaled(b1.com_amplitude)),
               replace(b2, com_amplitude=scaled(b2.com_amplitude)))
    else:
        m1, m2 = op.internal_map
        new = (replace(b1, internal=m1), replace(b2, internal=m2))
    return CompositeState(new, state.pattern_convention)


def measured_signal(op: MeasurementOperator, state: CompositeState, x):
    """Detector response profile on screen coordinate x.

    center_of_mass mode ignores internal and detector freedoms entirely:
    |A|^2 (|psi1|^2 + |psi2|^2 + 2 Re psi1* psi2). internal mode weights
    each quadratic form with its matrix element,
    Re[g11 |psi1|^2 + g22 |psi2|^2 + psi1* psi2 g12 + psi1 psi2* g21],
    so zero cross elements kill the fringe term identically. The
    branches' extra dephasing offsets ride along on the cross terms.
    """
    b1, b2 = state.branches
    psi1 = np.asarray(b1.com_amplitude(x))
    psi2 = np.asarray(b2.com_amplitude(x))
    relative = cmath.exp(1j * (b2.extra_phase - b1.extra_phase))
    p12 = np.conj(psi1) * psi2 * relative
    if op.mode == "center_of_mass":
        scale = abs(op.com_factor) ** 2
        out = scale * (np.abs(psi1) ** 2 + np.abs(psi2) ** 2 + 2.0 * np.real(p12))
    else:
        g = op.matrix_elements
        total = (g[0][0] * np.abs(psi1) ** 2 + g[1][1] * np.abs(psi2) ** 2
                 + g[0][1] * p12 + g[1][0] * np.conj(p12))
        out = np.real(total)
    return out if out.shape else float(out)


@dataclass(frozen=True)
class WeakScreen:
    """Thin scattering film: transmit, weakly scatter, or absorb."""

    transmittance: float = 0.99
    scatter_fraction: float = 0.01

    def __post_init__(self) -> None:
        t, s = float(self.transmittance), float(self.scatter_fraction)
        if not (0.0 <= t <= 1.0 and 0.0 <= s <= 1.0):
            raise ValueError(f"transmittance and scatter_fraction must lie in [0, 1], got {t!r}, {s!r}")
        if t + s > 1.0 + 1e-12:
            raise ValueError(f"transmittance + scatter_fraction must not exceed 1, got {t + s!r}")
        object.__setattr__(self, "transmittance", t)
        object.__setattr__(self, "scatter_fraction", s)

    @property
    def absorb_fraction(self) -> float:
        return max(0.0, 1.0 - self.transmittance - self.scatter_fraction)


@dataclass(frozen=True)
class ScreenOutcome:
    """Result of one particle meeting the weak screen."""

    kind: str
    x: Optional[float] = None
    y: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in OUTCOME_KINDS:
            raise ValueError(f"kind must be one of {OUTCOME_KINDS}, got {self.kind!r}")
        has_point = self.x is not None and self.y is not None
        if (self.kind == "scattered") != has_point:
            raise ValueError("scattered outcomes carry (x, y); others carry neither")


def midline_profile(mz: MZGeometry, beam: BeamSpec, n_cells: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """Sampling grid and intensity along the screen's horizontal midline."""
    region = mz.crossing_region
    positions = sampling_grid(region.x_min, region.x_max, n_cells)
    weights = np.asarray(crossing_intensity(mz, beam, positions, region.midline_y))
    return positions, weights


def weak_screen_interact(
    screen: WeakScreen,
    mz: MZGeometry,
    beam: BeamSpec,
    rng: np.random.Generator,
    midline: tuple[np.ndarray, np.ndarray] | None = None,
) -> ScreenOutcome:
    """One particle crossing the screen.

    Consumes one uniform to classify (scatter band first, then
    transmission, remainder absorbed). A scattered particle consumes two
    more to place its flash along the midline of the crossing region,
    proportional to the local intensity there. Callers in a tight loop
    can pass the precomputed midline (positions, weights) pair.
    """
    u = rng.random()
    if u < screen.scatter_fraction:
        if midline is None:
            midline = midline_profile(mz, beam)
        positions, weights = midline
        x = sample_position(positions, weights, rng)
        return ScreenOutcome("scattered", x=x, y=mz.crossing_region.midline_y)
    if u < screen.scatter_fraction + screen.transmittance:
        return ScreenOutcome("transmitted")
    return ScreenOutcome("absorbed")


@dataclass(frozen=True)
class WhichWayRecord:
    """Photon counts left in the path-tagging cavities by one particle."""

    cavity1_photons: int
    cavity2_photons: int
    single_cavity_mode: bool = False

    def __post_init__(self) -> None:
        for name, v in (("cavity1_photons", self.cavity1_photons), ("cavity2_photons", self.cavity2_photons)):
            if v not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1, got {v!r}")
        total = self.cavity1_photons + self.cavity2_photons
        if total > 1:
            raise ValueError("at most one photon per particle")
        if not self.single_cavity_mode and total != 1:
            raise ValueError("two-cavity mode must record exactly one photon")

    @property
    def inferred_path(self) -> int:
        """Path the record certifies; zero photons tags path 2 when only
        path 1 carries a cavity."""
        if self.cavity1_photons == 1:
            return 1
        if self.cavity2_photons == 1:
            return 2
        return 2


def micromaser_record(
    slit_probabilities: tuple[float, float],
    single_cavity: bool,
    rng: np.random.Generator,
) -> WhichWayRecord:
    """Sample the traversed slit and deposit the photon accordingly.

    Two-cavity mode puts one photon in the traversed slit's cavity.
    Single-cavity mode covers only slit 1, so a slit-2 traversal leaves
    both counts zero and the path is inferred from the absence.
    Consumes exactly one uniform.
    """
    p1, p2 = (float(p) for p in slit_probabilities)
    if not (math.isfinite(p1) and math.isfinite(p2)) or p1 < 0 or p2 < 0 or abs(p1 + p2 - 1.0) > 1e-9:
        raise ValueError(f"slit probabilities must be nonnegative and sum to 1, got ({p1!r}, {p2!r})")
    slit = 1 if rng.random() < p1 else 2
    if single_cavity:
        return WhichWayRecord(1 if slit == 1 else 0, 0, single_cavity_mode=True)
    return WhichWayRecord(1 if slit == 1 else 0, 1 if slit == 2 else 0)


def coincidence_modulate(
    joint: FringeHistogram,
    single1: FringeHistogram,
    single2: FringeHistogram,
    gamma: float,
) -> FringeHistogram:
    """Blend the joint histogram with its per-path singles.

    Returns single1 + single2 + gamma * (joint - single1 - single2)
    bin for bin. gamma = 0 keeps only the incoherent sum of the singles,
    gamma = 1 reproduces the joint histogram; on integer counts both
    endpoints are exact. This is pure arithmetic on already-recorded
    data; no particle is touched. Statistical noise can push a strongly
    anti-weighted bin slightly below zero; such bins are floored at 0.
    """
    gamma = float(gamma)
    if not -1.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [-1, 1], got {gamma!r}")
    if not (joint.same_binning(single1) and joint.same_binning(single2)):
        raise ValueError("joint and singles histograms must share identical binning")
    singles_total = single1.total + single2.total
    allowance = 5.0 * math.sqrt(joint.total + 1.0)
    if singles_total > joint.total + allowance:
        raise ValueError(
            f"singles total {singles_total} exceeds joint total {joint.total} beyond statistical noise"
        )
    base = single1.counts + single2.counts
    blended = np.maximum(base + gamma * (joint.counts - base), 0.0)
    return FringeHistogram(joint.bin_edges, blended)
