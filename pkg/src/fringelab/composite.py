"""Composite path states: center-of-mass amplitude times internal and detector factors.

A particle heading through the two-slit bench is carried here as a pair of
branches, one per path. Each branch holds a complex center-of-mass
amplitude profile on the screen, an internal state vector (electronic or
motional degrees of freedom of the particle itself), a detector state
vector (whatever the path information got written into), and an extra
scalar phase used to model slow environmental dephasing.

The observable screen pattern of the superposition is

    |psi1|^2 + |psi2|^2
      + 2 Re[ <int1|int2> <det1|det2> conj(psi1) psi2 e^{i(phase2-phase1)} ]

so any orthogonality between internal or detector factors suppresses the
cross term, and random extra phases wash it out on ensemble average.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .wavefield import TWO_PI, BeamSpec, TwoSlitGeometry, slit_envelope, transport_phase

NORM_TOLERANCE = 1e-9

PATTERN_CONVENTIONS = ("literal", "measurement_mediated")


@dataclass(frozen=True)
class StateVector:
    """Unit vector in a small finite-dimensional complex space."""

    components: tuple[complex, ...]

    def __post_init__(self) -> None:
        comps = tuple(complex(c) for c in self.components)
        if not comps:
            raise ValueError("state vector needs at least one component")
        for c in comps:
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("state vector components must be finite")
        norm = math.sqrt(sum(abs(c) ** 2 for c in comps))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"state vector norm must be 1 within {NORM_TOLERANCE}, got {norm!r}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def normalize(cls, components) -> "StateVector":
        comps = [complex(c) for c in components]
        norm = math.sqrt(sum(abs(c) ** 2 for c in comps))
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(tuple(c / norm for c in comps))

    @property
    def dim(self) -> int:
        return len(self.components)

    def asarray(self) -> np.ndarray:
        return np.array(self.components, dtype=complex)


#: One-dimensional placeholder for a degree of freedom the bench does not use.
TRIVIAL_STATE = StateVector((1.0 + 0.0j,))


def inner(a: StateVector, b: StateVector) -> complex:
    """Hermitian inner product, conjugate-linear in the first argument."""
    if a.dim != b.dim:
        raise ValueError(f"state dimensions differ: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.asarray(), b.asarray()))


def overlap_pair(magnitude: float, phase: float = 0.0, dim: int = 2) -> tuple[StateVector, StateVector]:
    """Two unit vectors whose inner product is magnitude * e^{i phase}.

    The first vector is the first basis state; the second tilts away from
    it just enough to realize the requested overlap. magnitude must lie
    in [0, 1]; dim >= 2 unless magnitude is 1, where one dimension works.
    """
    if not (0.0 <= magnitude <= 1.0):
        raise ValueError(f"overlap magnitude must lie in [0, 1], got {magnitude!r}")
    if not math.isfinite(phase):
        raise ValueError("overlap phase must be finite")
    if dim < 2:
        raise ValueError("overlap_pair needs dim >= 2")
    first = [0.0 + 0.0j] * dim
    first[0] = 1.0 + 0.0j
    second = [0.0 + 0.0j] * dim
    second[0] = magnitude * cmath.exp(1j * phase)
    second[1] = math.sqrt(max(0.0, 1.0 - magnitude * magnitude)) + 0.0j
    return StateVector(tuple(first)), StateVector.normalize(second)


@dataclass(frozen=True)
class Branch:
    """One path through the bench."""

    path_id: int
    com_amplitude: Callable[..., np.ndarray]
    internal: StateVector
    detector: StateVector
    extra_phase: float = 0.0

    def __post_init__(self) -> None:
        if self.path_id not in (1, 2):
            raise ValueError(f"path_id must be 1 or 2, got {self.path_id!r}")
        if not callable(self.com_amplitude):
            raise ValueError("com_amplitude must be callable")
        if not math.isfinite(self.extra_phase):
            raise ValueError("extra_phase must be finite")


@dataclass(frozen=True)
class CompositeState:
    """Two-branch superposition with a declared pattern convention.

    ``pattern_convention`` records how the screen pattern is to be read
    out downstream: "literal" squares the full composite state, so
    orthogonal internal or detector factors erase the fringes;
    "measurement_mediated" defers to an explicit measurement operator
    acting on the state.
    """

    branches: tuple[Branch, Branch]
    pattern_convention: str = "literal"

    def __post_init__(self) -> None:
        if len(self.branches) != 2:
            raise ValueError("composite state needs exactly two branches")
        b1, b2 = self.branches
        if (b1.path_id, b2.path_id) != (1, 2):
            raise ValueError(f"branches must carry path ids (1, 2) in order, got ({b1.path_id}, {b2.path_id})")
        if b1.internal.dim != b2.internal.dim:
            raise ValueError("internal state dimensions differ between branches")
        if b1.detector.dim != b2.detector.dim:
            raise ValueError("detector state dimensions differ between branches")
        if self.pattern_convention not in PATTERN_CONVENTIONS:
            raise ValueError(f"unknown pattern convention {self.pattern_convention!r}")

    @property
    def branch1(self) -> Branch:
        return self.branches[0]

    @property
    def branch2(self) -> Branch:
        return self.branches[1]

    def overlap_product(self) -> complex:
        """<int1|int2> <det1|det2>, the cross-term suppression factor."""
        b1, b2 = self.branches
        return inner(b1.internal, b2.internal) * inner(b1.detector, b2.detector)


def slit_branch_amplitude(
    geometry: TwoSlitGeometry,
    beam: BeamSpec,
    slit: int,
    include_envelope: bool = True,
) -> Callable[..., np.ndarray]:
    """Center-of-mass amplitude function for one slit.

    With the envelope included this is the physical far-field profile
    envelope(x) * amp * e^{i phase(x)}. With include_envelope=False the
    modulus is held flat, which isolates the interference algebra from
    diffraction; useful when checking visibility laws exactly.
    """
    if slit not in (1, 2):
        raise ValueError(f"slit must be 1 or 2, got {slit!r}")
    amp = geometry.slit_amplitudes[slit - 1]

    def amplitude(x):
        phase = np.asarray(transport_phase(geometry, beam, slit, x))
        wave = amp * np.exp(1j * phase)
        if include_envelope:
            wave = np.asarray(slit_envelope(geometry, beam, x)) * wave
        return wave

    return amplitude


def two_slit_composite(
    geometry: TwoSlitGeometry,
    beam: BeamSpec,
    internal: tuple[StateVector, StateVector] = (TRIVIAL_STATE, TRIVIAL_STATE),
    detector: tuple[StateVector, StateVector] = (TRIVIAL_STATE, TRIVIAL_STATE),
    pattern_convention: str = "literal",
    include_envelope: bool = True,
) -> CompositeState:
    """Composite state of a particle crossing the two-slit bench."""
    b1 = Branch(1, slit_branch_amplitude(geometry, beam, 1, include_envelope), internal[0], detector[0])
    b2 = Branch(2, slit_branch_amplitude(geometry, beam, 2, include_envelope), internal[1], detector[1])
    return CompositeState((b1, b2), pattern_convention)


def pattern_terms(state: CompositeState, x) -> tuple[np.ndarray, np.ndarray]:
    """Baseline and complex cross profile of the screen pattern.

    Returns (base, cross) with base = |psi1|^2 + |psi2|^2 and
    cross = overlap_product * conj(psi1) * psi2, both evaluated on x and
    excluding the branches' extra phases. Every pattern in this module is
    affine in the extra-phase factor: base + 2 Re(cross * e^{i dphase}).
    """
    b1, b2 = state.branches
    psi1 = np.asarray(b1.com_amplitude(x))
    psi2 = np.asarray(b2.com_amplitude(x))
    base = np.abs(psi1) ** 2 + np.abs(psi2) ** 2
    cross = state.overlap_product() * np.conj(psi1) * psi2
    return base, cross


def literal_pattern(state: CompositeState, x) -> np.ndarray:
    """Screen pattern from squaring the composite state directly.

    Internal and detector overlaps multiply the cross term, so which-way
    records stored in orthogonal states remove the fringes identically.
    """
    b1, b2 = state.branches
    base, cross = pattern_terms(state, x)
    relative = cmath.exp(1j * (b2.extra_phase - b1.extra_phase))
    return base + 2.0 * np.real(cross * relative)


@dataclass(frozen=True)
class PhaseNoise:
    """Random extra phase applied to the branches of a composite state.

    Distributions: "none" leaves the state alone, "constant" pins both
    branch phases to ``value``, "uniform" draws from [low, high), and
    "gaussian" draws from a centered normal with width ``sigma``. With
    independent_per_branch each branch gets its own draw (branch 1 first);
    otherwise one shared draw shifts both, which cancels in every pattern.
    """

    distribution: str = "none"
    independent_per_branch: bool = True
    value: float = 0.0
    low: float = 0.0
    high: float = TWO_PI
    sigma: float = 0.0

    def __post_init__(self) -> None:
        if self.distribution not in ("none", "constant", "uniform", "gaussian"):
            raise ValueError(f"unknown noise distribution {self.distribution!r}")
        for v in (self.value, self.low, self.high, self.sigma):
            if not math.isfinite(v):
                raise ValueError("noise parameters must be finite")
        if self.distribution == "uniform" and not self.low < self.high:
            raise ValueError(f"uniform noise requires low < high, got [{self.low}, {self.high})")
        if self.distribution == "gaussian" and self.sigma < 0.0:
            raise ValueError("gaussian noise width must be nonnegative")

    @classmethod
    def none(cls) -> "PhaseNoise":
        return cls("none")

    @classmethod
    def constant(cls, value: float) -> "PhaseNoise":
        return cls("constant", value=value)

    @classmethod
    def uniform(cls, low: float = 0.0, high: float = TWO_PI, independent_per_branch: bool = True) -> "PhaseNoise":
        return cls("uniform", independent_per_branch=independent_per_branch, low=low, high=high)

    @classmethod
    def gaussian(cls, sigma: float, independent_per_branch: bool = True) -> "PhaseNoise":
        return cls("gaussian", independent_per_branch=independent_per_branch, sigma=sigma)

    def draw(self, rng: np.random.Generator, size=None):
        """Sample phase offsets; the same sampler dephase() consumes."""
        if self.distribution == "none":
            return 0.0 if size is None else np.zeros(size)
        if self.distribution == "constant":
            if size is None:
                return self.value
            return np.full(size, self.value)
        if self.distribution == "uniform":
            return rng.uniform(self.low, self.high, size)
        return rng.normal(0.0, self.sigma, size)

    def mean_phase_factor(self) -> complex:
        """Exact expectation of e^{i offset} under this distribution."""
        if self.distribution == "none":
            return 1.0 + 0.0j
        if self.distribution == "constant":
            return cmath.exp(1j * self.value)
        if self.distribution == "uniform":
            width = self.high - self.low
            return (cmath.exp(1j * self.high) - cmath.exp(1j * self.low)) / (1j * width)
        return complex(math.exp(-0.5 * self.sigma * self.sigma))

    def cross_phase_factor(self) -> complex:
        """Exact expectation of e^{i(offset2 - offset1)} for the cross term.

        Independent branch draws factorize into conj(m) * m = |m|^2 with
        m the mean phase factor; a shared draw cancels to exactly 1.
        """
        if self.distribution in ("none", "constant"):
            return 1.0 + 0.0j
        if not self.independent_per_branch:
            return 1.0 + 0.0j
        m = self.mean_phase_factor()
        return m.conjugate() * m


def dephase(state: CompositeState, noise: PhaseNoise, rng: np.random.Generator) -> CompositeState:
    """Copy of the state with freshly drawn extra phases.

    "none" returns the input unchanged and consumes no randomness;
    "constant" sets both branch phases to the configured value, also
    without consuming randomness. Random distributions draw branch 1
    first, then branch 2 (or a single shared value).
    """
    if noise.distribution == "none":
        return state
    if noise.distribution == "constant":
        d1 = d2 = noise.value
    elif noise.independent_per_branch:
        d1 = float(noise.draw(rng))
        d2 = float(noise.draw(rng))
    else:
        d1 = d2 = float(noise.draw(rng))
    b1, b2 = state.branches
    return CompositeState(
        (replace(b1, extra_phase=d1), replace(b2, extra_phase=d2)),
        state.pattern_convention,
    )


def noise_averaged_pattern(state: CompositeState, noise: PhaseNoise, x) -> np.ndarray:
    """Exact expectation of the screen pattern under the noise distribution.

    Any extra phases already on the branches are disregarded: like
    dephase(), the noise replaces them. Because the pattern is affine in
    e^{i(d2-d1)}, plugging the distribution's exact cross factor into the
    cross term gives the infinite-ensemble average in closed form, which
    is also the exact marginal position density of a particle whose
    phases are drawn fresh from the noise.
    """
    base, cross = pattern_terms(state, x)
    return base + 2.0 * np.real(cross * noise.cross_phase_factor())


def ensemble_pattern(
    state: CompositeState,
    noise: PhaseNoise,
    n_draws: int,
    rng: np.random.Generator,
    x,
) -> np.ndarray:
    """Average screen pattern over n_draws dephased copies of the state.

    The pattern is affine in the per-copy phase factor e^{i(d2-d1)}, so
    averaging that factor over the draws and evaluating once is the exact
    profile average, just without the n_draws-fold grid evaluation.
    Draws come in two blocks (all branch-1 offsets, then all branch-2)
    for the independent case, one block when shared.
    """
    if n_draws < 1:
        raise ValueError(f"ensemble_pattern needs n_draws >= 1, got {n_draws}")
    base, cross = pattern_terms(state, x)
    if noise.distribution in ("none", "constant"):
        factor = 1.0 + 0.0j
    elif noise.independent_per_branch:
        d1 = noise.draw(rng, n_draws)
        d2 = noise.draw(rng, n_draws)
        factor = complex(np.mean(np.exp(1j * (d2 - d1))))
    else:
        noise.draw(rng, n_draws)
        factor = 1.0 + 0.0j
    return base + 2.0 * np.real(cross * factor)
