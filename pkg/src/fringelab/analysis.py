"""Histogramming and fringe metrics for detection-event logs.

Everything here is a pure function over immutable values. Metrics that
can legitimately fail on fringeless data (visibility, spacing, which-way
distinguishability) return a MetricValue whose value is None and whose
flag says why, rather than raising: a washed-out pattern is a physical
outcome, not an analysis error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

if TYPE_CHECKING:
    from .montecarlo import EventLog

#: Slack added to the V^2 + D^2 <= 1 bound to absorb estimator noise.
DUALITY_HEADROOM = 0.02

HISTOGRAM_FIELDS = ("screen_x", "scatter_projection")


@dataclass(frozen=True)
class FringeHistogram:
    """Fixed-width binned counts plus how many samples fell outside."""

    bin_edges: np.ndarray
    counts: np.ndarray
    n_dropped: int = 0

    def __post_init__(self) -> None:
        edges = np.array(self.bin_edges, dtype=float)
        counts = np.array(self.counts, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise ValueError("bin_edges must be a 1-D array of at least two edges")
        if not np.all(np.isfinite(edges)):
            raise ValueError("bin_edges must be finite")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin_edges must be strictly increasing")
        if counts.ndim != 1 or counts.size != edges.size - 1:
            raise ValueError(f"need {edges.size - 1} counts for {edges.size} edges, got {counts.size}")
        if not np.all(np.isfinite(counts)):
            raise ValueError("counts must be finite")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        if self.n_dropped < 0:
            raise ValueError("n_dropped must be nonnegative")
        edges.flags.writeable = False
        counts.flags.writeable = False
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_values(cls, values, n_bins: int, value_range: tuple[float, float]) -> "FringeHistogram":
        lo, hi = float(value_range[0]), float(value_range[1])
        if n_bins < 2:
            raise ValueError(f"need at least 2 bins, got {n_bins}")
        if not lo < hi:
            raise ValueError(f"empty histogram range [{lo}, {hi}]")
        values = np.asarray(values, dtype=float)
        counts, edges = np.histogram(values, bins=n_bins, range=(lo, hi))
        return cls(edges, counts.astype(float), n_dropped=int(values.size - counts.sum()))

    @property
    def n_bins(self) -> int:
        return self.counts.size

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def same_binning(self, other: "FringeHistogram") -> bool:
        return self.bin_edges.size == other.bin_edges.size and bool(
            np.array_equal(self.bin_edges, other.bin_edges)
        )

    def __add__(self, other: "FringeHistogram") -> "FringeHistogram":
        if not self.same_binning(other):
            raise ValueError("cannot add histograms with different binning")
        return FringeHistogram(self.bin_edges, self.counts + other.counts, self.n_dropped + other.n_dropped)


def scatter_projection(event) -> float:
    """Screen-line coordinate of a scatter event: the x of its (x, y)."""
    return float(event.scatter_xy[0])


def histogram(
    log: "EventLog",
    field: str,
    n_bins: int,
    value_range: tuple[float, float],
) -> FringeHistogram:
    """Bin one coordinate field of an event log.

    field is "screen_x" or "scatter_projection"; events that do not carry
    the field are ignored, events carrying it but falling outside
    value_range are dropped and counted in n_dropped.
    """
    if field not in HISTOGRAM_FIELDS:
        raise ValueError(f"unknown histogram field {field!r}; expected one of {HISTOGRAM_FIELDS}")
    if field == "screen_x":
        values = [e.screen_x for e in log.events if e.screen_x is not None]
    else:
        values = [scatter_projection(e) for e in log.events if e.scatter_xy is not None]
    if not values:
        raise ValueError(f"event log has no events with field {field!r}")
    return FringeHistogram.from_values(values, n_bins, value_range)


@dataclass(frozen=True)
class MetricValue:
    """A metric that may be undefined, with the reason in flag."""

    value: Optional[float]
    flag: str = ""

    @property
    def present(self) -> bool:
        return self.value is not None


def smooth3(counts: np.ndarray) -> np.ndarray:
    """3-bin boxcar; the two edge bins keep their raw values."""
    s = np.asarray(counts, dtype=float).copy()
    if s.size >= 3:
        s[1:-1] = (s[:-2] + s[1:-1] + s[2:]) / 3.0
    return s


def local_extrema(smoothed: np.ndarray) -> tuple[list[int], list[int]]:
    """Interior local maxima and minima of a profile.

    A maximum satisfies s[i] > s[i-1] and s[i] >= s[i+1] (ties resolved
    toward the lower index); minima mirror the rule. The first and last
    bins are never extrema.
    """
    maxima: list[int] = []
    minima: list[int] = []
    for i in range(1, len(smoothed) - 1):
        if smoothed[i] > smoothed[i - 1] and smoothed[i] >= smoothed[i + 1]:
            maxima.append(i)
        if smoothed[i] < smoothed[i - 1] and smoothed[i] <= smoothed[i + 1]:
            minima.append(i)
    return maxima, minima


def visibility(h: FringeHistogram, window: tuple[float, float] | None = None) -> MetricValue:
    """Fringe contrast (Imax - Imin)/(Imax + Imin) from detected extrema.

    Extrema are located on the 3-bin smoothed profile; the averaged
    levels Imax and Imin are taken from the raw bin values at those
    positions, restricted to bins whose centers lie inside window (the
    whole histogram when window is None). Fewer than three extrema in
    the window means there is no fringe structure to rate, so the result
    is flagged "insufficient fringes" instead of being a number.
    """
    smoothed = smooth3(h.counts)
    maxima, minima = local_extrema(smoothed)
    if window is not None:
        lo, hi = window
        centers = h.bin_centers()
        maxima = [i for i in maxima if lo <= centers[i] <= hi]
        minima = [i for i in minima if lo <= centers[i] <= hi]
    if len(maxima) + len(minima) < 3 or not maxima or not minima:
        return MetricValue(None, "insufficient fringes")
    i_max = float(np.mean(h.counts[maxima]))
    i_min = float(np.mean(h.counts[minima]))
    if i_max + i_min <= 0.0:
        return MetricValue(None, "insufficient fringes")
    return MetricValue(max(0.0, (i_max - i_min) / (i_max + i_min)))


def fringe_spacing(h: FringeHistogram) -> MetricValue:
    """Mean center-to-center distance between adjacent detected maxima."""
    maxima, _ = local_extrema(smooth3(h.counts))
    if len(maxima) < 2:
        return MetricValue(None, "insufficient maxima")
    centers = h.bin_centers()
    return MetricValue(float(np.mean(np.diff(centers[maxima]))))


def profile_visibility(values) -> float:
    """(max - min)/(max + min) of an analytic profile on a grid."""
    values = np.asarray(values, dtype=float)
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise ValueError("profile must be a nonempty finite array")
    if np.any(values < 0):
        raise ValueError("profile values must be nonnegative")
    v_max = float(values.max())
    v_min = float(values.min())
    if v_max + v_min == 0.0:
        raise ValueError("profile is identically zero")
    return (v_max - v_min) / (v_max + v_min)


def distinguishability(log: "EventLog") -> MetricValue:
    """Fraction of which-way records that pin down the path.

    A two-cavity record with exactly one photon determines the path; a
    single-cavity record determines it either way, because zero photons
    certifies the uncovered slit. Logs whose events carry no which-way
    records at all (no recording mechanism was configured) get a flagged
    null rather than a number.
    """
    records = [e.whichway for e in log.events if e.whichway is not None]
    if not records:
        return MetricValue(None, "no which-way records")
    determined = 0
    for r in records:
        total = r.cavity1_photons + r.cavity2_photons
        if total == 1 or (r.single_cavity_mode and total == 0):
            determined += 1
    return MetricValue(determined / len(records))


def overlap_distinguishability(c: float) -> float:
    """Path knowledge sqrt(1 - c^2) stored by detector states of overlap c."""
    c = float(c)
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"detector overlap must lie in [0, 1], got {c!r}")
    return math.sqrt(1.0 - c * c)


@dataclass(frozen=True)
class DualityResult:
    lhs: float
    satisfied: bool


def duality_check(v: float, d: float) -> DualityResult:
    """Evaluate V^2 + D^2 against 1 with statistical headroom."""
    lhs = float(v) * float(v) + float(d) * float(d)
    return DualityResult(lhs, lhs <= 1.0 + DUALITY_HEADROOM)


@dataclass(frozen=True)
class FringeMetrics:
    """The metric bundle the analyze command reports."""

    visibility: MetricValue
    fringe_spacing: MetricValue
    distinguishability: MetricValue
    duality: Optional[DualityResult] = None


def compute_metrics(h: FringeHistogram, log: "EventLog", window: tuple[float, float] | None = None) -> FringeMetrics:
    v = visibility(h, window)
    spacing = fringe_spacing(h)
    d = distinguishability(log)
    duality = duality_check(v.value, d.value) if v.present and d.present else None
    return FringeMetrics(v, spacing, d, duality)
