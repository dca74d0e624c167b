# =============================================================================
# Trajectory Diagnostics for SEDAtom
# =============================================================================
# This module centralizes everything computed from recorded trajectories:
#   - Trace recording with stride decimation: Trace.record()
#   - Time-weighted histograms and pooling: WeightedHistogram, radial_histogram()
#   - Event detectors: detect_collapse(), detect_ionization(), critical_L_monitor()
#   - Distance to a reference distribution: ks_distance()
#
# Traces hold atomic units. Detectors and histograms take the nuclear charge Z
# and work in scaled Bohr units (E/Z^2, Z r, t Z^2), so thresholds are the same
# for every Z.
# =============================================================================

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Iterator, Optional, Union

import numpy as np
import pandas as pd

from .sed_utils.errors import ValidationError
from .sed_utils.models import DiagnosticsConfig, State
from .sed_utils.orbits import OrbitElements

TRACE_COLUMNS = ("t", "r", "E", "L", "ecc", "dt")
_T, _R, _E, _L, _ECC, _DT = range(len(TRACE_COLUMNS))


# -------------------------------------------------------------------------
# Trace recording
# -------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceRow:
    """One recorded sample (atomic units).

    Attributes:
        t: Time of the sample
        r: Distance from the nucleus
        E: Osculating energy
        L: Angular momentum magnitude
        ecc: Eccentricity
        dt: Time weight carried by the sample (> 0)
    """

    t: float
    r: float
    E: float
    L: float
    ecc: float
    dt: float

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValidationError(f"Trace row weight must be positive, got {self.dt}")


class Trace:
    """Time-ordered, optionally decimated sequence of trace rows.

    With ``stride`` > 1 every group of ``stride`` consecutive samples becomes
    one row: the values of the group's first sample and the summed weight of
    the group. Histograms built from the trace keep the total time exactly.
    """

    def __init__(self, stride: int = 1, capacity: int = 1024):
        if stride < 1:
            raise ValidationError(f"Trace stride must be >= 1, got {stride}")
        self.stride = int(stride)
        self._data = np.empty((max(capacity, 1), len(TRACE_COLUMNS)))
        self._size = 0
        self._pending: Optional[np.ndarray] = None
        self._pending_count = 0
        self._last_t = -math.inf

    def __len__(self) -> int:
        return self._size

    @property
    def pending_count(self) -> int:
        return self._pending_count

    @property
    def last_time(self) -> float:
        return self._last_t

    def _push(self, values: np.ndarray) -> None:
        if self._size == self._data.shape[0]:
            grown = np.empty((2 * self._data.shape[0], len(TRACE_COLUMNS)))
            grown[: self._size] = self._data[: self._size]
            self._data = grown
        self._data[self._size] = values
        self._size += 1

    def append(self, row: TraceRow) -> "Trace":
        """Add one sample; raises ValidationError if time does not increase."""
        if not row.t > self._last_t:
            raise ValidationError(f"Trace time must increase: got t={row.t!r} after t={self._last_t!r}")
        self._last_t = row.t
        values = np.array([row.t, row.r, row.E, row.L, row.ecc, row.dt])

        if self.stride == 1:
            self._push(values)
            return self
        if self._pending is None:
            self._pending = values
        else:
            self._pending[_DT] += row.dt
        self._pending_count += 1
        if self._pending_count == self.stride:
            self.flush()
        return self

    def record(self, state: State, elements: OrbitElements, dt: float) -> "Trace":
        """Record ``state`` and its osculating ``elements`` with time weight ``dt``."""
        return self.append(
            TraceRow(
                t=state.t,
                r=state.radius,
                E=elements.energy,
                L=elements.L_norm,
                ecc=elements.eccentricity,
                dt=dt,
            )
        )

    def flush(self) -> "Trace":
        """Emit a partially filled decimation group."""
        if self._pending is not None:
            self._push(self._pending)
            self._pending = None
            self._pending_count = 0
        return self

    @property
    def array(self) -> np.ndarray:
        """Read-only (rows, 6) view of completed rows."""
        view = self._data[: self._size].view()
        view.flags.writeable = False
        return view

    def column(self, name: str) -> np.ndarray:
        return self.array[:, TRACE_COLUMNS.index(name)]

    def rows(self) -> Iterator[TraceRow]:
        for values in self.array:
            yield TraceRow(*(float(v) for v in values))

    @property
    def total_time(self) -> float:
        return float(self.column("dt").sum())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(np.array(self.array), columns=list(TRACE_COLUMNS))

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "Trace":
        """Build a trace from a table with columns t, r, E, L, ecc, dt."""
        missing = [c for c in TRACE_COLUMNS if c not in frame.columns]
        if missing:
            raise ValidationError(f"Trace table is missing columns: {', '.join(missing)}")
        data = frame[list(TRACE_COLUMNS)].to_numpy(dtype=float)
        return cls.from_array(data)

    @classmethod
    def from_array(cls, data: np.ndarray) -> "Trace":
        data = np.asarray(data, dtype=float).reshape(-1, len(TRACE_COLUMNS))
        if data.shape[0] and not np.all(data[:, _DT] > 0.0):
            raise ValidationError("Trace row weights must be positive")
        if np.any(np.diff(data[:, _T]) <= 0.0):
            raise ValidationError("Trace times must be strictly increasing")
        trace = cls(stride=1, capacity=data.shape[0])
        trace._data[: data.shape[0]] = data
        trace._size = data.shape[0]
        if data.shape[0]:
            trace._last_t = float(data[-1, _T])
        return trace

    def snapshot_arrays(self) -> tuple[dict, dict[str, np.ndarray]]:
        """Metadata and arrays that :meth:`restore` turns back into an identical trace."""
        meta = {"stride": self.stride, "pending_count": self._pending_count, "last_t": self._last_t}
        arrays = {"trace.rows": np.array(self.array)}
        if self._pending is not None:
            arrays["trace.pending"] = self._pending.copy()
        return meta, arrays

    @classmethod
    def restore(cls, meta: dict, arrays: dict[str, np.ndarray]) -> "Trace":
        rows = np.asarray(arrays["trace.rows"], dtype=float).reshape(-1, len(TRACE_COLUMNS))
        trace = cls(stride=int(meta["stride"]), capacity=max(1024, rows.shape[0]))
        trace._data[: rows.shape[0]] = rows
        trace._size = rows.shape[0]
        trace._last_t = float(meta["last_t"])
        trace._pending_count = int(meta["pending_count"])
        if "trace.pending" in arrays:
            trace._pending = np.array(arrays["trace.pending"], dtype=float)
        return trace


TraceLike = Union[Trace, pd.DataFrame]


def _as_array(trace: TraceLike) -> np.ndarray:
    if isinstance(trace, Trace):
        return trace.array
    if isinstance(trace, pd.DataFrame):
        return trace[list(TRACE_COLUMNS)].to_numpy(dtype=float)
    raise ValidationError(f"Expected a Trace or DataFrame, got {type(trace).__name__}")


# -------------------------------------------------------------------------
# Time-weighted histograms
# -------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightedHistogram:
    """Histogram whose bins accumulate time weight instead of sample counts.

    Attributes:
        edges: Ascending bin edges
        mass: Accumulated weight per bin
        total_weight: Sum of ``mass``
    """

    edges: np.ndarray
    mass: np.ndarray
    total_weight: float

    @staticmethod
    def _check_edges(edges) -> np.ndarray:
        edges = np.asarray(edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or not np.all(np.diff(edges) > 0.0):
            raise ValidationError("Histogram edges must be a strictly ascending sequence of at least 2 values")
        return edges

    @classmethod
    def empty(cls, edges) -> "WeightedHistogram":
        edges = cls._check_edges(edges)
        return cls(edges=edges, mass=np.zeros(edges.size - 1), total_weight=0.0)

    @classmethod
    def from_samples(cls, values, weights, edges) -> "WeightedHistogram":
        """Accumulate ``weights`` at ``values``; samples outside the edges are not counted."""
        edges = cls._check_edges(edges)
        values = np.asarray(values, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if values.shape != weights.shape:
            raise ValidationError("Histogram values and weights must have the same shape")
        if values.size == 0:
            return cls.empty(edges)
        mass, _ = np.histogram(values, bins=edges, weights=weights)
        return cls(edges=edges, mass=mass, total_weight=float(mass.sum()))

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def normalized(self) -> np.ndarray:
        """Fraction of the total weight per bin."""
        if self.total_weight == 0.0:
            return np.zeros_like(self.mass)
        return self.mass / self.total_weight

    def density(self) -> np.ndarray:
        """Probability density per unit of the binned quantity; integrates to 1."""
        return self.normalized() / self.widths

    def merge(self, other: "WeightedHistogram") -> "WeightedHistogram":
        if not np.array_equal(self.edges, other.edges):
            raise ValidationError("Cannot merge histograms with different edges")
        mass = self.mass + other.mass
        return WeightedHistogram(edges=self.edges, mass=mass, total_weight=float(mass.sum()))

    def cdf_at_edges(self) -> np.ndarray:
        if self.total_weight == 0.0:
            raise ValidationError("Histogram has zero total weight")
        return np.concatenate([[0.0], np.cumsum(self.mass)]) / self.total_weight

    def cdf(self) -> Callable:
        """Empirical CDF, exact at the edges and linear within bins."""
        edges, values = self.edges, self.cdf_at_edges()
        return lambda x: np.interp(x, edges, values)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "edge_lo": self.edges[:-1],
                "edge_hi": self.edges[1:],
                "density": self.density(),
                "mass": self.mass,
            }
        )


def radial_histogram(
    traces: Union[TraceLike, Iterable[TraceLike]],
    edges,
    column: str = "r",
    scale: float = 1.0,
    until: Optional[float] = None,
) -> WeightedHistogram:
    """Pool time-weighted rows of one or many traces into a histogram.

    Args:
        traces: A trace or an iterable of traces (Trace or DataFrame)
        edges: Ascending bin edges in the scaled quantity
        column: Trace column to bin ("r", "E", "L" or "ecc")
        scale: Factor applied to the column before binning (Z for radii)
        until: Only rows with t < until are used

    Returns:
        Pooled WeightedHistogram; merge order follows the input order.
    """
    if column not in TRACE_COLUMNS[1:5]:
        raise ValidationError(f"Cannot histogram trace column '{column}'")
    if isinstance(traces, (Trace, pd.DataFrame)):
        traces = [traces]
    traces = list(traces)
    if not traces:
        raise ValidationError("radial_histogram needs at least one trace")

    index = TRACE_COLUMNS.index(column)
    pooled = WeightedHistogram.empty(edges)
    for trace in traces:
        data = _as_array(trace)
        if until is not None:
            data = data[data[:, _T] < until]
        pooled = pooled.merge(WeightedHistogram.from_samples(data[:, index] * scale, data[:, _DT], pooled.edges))
    return pooled


def histogram_edges(diagnostics: DiagnosticsConfig) -> dict[str, np.ndarray]:
    """Bin edges of the per-run histograms (scaled units)."""
    return {
        "r": np.linspace(0.0, diagnostics.r_hist_max, diagnostics.r_bins + 1),
        "L": np.linspace(0.0, diagnostics.L_hist_max, diagnostics.L_bins + 1),
        "E": np.linspace(diagnostics.E_hist_min, 0.0, diagnostics.E_bins + 1),
        "ecc": np.linspace(0.0, 1.0, diagnostics.ecc_bins + 1),
    }


def trace_histograms(
    traces: Union[TraceLike, Iterable[TraceLike]],
    Z: int,
    diagnostics: DiagnosticsConfig,
    until: Optional[float] = None,
) -> dict[str, WeightedHistogram]:
    """Radius, angular momentum, energy and eccentricity histograms in scaled units."""
    if isinstance(traces, (Trace, pd.DataFrame)):
        traces = [traces]
    traces = list(traces)
    scales = {"r": float(Z), "L": 1.0, "E": 1.0 / Z**2, "ecc": 1.0}
    return {
        name: radial_histogram(traces, edges, column=name, scale=scales[name], until=until)
        for name, edges in histogram_edges(diagnostics).items()
    }


def weighted_percentiles(values, weights, percentiles=(5, 25, 50, 75, 95)) -> dict[str, float]:
    """Time-weighted percentiles (midpoint rule on the sorted samples)."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.size == 0 or not weights.sum() > 0.0:
        raise ValidationError("Weighted percentiles need samples with positive total weight")
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order]
    cumulative = (np.cumsum(weights) - 0.5 * weights) / weights.sum()
    return {f"p{int(q)}": float(np.interp(q / 100.0, cumulative, values)) for q in percentiles}


# -------------------------------------------------------------------------
# Detectors
# -------------------------------------------------------------------------

class VerdictKind(str, Enum):
    COLLAPSE = "collapse"
    IONIZATION = "ionization"
    CRITICAL_L = "critical_L"
    NONE = "none"


@dataclass(frozen=True)
class DetectorVerdict:
    """Outcome of one detector; ``t_event`` is set exactly when something fired."""

    kind: VerdictKind
    t_event: Optional[float] = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.kind == VerdictKind.NONE) != (self.t_event is None):
            raise ValidationError("DetectorVerdict.t_event must be set if and only if the detector fired")

    @property
    def fired(self) -> bool:
        return self.kind != VerdictKind.NONE

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "t_event": self.t_event, "details": dict(self.details)}


class CollapseMonitor:
    """Fires at the first sample with scaled radius Z r below ``r_min``."""

    def __init__(self, r_min: float = 0.05, Z: int = 1):
        self.r_min = r_min
        self.Z = Z
        self.t_event: Optional[float] = None

    def update(self, t: float, r: float) -> bool:
        if self.t_event is None and self.Z * r < self.r_min:
            self.t_event = t
            return True
        return False

    def verdict(self) -> DetectorVerdict:
        kind = VerdictKind.NONE if self.t_event is None else VerdictKind.COLLAPSE
        return DetectorVerdict(kind, self.t_event, {"r_min": self.r_min, "Z": self.Z})

    def state_dict(self) -> dict:
        return {"t_event": self.t_event}

    def load_state(self, state: dict) -> None:
        self.t_event = state["t_event"]


class IonizationMonitor:
    """Fires at the first time T such that every sample in [T, T + dwell] has scaled E above ``threshold``.

    ``dwell`` is in Bohr times t0 = 1/Z^2; samples carry atomic-unit times.
    """

    def __init__(self, threshold: float = -0.05, dwell: float = 1.0e7, Z: int = 1):
        self.threshold = threshold
        self.dwell = dwell
        self.Z = Z
        self._dwell_au = dwell / Z**2
        self.run_start: Optional[float] = None
        self.t_event: Optional[float] = None

    def update(self, t: float, E: float) -> bool:
        if self.t_event is not None:
            return False
        if E / self.Z**2 > self.threshold:
            if self.run_start is None:
                self.run_start = t
            if t - self.run_start >= self._dwell_au:
                self.t_event = self.run_start
                return True
        else:
            self.run_start = None
        return False

    def verdict(self) -> DetectorVerdict:
        kind = VerdictKind.NONE if self.t_event is None else VerdictKind.IONIZATION
        return DetectorVerdict(kind, self.t_event, {"threshold": self.threshold, "dwell": self.dwell, "Z": self.Z})

    def state_dict(self) -> dict:
        return {"run_start": self.run_start, "t_event": self.t_event}

    def load_state(self, state: dict) -> None:
        self.run_start = state["run_start"]
        self.t_event = state["t_event"]


class CriticalLMonitor:
    """Tracks time spent below ``L_crit`` and flags it while scaled E is above ``energy_band``."""

    def __init__(self, L_crit: float = 0.588, energy_band: float = -0.1, Z: int = 1):
        self.L_crit = L_crit
        self.energy_band = energy_band
        self.Z = Z
        self.total_time = 0.0
        self.below_time = 0.0
        self.flagged_time = 0.0
        self.intervals = 0
        self.in_interval = False
        self.t_event: Optional[float] = None

    def update(self, t: float, E: float, L: float, dt: float) -> bool:
        self.total_time += dt
        flagged = False
        if L < self.L_crit:
            self.below_time += dt
            flagged = E / self.Z**2 > self.energy_band
        if flagged:
            self.flagged_time += dt
            if not self.in_interval:
                self.intervals += 1
            if self.t_event is None:
                self.t_event = t
        self.in_interval = flagged
        return flagged

    @property
    def fraction(self) -> float:
        return self.below_time / self.total_time if self.total_time > 0.0 else 0.0

    def verdict(self) -> DetectorVerdict:
        kind = VerdictKind.NONE if self.t_event is None else VerdictKind.CRITICAL_L
        details = {
            "L_crit": self.L_crit,
            "energy_band": self.energy_band,
            "Z": self.Z,
            "fraction_below": self.fraction,
            "flagged_fraction": self.flagged_time / self.total_time if self.total_time > 0.0 else 0.0,
            "intervals": self.intervals,
        }
        return DetectorVerdict(kind, self.t_event, details)

    def state_dict(self) -> dict:
        return {
            "total_time": self.total_time,
            "below_time": self.below_time,
            "flagged_time": self.flagged_time,
            "intervals": self.intervals,
            "in_interval": self.in_interval,
            "t_event": self.t_event,
        }

    def load_state(self, state: dict) -> None:
        for name, value in state.items():
            setattr(self, name, value)


def detect_collapse(trace: TraceLike, r_min: float = 0.05, Z: int = 1) -> DetectorVerdict:
    """First time the scaled radius drops below ``r_min``."""
    monitor = CollapseMonitor(r_min=r_min, Z=Z)
    for row in _as_array(trace):
        if monitor.update(row[_T], row[_R]):
            break
    return monitor.verdict()


def detect_ionization(trace: TraceLike, threshold: float = -0.05, dwell: float = 1.0e7, Z: int = 1) -> DetectorVerdict:
    """First time T from which scaled E stays above ``threshold`` for ``dwell`` Bohr times."""
    monitor = IonizationMonitor(threshold=threshold, dwell=dwell, Z=Z)
    for row in _as_array(trace):
        if monitor.update(row[_T], row[_E]):
            break
    return monitor.verdict()


def critical_L_monitor(trace: TraceLike, L_crit: float = 0.588, energy_band: float = -0.1, Z: int = 1) -> DetectorVerdict:
    """Flag low angular momentum at near-zero energy; always reports the fraction of time below ``L_crit``."""
    monitor = CriticalLMonitor(L_crit=L_crit, energy_band=energy_band, Z=Z)
    for row in _as_array(trace):
        monitor.update(row[_T], row[_E], row[_L], row[_DT])
    return monitor.verdict()


def trace_verdicts(trace: TraceLike, Z: int, diagnostics: DiagnosticsConfig) -> list[DetectorVerdict]:
    """Collapse, ionization and critical-L verdicts of an existing trace."""
    return [
        detect_collapse(trace, r_min=diagnostics.collapse_radius, Z=Z),
        detect_ionization(
            trace, threshold=diagnostics.ionization_threshold, dwell=diagnostics.ionization_dwell, Z=Z
        ),
        critical_L_monitor(
            trace, L_crit=diagnostics.critical_L, energy_band=diagnostics.critical_L_energy_band, Z=Z
        ),
    ]


# -------------------------------------------------------------------------
# Distribution distance
# -------------------------------------------------------------------------

def ks_distance(hist: WeightedHistogram, reference_cdf: Callable) -> float:
    """Sup-norm distance between the histogram's CDF and ``reference_cdf`` at the bin edges.

    Raises:
        ValidationError: If the histogram has zero total weight
    """
    empirical = hist.cdf_at_edges()
    reference = np.asarray(reference_cdf(hist.edges), dtype=float)
    return float(np.max(np.abs(empirical - reference)))
