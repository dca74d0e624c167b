"""Data models for the SED hydrogen simulator."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import ValidationError

UINT64_MAX = 2**64 - 1

# Stream reserved for initial-condition variates; mode slots use stream_id = slot index.
INITIAL_CONDITION_STREAM = 2**63


class ForceTerm(str, Enum):
    COULOMB = "coulomb"
    RADIATION_REACTION = "radiation_reaction"
    FIELD_ELECTRIC = "field_electric"
    FIELD_MAGNETIC = "field_magnetic"


class FieldModel(str, Enum):
    NONE = "none"
    DIPOLE_1D = "dipole_1d"
    AXIAL_PLANE_WAVE = "axial_plane_wave"
    CIRCULAR_DRIVE = "circular_drive"
    HARMONIC_DRIVE = "harmonic_drive"


class CutoffKind(str, Enum):
    FIXED = "fixed"
    MOVING = "moving"


class IntegratorKind(str, Enum):
    FIXED_RK4 = "fixed_rk4"
    ADAPTIVE_RK4 = "adaptive_rk4"


def _frozen_vector(values) -> np.ndarray:
    vec = np.array(values, dtype=float).reshape(3)
    vec.setflags(write=False)
    return vec


@dataclass(frozen=True)
class State:
    """Electron phase-space point in atomic units.

    Attributes:
        t: Time (a.u.)
        r: Position 3-vector (a.u., Bohr radii)
        v: Velocity 3-vector (a.u.)
    """

    t: float
    r: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "r", _frozen_vector(self.r))
        object.__setattr__(self, "v", _frozen_vector(self.v))
        if not np.any(self.r):
            raise ValidationError("State position must not be the origin")

    @property
    def radius(self) -> float:
        return float(np.sqrt(self.r @ self.r))

    @classmethod
    def circular(cls, r0: float, Z: int = 1, phase: float = 0.0, t: float = 0.0) -> "State":
        """Circular orbit of radius ``r0`` in the xy-plane, counter-clockwise."""
        speed = np.sqrt(Z / r0)
        c, s = np.cos(phase), np.sin(phase)
        return cls(t=t, r=(r0 * c, r0 * s, 0.0), v=(-speed * s, speed * c, 0.0))


@dataclass(frozen=True)
class RngSpec:
    """Key of one counter-based random stream.

    Identical (seed, stream_id) yields an identical variate sequence on every
    platform: the pair is the 128-bit Philox key and the counter starts at zero.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= int(value) <= UINT64_MAX:
                raise ValidationError(f"RngSpec.{name} must be an unsigned 64-bit integer, got {value!r}")

    def stream(self, stream_id: int) -> "RngSpec":
        return RngSpec(seed=self.seed, stream_id=int(stream_id))

    def generator(self) -> np.random.Generator:
        key = (int(self.stream_id) << 64) | int(self.seed)
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class CutoffPolicy:
    """Frequency band policy for the synthesized field.

    Attributes:
        kind: fixed band or moving upper edge
        omega_min: Lower band edge for the fixed policy (a.u.)
        omega_max: Upper band edge for the fixed policy (a.u.)
        multiple: Upper edge as a multiple of the orbital frequency (moving)
        floor: Lowest allowed frequency / lower band edge (moving)
        ceiling: Highest allowed upper edge (moving)
    """

    kind: CutoffKind = CutoffKind.MOVING
    omega_min: float = 0.0
    omega_max: float = 2.5
    multiple: float = 2.5
    floor: float = 0.0
    ceiling: float = 25.0

    @property
    def grid_span(self) -> tuple[float, float]:
        """Frequency span covered by the mode grid."""
        if self.kind == CutoffKind.FIXED:
            return (self.omega_min, self.omega_max)
        return (self.floor, self.ceiling)


@dataclass(frozen=True)
class InitialCondition:
    """Initial electron state: explicit, circular(r0) or random_circular(r0)."""

    kind: str = "circular"
    r0: float = 1.0
    r: Optional[tuple[float, float, float]] = None
    v: Optional[tuple[float, float, float]] = None

    def __str__(self) -> str:
        if self.kind == "explicit":
            return ", ".join(repr(float(x)) for x in (*self.r, *self.v))
        return f"{self.kind}({self.r0!r})"


@dataclass(frozen=True)
class DiagnosticsConfig:
    """Recording, detector and histogram settings (scaled Bohr units)."""

    trace_stride: int = 1
    collapse_radius: float = 0.05
    ionization_threshold: float = -0.05
    ionization_dwell: float = 1.0e4
    critical_L: float = 0.588
    critical_L_energy_band: float = -0.1
    exclude_ionization: bool = True
    r_hist_max: float = 10.0
    r_bins: int = 200
    L_hist_max: float = 3.0
    L_bins: int = 150
    E_hist_min: float = -2.0
    E_bins: int = 200
    ecc_bins: int = 100


@dataclass(frozen=True)
class SimConfig:
    """Complete, immutable description of one simulation.

    Times ``dt_init``, ``dt_min`` and ``t_max`` are in Bohr-time units
    t0 = 1/Z^2 (a.u.); frequencies and radii are in atomic units.
    """

    Z: int = 1
    force_flags: frozenset = field(
        default_factory=lambda: frozenset({ForceTerm.COULOMB, ForceTerm.RADIATION_REACTION, ForceTerm.FIELD_ELECTRIC})
    )
    field_model: FieldModel = FieldModel.DIPOLE_1D
    cutoff: CutoffPolicy = field(default_factory=CutoffPolicy)
    integrator: IntegratorKind = IntegratorKind.FIXED_RK4
    steps_per_orbit: int = 4000
    field_updates_per_orbit: int = 10
    dt_init: float = 1.0e-3
    t_max: float = 1.0e3
    seed: int = 0
    initial_state: InitialCondition = field(default_factory=InitialCondition)
    n_modes: int = 1000
    planar: bool = False
    damping_omega: Optional[float] = None
    n_harmonics: int = 16
    tolerance: float = 1.0e-10
    dt_min: float = 1.0e-12
    singular_radius: float = 1.0e-3
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)

    def has(self, term: ForceTerm) -> bool:
        return term in self.force_flags

    @property
    def t0(self) -> float:
        """Bohr time in atomic units."""
        return 1.0 / self.Z**2

    @property
    def rng(self) -> RngSpec:
        return RngSpec(seed=self.seed)
