"""Building blocks of the SED hydrogen simulator."""
## Units and configuration, zero-point field synthesis, the Abraham-Lorentz
## equation of motion with its integrators, Kepler orbit analysis and the
## quantum-mechanical reference quantities.
from .errors import (
    CacheRangeError,
    ConfigError,
    KeplerConvergenceError,
    OutputError,
    PhysicsError,
    SEDError,
    SingularityError,
    SnapshotError,
    StiffnessError,
    ValidationError,
)
from .models import (
    CutoffKind,
    CutoffPolicy,
    DiagnosticsConfig,
    FieldModel,
    ForceTerm,
    InitialCondition,
    IntegratorKind,
    RngSpec,
    SimConfig,
    State,
)
from .units import CONSTANTS, Constants, from_si, scaled_report, to_si, unscaled
from .field import (
    FieldCache,
    FieldSample,
    Mode,
    ModeSet,
    analytic_band_energy,
    apply_moving_cutoff,
    autocorrelation_oracle,
    cache_eval,
    circular_drive_modes,
    eval_field,
    field_statistics,
    harmonic_drive_modes,
    make_cache,
    sample_modes,
    spectral_density,
)
from .dynamics import ForceBreakdown, adaptive_step, coulomb_force, lorentz_force, make_accel_fn, rk4_step, rr_force_approx, total_accel
from .orbits import OrbitElements, elements_from_state, kepler_propagate, kepler_radial_cdf, kepler_radial_density, orbit_radius
from .quantum import degeneracy, energy_level, ground_state_distribution, ground_state_radial_density, mean_radius, radial_cdf
from .parser import CONFIG_KEYS, config_help, dump_config, load_config, load_config_text, parse_initial_state, parse_override
from .validator import validate_config
from .snapshot import dump_modes, load_modes

__all__ = [
    "SEDError",
    "ConfigError",
    "ValidationError",
    "PhysicsError",
    "SingularityError",
    "StiffnessError",
    "KeplerConvergenceError",
    "CacheRangeError",
    "SnapshotError",
    "OutputError",
    "CutoffKind",
    "CutoffPolicy",
    "DiagnosticsConfig",
    "FieldModel",
    "ForceTerm",
    "InitialCondition",
    "IntegratorKind",
    "RngSpec",
    "SimConfig",
    "State",
    "CONSTANTS",
    "Constants",
    "to_si",
    "from_si",
    "scaled_report",
    "unscaled",
    "Mode",
    "ModeSet",
    "FieldSample",
    "FieldCache",
    "spectral_density",
    "analytic_band_energy",
    "autocorrelation_oracle",
    "sample_modes",
    "circular_drive_modes",
    "harmonic_drive_modes",
    "apply_moving_cutoff",
    "eval_field",
    "make_cache",
    "cache_eval",
    "field_statistics",
    "ForceBreakdown",
    "coulomb_force",
    "rr_force_approx",
    "lorentz_force",
    "total_accel",
    "make_accel_fn",
    "rk4_step",
    "adaptive_step",
    "OrbitElements",
    "elements_from_state",
    "orbit_radius",
    "kepler_propagate",
    "kepler_radial_cdf",
    "kepler_radial_density",
    "ground_state_radial_density",
    "radial_cdf",
    "ground_state_distribution",
    "mean_radius",
    "energy_level",
    "degeneracy",
    "CONFIG_KEYS",
    "config_help",
    "load_config",
    "load_config_text",
    "parse_override",
    "parse_initial_state",
    "dump_config",
    "validate_config",
    "dump_modes",
    "load_modes",
]

__version__ = "0.1.0"
