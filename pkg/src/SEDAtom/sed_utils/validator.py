"""Configuration validation logic."""

import math

from .models import (
    UINT64_MAX,
    CutoffKind,
    FieldModel,
    ForceTerm,
    IntegratorKind,
    SimConfig,
)

FIELD_FORCES = {ForceTerm.FIELD_ELECTRIC, ForceTerm.FIELD_MAGNETIC}


def _positive(value: float) -> bool:
    return math.isfinite(value) and value > 0.0


def _validate_physics(config: SimConfig) -> list[str]:
    """Validate nuclear charge, force flags and singular radius."""
    errors = []

    if not isinstance(config.Z, int) or config.Z < 1:
        errors.append(f"physics.Z must be an integer >= 1, got {config.Z!r}")

    if not config.force_flags:
        errors.append("physics.forces must name at least one force term")

    if not config.singular_radius >= 0.0:
        errors.append(f"physics.singular_radius must be non-negative, got {config.singular_radius}")

    return errors


def _validate_field(config: SimConfig) -> list[str]:
    """Validate the field model against the force flags and initial state."""
    errors = []

    field_forces = FIELD_FORCES & set(config.force_flags)
    if config.field_model == FieldModel.NONE and field_forces:
        names = ", ".join(sorted(t.value for t in field_forces))
        errors.append(f"physics.forces includes {names} but field.model is none")

    if ForceTerm.FIELD_MAGNETIC in config.force_flags and config.field_model != FieldModel.AXIAL_PLANE_WAVE:
        errors.append("field_magnetic needs field.model axial_plane_wave (dipole models have B = 0)")

    if config.n_modes < 2:
        errors.append(f"field.n_modes must be at least 2, got {config.n_modes}")

    if config.damping_omega is not None and not _positive(config.damping_omega):
        errors.append(f"field.damping_omega must be positive when set, got {config.damping_omega}")

    if config.field_model == FieldModel.CIRCULAR_DRIVE and config.initial_state.kind == "explicit":
        errors.append("field.model circular_drive requires a circular(r0) or random_circular(r0) initial state")

    if config.field_model == FieldModel.HARMONIC_DRIVE:
        if config.n_harmonics < 1:
            errors.append(f"field.n_harmonics must be at least 1, got {config.n_harmonics}")
        initial = config.initial_state
        if initial.kind == "explicit" and initial.r is not None and initial.v is not None:
            radius = math.sqrt(sum(x * x for x in initial.r))
            energy = 0.5 * sum(x * x for x in initial.v) - config.Z / radius if radius > 0 else math.inf
            if not energy < 0.0:
                errors.append("field.model harmonic_drive requires a bound initial orbit (negative energy)")

    if config.planar and config.field_model == FieldModel.AXIAL_PLANE_WAVE:
        errors.append("field.planar applies to dipole_1d only (the axial model is already in-plane)")

    return errors


def _validate_cutoff(config: SimConfig) -> list[str]:
    """Validate band edges of the active cutoff policy."""
    errors = []
    cutoff = config.cutoff

    if config.field_model in (FieldModel.NONE, FieldModel.CIRCULAR_DRIVE, FieldModel.HARMONIC_DRIVE):
        return errors

    if cutoff.kind == CutoffKind.FIXED:
        if not 0.0 <= cutoff.omega_min < cutoff.omega_max:
            errors.append(
                f"cutoff.omega_min ({cutoff.omega_min}) must be >= 0 and below cutoff.omega_max ({cutoff.omega_max})"
            )
    else:
        if not cutoff.multiple > 1.0:
            errors.append(f"cutoff.multiple must be greater than 1, got {cutoff.multiple}")
        if not 0.0 <= cutoff.floor < cutoff.ceiling:
            errors.append(f"cutoff.floor ({cutoff.floor}) must be >= 0 and below cutoff.ceiling ({cutoff.ceiling})")

    return errors


def _validate_integrator(config: SimConfig) -> list[str]:
    """Validate step and field-update cadence."""
    errors = []

    if config.field_updates_per_orbit < 1:
        errors.append(f"integrator.field_updates_per_orbit must be >= 1, got {config.field_updates_per_orbit}")

    if config.steps_per_orbit < 2 * config.field_updates_per_orbit:
        errors.append(
            f"integrator.steps_per_orbit ({config.steps_per_orbit}) must be at least twice "
            f"integrator.field_updates_per_orbit ({config.field_updates_per_orbit})"
        )

    if config.integrator == IntegratorKind.ADAPTIVE_RK4:
        if not _positive(config.tolerance):
            errors.append(f"integrator.tolerance must be positive, got {config.tolerance}")
        if not _positive(config.dt_init):
            errors.append(f"integrator.dt_init must be positive, got {config.dt_init}")
        if not 0.0 <= config.dt_min < config.dt_init:
            errors.append(f"integrator.dt_min ({config.dt_min}) must be >= 0 and below integrator.dt_init")

    return errors


def _validate_run(config: SimConfig) -> list[str]:
    """Validate duration, seed and initial state."""
    errors = []

    if not _positive(config.t_max):
        errors.append(f"run.t_max must be positive, got {config.t_max}")

    if not isinstance(config.seed, int) or not 0 <= config.seed <= UINT64_MAX:
        errors.append(f"run.seed must be an unsigned 64-bit integer, got {config.seed!r}")

    initial = config.initial_state
    if initial.kind in ("circular", "random_circular"):
        if not _positive(initial.r0):
            errors.append(f"run.initial_state radius must be positive, got {initial.r0}")
        elif initial.r0 <= config.singular_radius:
            errors.append(f"run.initial_state radius {initial.r0} lies inside physics.singular_radius")
    elif initial.kind == "explicit":
        if initial.r is None or initial.v is None:
            errors.append("run.initial_state needs both position and velocity")
        elif math.sqrt(sum(x * x for x in initial.r)) <= config.singular_radius:
            errors.append("run.initial_state position lies inside physics.singular_radius")
    else:
        errors.append(f"Unknown initial state kind '{initial.kind}'")

    return errors


def _validate_diagnostics(config: SimConfig) -> list[str]:
    """Validate recording and histogram settings."""
    errors = []
    diagnostics = config.diagnostics

    if diagnostics.trace_stride < 1:
        errors.append(f"diagnostics.trace_stride must be >= 1, got {diagnostics.trace_stride}")

    if not _positive(diagnostics.ionization_dwell):
        errors.append(f"diagnostics.ionization_dwell must be positive, got {diagnostics.ionization_dwell}")

    if not diagnostics.collapse_radius >= 0.0:
        errors.append(f"diagnostics.collapse_radius must be non-negative, got {diagnostics.collapse_radius}")

    for name in ("r_hist_max", "L_hist_max", "critical_L"):
        if not _positive(getattr(diagnostics, name)):
            errors.append(f"diagnostics.{name} must be positive, got {getattr(diagnostics, name)}")

    if not diagnostics.E_hist_min < 0.0:
        errors.append(f"diagnostics.E_hist_min must be negative, got {diagnostics.E_hist_min}")

    for name in ("r_bins", "L_bins", "E_bins", "ecc_bins"):
        if getattr(diagnostics, name) < 1:
            errors.append(f"diagnostics.{name} must be >= 1, got {getattr(diagnostics, name)}")

    return errors


def validate_config(config: SimConfig) -> list[str]:
    """Validate a complete simulation configuration.

    Args:
        config: Configuration to check

    Returns:
        List of validation error messages. Empty list means valid.
    """
    errors = []
    errors.extend(_validate_physics(config))
    errors.extend(_validate_field(config))
    errors.extend(_validate_cutoff(config))
    errors.extend(_validate_integrator(config))
    errors.extend(_validate_run(config))
    errors.extend(_validate_diagnostics(config))
    return errors
