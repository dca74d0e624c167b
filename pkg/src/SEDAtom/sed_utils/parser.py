"""Configuration parsing: strictyaml schema, ``key=value`` overrides and the config echo."""

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

import strictyaml
from strictyaml import Bool, CommaSeparated, EmptyNone, Enum, Float, Int, Map, Str

from .errors import ConfigError, ValidationError
from .models import (
    CutoffKind,
    CutoffPolicy,
    DiagnosticsConfig,
    FieldModel,
    ForceTerm,
    InitialCondition,
    IntegratorKind,
    SimConfig,
)
from .validator import validate_config

SECTIONS = ("physics", "field", "cutoff", "integrator", "run", "diagnostics")

_NAMED_STATE = re.compile(r"^\s*(circular|random_circular)\(\s*([^()]+?)\s*\)\s*$")


def parse_initial_state(text: str) -> InitialCondition:
    """Parse ``circular(r0)``, ``random_circular(r0)`` or ``x, y, z, vx, vy, vz``.

    Raises:
        ConfigError: If the text matches none of the forms
    """
    match = _NAMED_STATE.match(text)
    try:
        if match:
            return InitialCondition(kind=match.group(1), r0=float(match.group(2)))
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise ConfigError(f"Invalid initial state '{text}'") from None
    if len(values) != 6:
        raise ConfigError(
            f"Invalid initial state '{text}': expected circular(r0), random_circular(r0) "
            "or six comma-separated numbers x, y, z, vx, vy, vz"
        )
    return InitialCondition(kind="explicit", r=tuple(values[:3]), v=tuple(values[3:]))


def _float_text(value: float) -> str:
    return repr(float(value))


def _bool_text(value: bool) -> str:
    return "true" if value else "false"


def _enum_text(value) -> str:
    return value.value


def _forces_text(flags) -> str:
    return ", ".join(term.value for term in ForceTerm if term in flags)


def _forces_model(values: list[str]) -> frozenset:
    return frozenset(ForceTerm(v) for v in values)


def _optional_float(value: Optional[float]) -> Optional[float]:
    return None if value is None else float(value)


@dataclass(frozen=True)
class ConfigKey:
    """One documented configuration key.

    Attributes:
        section: YAML section the key lives in
        name: Key name inside the section
        target: SimConfig attribute, dotted for nested objects (e.g. "cutoff.kind")
        validator: strictyaml validator for the raw value
        description: Help text shown by ``--help``
        to_model: Converts the parsed YAML value to the model value
        to_text: Renders the model value for the config echo
    """

    section: str
    name: str
    target: str
    validator: Any
    description: str
    to_model: Callable = lambda value: value
    to_text: Callable = str

    @property
    def dotted(self) -> str:
        return f"{self.section}.{self.name}"


def _float_key(section: str, name: str, target: str, description: str) -> ConfigKey:
    return ConfigKey(section, name, target, Float(), description, float, _float_text)


def _int_key(section: str, name: str, target: str, description: str) -> ConfigKey:
    return ConfigKey(section, name, target, Int(), description, int, str)


def _bool_key(section: str, name: str, target: str, description: str) -> ConfigKey:
    return ConfigKey(section, name, target, Bool(), description, bool, _bool_text)


def _enum_key(section: str, name: str, target: str, enum_cls, description: str) -> ConfigKey:
    return ConfigKey(section, name, target, Enum([e.value for e in enum_cls]), description, enum_cls, _enum_text)


_KEYS = (
    # physics
    _int_key("physics", "Z", "Z", "Nuclear charge (integer >= 1)"),
    ConfigKey(
        "physics",
        "forces",
        "force_flags",
        CommaSeparated(Enum([t.value for t in ForceTerm])),
        "Comma-separated force terms: coulomb, radiation_reaction, field_electric, field_magnetic",
        _forces_model,
        _forces_text,
    ),
    _float_key("physics", "singular_radius", "singular_radius", "Radius (a.u.) below which the Coulomb singularity aborts the run"),
    # field
    _enum_key("field", "model", "field_model", FieldModel, "Field model: none, dipole_1d, axial_plane_wave, circular_drive, harmonic_drive"),
    _int_key("field", "n_modes", "n_modes", "Frequency slots across the mode grid (>= 2)"),
    _bool_key("field", "planar", "planar", "Drop the z-polarized dipole component"),
    _int_key("field", "n_harmonics", "n_harmonics", "Orbital harmonics summed by the harmonic_drive model (>= 1)"),
    ConfigKey(
        "field",
        "damping_omega",
        "damping_omega",
        EmptyNone() | Float(),
        "Optional exp(-w/damping_omega) convergence factor on every mode scale (a.u.); empty disables",
        _optional_float,
        _float_text,
    ),
    # cutoff
    _enum_key("cutoff", "kind", "cutoff.kind", CutoffKind, "Band policy: fixed or moving"),
    _float_key("cutoff", "omega_min", "cutoff.omega_min", "Fixed band lower edge (a.u.)"),
    _float_key("cutoff", "omega_max", "cutoff.omega_max", "Fixed band upper edge (a.u.)"),
    _float_key("cutoff", "multiple", "cutoff.multiple", "Moving upper edge as a multiple of the orbital frequency (> 1)"),
    _float_key("cutoff", "floor", "cutoff.floor", "Moving band lower edge and clamp (a.u.)"),
    _float_key("cutoff", "ceiling", "cutoff.ceiling", "Moving band upper clamp and grid end (a.u.)"),
    # integrator
    _enum_key("integrator", "kind", "integrator", IntegratorKind, "Integrator: fixed_rk4 or adaptive_rk4"),
    _int_key("integrator", "steps_per_orbit", "steps_per_orbit", "Fixed RK4 steps per osculating period"),
    _int_key("integrator", "field_updates_per_orbit", "field_updates_per_orbit", "Field cache knots per osculating period"),
    _float_key("integrator", "tolerance", "tolerance", "Adaptive step error tolerance"),
    _float_key("integrator", "dt_init", "dt_init", "First adaptive step (Bohr times t0 = 1/Z^2)"),
    _float_key("integrator", "dt_min", "dt_min", "Smallest adaptive step before a stiffness stop (t0 units)"),
    # run
    _float_key("run", "t_max", "t_max", "Run duration (t0 units)"),
    _int_key("run", "seed", "seed", "Unsigned 64-bit seed of the field and initial-condition streams"),
    ConfigKey(
        "run",
        "initial_state",
        "initial_state",
        Str(),
        "circular(r0), random_circular(r0) or 'x, y, z, vx, vy, vz' (a.u.)",
        parse_initial_state,
        str,
    ),
    # diagnostics
    _int_key("diagnostics", "trace_stride", "diagnostics.trace_stride", "Keep one trace row per this many steps (weights accumulate)"),
    _float_key("diagnostics", "collapse_radius", "diagnostics.collapse_radius", "Collapse when the scaled radius drops below this"),
    _float_key("diagnostics", "ionization_threshold", "diagnostics.ionization_threshold", "Scaled energy above which the ionization clock runs"),
    _float_key("diagnostics", "ionization_dwell", "diagnostics.ionization_dwell", "Time above the threshold that counts as ionization (t0 units)"),
    _float_key("diagnostics", "critical_L", "diagnostics.critical_L", "Critical angular momentum (units of hbar)"),
    _float_key("diagnostics", "critical_L_energy_band", "diagnostics.critical_L_energy_band", "Scaled energy above which low L is flagged"),
    _bool_key("diagnostics", "exclude_ionization", "diagnostics.exclude_ionization", "Leave the ionization episode out of histograms"),
    _float_key("diagnostics", "r_hist_max", "diagnostics.r_hist_max", "Upper edge of the radius histogram (scaled Bohr radii)"),
    _int_key("diagnostics", "r_bins", "diagnostics.r_bins", "Radius histogram bins"),
    _float_key("diagnostics", "L_hist_max", "diagnostics.L_hist_max", "Upper edge of the angular momentum histogram"),
    _int_key("diagnostics", "L_bins", "diagnostics.L_bins", "Angular momentum histogram bins"),
    _float_key("diagnostics", "E_hist_min", "diagnostics.E_hist_min", "Lower edge of the scaled energy histogram (upper edge 0)"),
    _int_key("diagnostics", "E_bins", "diagnostics.E_bins", "Energy histogram bins"),
    _int_key("diagnostics", "ecc_bins", "diagnostics.ecc_bins", "Eccentricity histogram bins over [0, 1]"),
)

CONFIG_KEYS: dict[str, ConfigKey] = {key.dotted: key for key in _KEYS}

SCHEMA = Map(
    {
        strictyaml.Optional(section): Map(
            {strictyaml.Optional(key.name): key.validator for key in _KEYS if key.section == section}
        )
        for section in SECTIONS
    }
)


def config_help() -> str:
    """Text listing every configuration key, for ``--help``."""
    defaults = SimConfig()
    lines = ["Configuration keys (YAML 'section: key: value', or --set section.key=value):", ""]
    for key in _KEYS:
        default = _get(defaults, key.target)
        shown = "unset" if default is None else key.to_text(default)
        lines.append(f"  {key.dotted} [{shown}]: {key.description}")
    return "\n".join(lines)


def _get(config: SimConfig, target: str):
    value = config
    for part in target.split("."):
        value = getattr(value, part)
    return value


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse YAML config text into ``{"section.key": value}``.

    Raises:
        ConfigError: On YAML errors, unknown keys or badly typed values; the
            message carries the offending line
    """
    if not any(line.strip() and not line.lstrip().startswith("#") for line in text.splitlines()):
        return {}
    try:
        parsed = strictyaml.load(text, SCHEMA)
    except strictyaml.YAMLError as e:
        raise ConfigError(f"Invalid configuration:\n{e}") from None

    values = {}
    for section, entries in parsed.data.items():
        for name, value in entries.items():
            values[f"{section}.{name}"] = value
    return values


def parse_override(text: str) -> dict[str, Any]:
    """Parse one ``section.key=value`` override.

    Raises:
        ConfigError: If the override is malformed, the key unknown or the value invalid
    """
    dotted, sep, value = text.partition("=")
    dotted = dotted.strip()
    if not sep or not dotted:
        raise ConfigError(f"Override '{text}' must have the form section.key=value")
    if dotted not in CONFIG_KEYS:
        raise ConfigError(f"Unknown config key '{dotted}'. Known keys: {', '.join(CONFIG_KEYS)}")
    key = CONFIG_KEYS[dotted]
    try:
        parsed = strictyaml.load(f"{key.name}: {value.strip()}\n", Map({key.name: key.validator}))
    except strictyaml.YAMLError as e:
        raise ConfigError(f"Invalid value for {dotted}: {e}") from None
    return {dotted: parsed.data[key.name]}


def build_config(values: dict[str, Any]) -> SimConfig:
    """Turn parsed ``{"section.key": value}`` pairs into a SimConfig; absent keys keep defaults."""
    top: dict[str, Any] = {}
    nested: dict[str, dict[str, Any]] = {"cutoff": {}, "diagnostics": {}}
    for dotted, raw in values.items():
        key = CONFIG_KEYS[dotted]
        value = key.to_model(raw)
        head, _, attr = key.target.partition(".")
        if attr:
            nested[head][attr] = value
        else:
            top[head] = value
    return SimConfig(
        cutoff=CutoffPolicy(**nested["cutoff"]),
        diagnostics=DiagnosticsConfig(**nested["diagnostics"]),
        **top,
    )


def load_config(path: Optional[Path] = None, overrides: Iterable[str] = ()) -> SimConfig:
    """Read a config file, apply overrides and validate the result.

    Overrides take precedence over file values.

    Args:
        path: YAML config file, or None for defaults
        overrides: ``section.key=value`` strings

    Returns:
        A validated SimConfig

    Raises:
        ConfigError: If the file or an override cannot be parsed
        ValidationError: If the combined configuration is inconsistent
    """
    text = ""
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigError(f"Cannot read config file {path}: {e}") from None
    return load_config_text(text, overrides)


def load_config_text(text: str, overrides: Iterable[str] = ()) -> SimConfig:
    """Same as :func:`load_config` for config text already in memory."""
    values = parse_config_text(text)
    for override in overrides:
        values.update(parse_override(override))

    config = build_config(values)
    errors = validate_config(config)
    if errors:
        raise ValidationError(f"Invalid configuration ({len(errors)} errors)", errors)
    return config


def dump_config(config: SimConfig) -> str:
    """Render ``config`` as YAML that :func:`load_config` reads back to an equal config."""
    lines = ["# sedatom configuration echo"]
    for section in SECTIONS:
        lines.append(f"{section}:")
        for key in _KEYS:
            if key.section != section:
                continue
            value = _get(config, key.target)
            if value is None:
                continue
            lines.append(f"  {key.name}: {key.to_text(value)}")
    return "\n".join(lines) + "\n"
