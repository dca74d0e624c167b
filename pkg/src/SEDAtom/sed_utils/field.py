# =============================================================================
# Zero-Point Field Synthesis
# =============================================================================
# The stochastic zero-point field is represented as a finite sum of modes
#
#     E(r, t) = sum_j  s_j (A_j cos(k_j.r - w_j t) - B_j sin(k_j.r - w_j t)) e_j
#
# with A_j, B_j independent unit Gaussians. Mode scales are calibrated against
# the spectral energy density rho(w) = w^3 alpha^3 / (2 pi^2) (atomic units).
#
# Frequencies live on a global grid w_j = origin + (j + 1/2) dw. Slot j always
# draws its amplitudes from random stream j, so changing the active band never
# alters a mode that survives the change.
#
# Field models:
#   - dipole_1d:        three (or two, planar) independent Cartesian components, k = 0
#   - axial_plane_wave: waves along +z and -z, x/y polarization, B = k_hat x E
#   - circular_drive:   one rotating field cancelling radiation drag on a circular orbit
#   - harmonic_drive:   orbital harmonics cancelling radiation drag on an ellipse
# =============================================================================

import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterator, Optional

import numpy as np
import pandas as pd
import scipy.integrate
import scipy.special

from .errors import CacheRangeError, ValidationError
from .models import CutoffKind, CutoffPolicy, FieldModel, RngSpec, SimConfig, State
from .orbits import elements_from_state
from .units import ALPHA, C_AU

logger = logging.getLogger(__name__)

_X = (1.0, 0.0, 0.0)
_Y = (0.0, 1.0, 0.0)
_Z = (0.0, 0.0, 1.0)
_ORIGIN = (0.0, 0.0, 0.0)

# Per-slot mode templates: (polarization, propagation direction)
_DIPOLE_TEMPLATE = ((_X, _ORIGIN), (_Y, _ORIGIN), (_Z, _ORIGIN))
_AXIAL_TEMPLATE = ((_X, _Z), (_Y, _Z), (_X, (0.0, 0.0, -1.0)), (_Y, (0.0, 0.0, -1.0)))

# Per-component variance fraction of the isotropic energy density
_DIPOLE_VARIANCE = 4.0 * math.pi / 3.0
_AXIAL_VARIANCE = 2.0 * math.pi / 3.0  # two travelling directions share one component

# Below this the orbit is treated as circular (periapsis undefined)
_CIRCULAR_ECCENTRICITY = 1e-10


@dataclass(frozen=True)
class Mode:
    """One term of the field sum.

    Attributes:
        omega: Angular frequency (a.u.)
        amp_cos: Gaussian variate multiplying the cosine
        amp_sin: Gaussian variate multiplying the sine
        scale: Field amplitude per unit variate (a.u. field)
        polarization: Unit polarization vector
        k_vec: Wave vector (zero in the dipole approximation)
    """

    omega: float
    amp_cos: float
    amp_sin: float
    scale: float
    polarization: tuple = _X
    k_vec: tuple = _ORIGIN


@dataclass(frozen=True)
class FieldSample:
    """Electric and magnetic field at one time (a.u.)."""

    E: np.ndarray
    B: np.ndarray
    t: float


def _readonly(values, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class ModeSet:
    """Immutable set of field modes stored as parallel arrays.

    Rows are grouped by frequency slot (ascending) and, within a slot, by the
    model's polarization template order.
    """

    model: FieldModel
    omega: np.ndarray
    amp_cos: np.ndarray
    amp_sin: np.ndarray
    scale: np.ndarray
    polarization: np.ndarray
    k_vec: np.ndarray
    slot: np.ndarray
    band: tuple[float, float]
    rng: RngSpec
    grid_origin: float = 0.0
    spacing: float = 0.0
    planar: bool = False
    damping_omega: Optional[float] = None

    def __len__(self) -> int:
        return int(self.omega.shape[0])

    @property
    def frequencies(self) -> np.ndarray:
        """Distinct slot frequencies, strictly increasing."""
        return np.unique(self.omega)

    @property
    def implied_box_length(self) -> float:
        """Box length L_z = 2 pi c / dw implied by the frequency spacing (a.u.)."""
        return 2.0 * math.pi * C_AU / self.spacing if self.spacing > 0 else math.inf

    @cached_property
    def b_polarization(self) -> np.ndarray:
        """Per-mode k_hat x polarization (zero rows for k = 0)."""
        norms = np.sqrt((self.k_vec**2).sum(axis=1))
        k_hat = np.divide(self.k_vec, norms[:, None], out=np.zeros_like(self.k_vec), where=norms[:, None] > 0)
        return np.cross(k_hat, self.polarization)

    @property
    def has_magnetic(self) -> bool:
        return self.model == FieldModel.AXIAL_PLANE_WAVE

    def modes(self) -> Iterator[Mode]:
        for i in range(len(self)):
            yield Mode(
                omega=float(self.omega[i]),
                amp_cos=float(self.amp_cos[i]),
                amp_sin=float(self.amp_sin[i]),
                scale=float(self.scale[i]),
                polarization=tuple(self.polarization[i]),
                k_vec=tuple(self.k_vec[i]),
            )

    @classmethod
    def from_modes(
        cls, modes: list[Mode], model: FieldModel = FieldModel.DIPOLE_1D, rng: RngSpec | None = None
    ) -> "ModeSet":
        """Build a ModeSet from explicit modes (one slot per mode)."""
        if not modes:
            raise ValidationError("A ModeSet needs at least one mode")
        omega = [m.omega for m in modes]
        return cls(
            model=model,
            omega=_readonly(omega),
            amp_cos=_readonly([m.amp_cos for m in modes]),
            amp_sin=_readonly([m.amp_sin for m in modes]),
            scale=_readonly([m.scale for m in modes]),
            polarization=_readonly([m.polarization for m in modes]).reshape(-1, 3),
            k_vec=_readonly([m.k_vec for m in modes]).reshape(-1, 3),
            slot=_readonly(np.arange(len(modes)), dtype=np.int64),
            band=(min(omega), max(omega)),
            rng=rng or RngSpec(seed=0),
        )


# -------------------------------------------------------------------------
# Spectrum
# -------------------------------------------------------------------------

def spectral_density(omega):
    """Zero-point spectral energy density rho(w) = w^3 alpha^3 / (2 pi^2) (a.u.)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValidationError("Frequency must be non-negative")
    rho = omega**3 * ALPHA**3 / (2.0 * math.pi**2)
    return float(rho) if rho.ndim == 0 else rho


def analytic_band_energy(omega_lo: float, omega_hi: float) -> float:
    """Closed-form integral of rho over [omega_lo, omega_hi]: alpha^3 (hi^4 - lo^4) / (8 pi^2)."""
    if omega_lo < 0 or omega_hi < omega_lo:
        raise ValidationError(f"Invalid band ({omega_lo}, {omega_hi})")
    return ALPHA**3 * (omega_hi**4 - omega_lo**4) / (8.0 * math.pi**2)


def autocorrelation_oracle(band: tuple[float, float], tau: float) -> float:
    """Per-component field autocorrelation (4 pi/3) * integral of rho(w) cos(w tau) over the band."""
    omega_lo, omega_hi = band
    if omega_lo < 0 or omega_hi <= omega_lo:
        raise ValidationError(f"Invalid band ({omega_lo}, {omega_hi})")
    if tau == 0.0:
        return _DIPOLE_VARIANCE * analytic_band_energy(omega_lo, omega_hi)
    value, _ = scipy.integrate.quad(
        spectral_density, omega_lo, omega_hi, weight="cos", wvar=abs(tau), epsrel=1e-9, epsabs=0.0, limit=400
    )
    return _DIPOLE_VARIANCE * value


# -------------------------------------------------------------------------
# Mode sampling
# -------------------------------------------------------------------------

def _template(model: FieldModel, planar: bool):
    if model == FieldModel.AXIAL_PLANE_WAVE:
        return _AXIAL_TEMPLATE
    return _DIPOLE_TEMPLATE[:2] if planar else _DIPOLE_TEMPLATE


def _slot_range(origin: float, spacing: float, omega_lo: float, omega_hi: float) -> tuple[int, int]:
    """Slots j with omega_lo <= w_j < omega_hi, keeping at least one slot."""
    first = max(0, math.ceil((omega_lo - origin) / spacing - 0.5))
    stop = max(first + 1, math.ceil((omega_hi - origin) / spacing - 0.5))
    return first, stop


def _draw_slots(
    model: FieldModel,
    slots: np.ndarray,
    origin: float,
    spacing: float,
    rng: RngSpec,
    planar: bool,
    damping_omega: Optional[float],
) -> dict[str, np.ndarray]:
    """Draw the modes of ``slots``; slot j reads stream j of ``rng``."""
    full_template = _template(model, planar=False)
    template = _template(model, planar)
    per_slot = len(template)
    variance_weight = _AXIAL_VARIANCE if model == FieldModel.AXIAL_PLANE_WAVE else _DIPOLE_VARIANCE

    n = len(slots) * per_slot
    amp_cos = np.empty(n)
    amp_sin = np.empty(n)
    for i, j in enumerate(slots):
        variates = rng.stream(int(j)).generator().standard_normal(2 * len(full_template))
        amp_cos[i * per_slot:(i + 1) * per_slot] = variates[0:2 * per_slot:2]
        amp_sin[i * per_slot:(i + 1) * per_slot] = variates[1:2 * per_slot:2]

    slot_omega = origin + (slots + 0.5) * spacing
    slot_scale = np.sqrt(variance_weight * spectral_density(slot_omega) * spacing)
    if damping_omega is not None:
        slot_scale = slot_scale * np.exp(-slot_omega / damping_omega)

    directions = np.array([d for _, d in template], dtype=float)
    return {
        "omega": np.repeat(slot_omega, per_slot),
        "amp_cos": amp_cos,
        "amp_sin": amp_sin,
        "scale": np.repeat(slot_scale, per_slot),
        "polarization": np.tile(np.array([p for p, _ in template], dtype=float), (len(slots), 1)),
        "k_vec": np.repeat(slot_omega / C_AU, per_slot)[:, None] * np.tile(directions, (len(slots), 1)),
        "slot": np.repeat(slots, per_slot),
    }


def _assemble(columns: dict[str, np.ndarray], **fields) -> ModeSet:
    return ModeSet(
        omega=_readonly(columns["omega"]),
        amp_cos=_readonly(columns["amp_cos"]),
        amp_sin=_readonly(columns["amp_sin"]),
        scale=_readonly(columns["scale"]),
        polarization=_readonly(columns["polarization"]).reshape(-1, 3),
        k_vec=_readonly(columns["k_vec"]).reshape(-1, 3),
        slot=_readonly(columns["slot"], dtype=np.int64),
        **fields,
    )


def sample_modes(config: SimConfig, band: tuple[float, float]) -> ModeSet:
    """Synthesize the random modes of ``config.field_model`` over ``band``.

    The frequency grid spans ``config.cutoff.grid_span`` with
    ``config.n_modes`` slots; only slots inside ``band`` become active.

    Args:
        config: Simulation configuration (model, mode budget, seed, cutoff)
        band: Active band (omega_lo, omega_hi) in a.u.

    Returns:
        ModeSet with per-component variance (4 pi/3) rho(w_j) dw_j per slot.

    Raises:
        ValidationError: zero-width band or mode budget below 2
    """
    if config.field_model not in (FieldModel.DIPOLE_1D, FieldModel.AXIAL_PLANE_WAVE):
        raise ValidationError(f"sample_modes does not synthesize field model '{config.field_model.value}'")
    omega_lo, omega_hi = band
    if not omega_hi > omega_lo:
        raise ValidationError(f"Field band ({omega_lo}, {omega_hi}) has zero width")
    if config.n_modes < 2:
        raise ValidationError(f"Mode budget must be at least 2, got {config.n_modes}")

    span_lo, span_hi = config.cutoff.grid_span
    spacing = (span_hi - span_lo) / config.n_modes
    first, stop = _slot_range(span_lo, spacing, omega_lo, omega_hi)
    columns = _draw_slots(
        config.field_model, np.arange(first, stop), span_lo, spacing, config.rng, config.planar, config.damping_omega
    )
    logger.debug("Sampled %d slots (%d modes) over band (%.4g, %.4g)", stop - first, len(columns["omega"]), *band)
    return _assemble(
        columns,
        model=config.field_model,
        band=(float(omega_lo), float(omega_hi)),
        rng=config.rng,
        grid_origin=span_lo,
        spacing=spacing,
        planar=config.planar,
        damping_omega=config.damping_omega,
    )


def apply_moving_cutoff(modes: ModeSet, orbital_freq: float, policy: CutoffPolicy) -> ModeSet:
    """Move the upper band edge to clamp(multiple * orbital_freq, floor, ceiling).

    Surviving slots keep their exact amplitudes, newly exposed slots are drawn
    from their own streams, and removed slots are dropped.
    """
    if policy.kind != CutoffKind.MOVING:
        raise ValidationError("apply_moving_cutoff requires a moving cutoff policy")
    if not orbital_freq > 0:
        raise ValidationError(f"Orbital frequency must be positive, got {orbital_freq}")

    omega_hi = min(max(policy.multiple * orbital_freq, policy.floor), policy.ceiling)
    band = (float(policy.floor), float(omega_hi))
    if band == modes.band:
        return modes

    first, stop = _slot_range(modes.grid_origin, modes.spacing, *band)
    current = np.unique(modes.slot)
    if current.size and current[0] == first and current[-1] == stop - 1:
        return replace(modes, band=band)

    keep = (modes.slot >= first) & (modes.slot < stop)
    wanted = np.arange(first, stop)
    missing = wanted[~np.isin(wanted, current)]
    fresh = _draw_slots(
        modes.model, missing, modes.grid_origin, modes.spacing, modes.rng, modes.planar, modes.damping_omega
    )

    kept = {
        "omega": modes.omega[keep],
        "amp_cos": modes.amp_cos[keep],
        "amp_sin": modes.amp_sin[keep],
        "scale": modes.scale[keep],
        "polarization": modes.polarization[keep],
        "k_vec": modes.k_vec[keep],
        "slot": modes.slot[keep],
    }
    merged = {name: np.concatenate([kept[name], fresh[name]]) for name in kept}
    order = np.argsort(merged["slot"], kind="stable")
    merged = {name: values[order] for name, values in merged.items()}
    logger.debug("Cutoff moved to %.4g: %d slots active (%d new)", omega_hi, stop - first, missing.size)
    return _assemble(
        merged,
        model=modes.model,
        band=band,
        rng=modes.rng,
        grid_origin=modes.grid_origin,
        spacing=modes.spacing,
        planar=modes.planar,
        damping_omega=modes.damping_omega,
    )


def circular_drive_modes(config: SimConfig, state: State) -> ModeSet:
    """Rotating field that cancels the order-reduced radiation drag on a circular orbit.

    On the circular orbit through ``state`` (taken at t = 0) the field equals the
    radiation-reaction force, magnitude (2 Z alpha^3/3) w / r0^2 and anti-parallel
    to the velocity, so the Lorentz force -E balances the drag.
    """
    r0 = state.radius
    omega = math.sqrt(config.Z / r0**3)
    phase = math.atan2(state.r[1], state.r[0])
    sense = 1.0 if np.cross(state.r, state.v)[2] >= 0 else -1.0
    amplitude = (2.0 * config.Z * ALPHA**3 / 3.0) * omega / r0**2
    s, c = math.sin(phase), math.cos(phase)
    modes = [
        Mode(omega=omega, amp_cos=sense * s, amp_sin=c, scale=amplitude, polarization=_X),
        Mode(omega=omega, amp_cos=-sense * c, amp_sin=s, scale=amplitude, polarization=_Y),
    ]
    built = ModeSet.from_modes(modes, model=FieldModel.CIRCULAR_DRIVE, rng=config.rng)
    return replace(built, slot=_readonly([0, 0], dtype=np.int64), band=(omega, omega))


def _kepler_harmonics(n: np.ndarray, eccentricity: float) -> tuple[np.ndarray, np.ndarray]:
    """Fourier coefficients of the perifocal position per unit semi-major axis.

    x/a = -3e/2 + sum_n X_n cos(n M) and y/a = sum_n Y_n sin(n M), M the mean anomaly.
    """
    if eccentricity < _CIRCULAR_ECCENTRICITY:
        unit = (n == 1).astype(float)
        return unit, unit
    X = 2.0 / n * scipy.special.jvp(n, n * eccentricity)
    Y = math.sqrt(1.0 - eccentricity**2) * 2.0 / (n * eccentricity) * scipy.special.jv(n, n * eccentricity)
    return X, Y


def harmonic_drive_modes(config: SimConfig, state: State) -> ModeSet:
    """Harmonics of the orbital motion that cancel radiation drag on a Kepler ellipse.

    On the Coulomb orbit through ``state`` the order-reduced radiation force is
    (2 alpha^3/3) d^3r/dt^3, a periodic vector at the orbital frequency w. Its
    first ``config.n_harmonics`` Fourier terms become modes at n w polarized
    along the periapsis direction P and along Q = L_hat x P; each (P, Q) pair
    is the superposition of two counter-rotating circularly polarized waves.
    The Lorentz force -E then balances the drag along the whole ellipse.

    Raises:
        ValidationError: unbound state or zero angular momentum
    """
    Z = config.Z
    elements = elements_from_state(state, Z)
    L_norm = elements.L_norm
    if not elements.bound or L_norm == 0.0:
        raise ValidationError("harmonic_drive needs a bound orbit with non-zero angular momentum")

    a = elements.r_c
    ecc = elements.eccentricity
    omega = elements.orbital_omega
    L_hat = elements.L / L_norm
    if ecc < _CIRCULAR_ECCENTRICITY:
        P = state.r / state.radius
        mean_anomaly = 0.0
    else:
        P = elements.ecc_vector / ecc
        r_dot_v = float(state.r @ state.v)
        eccentric_anomaly = math.atan2(r_dot_v / math.sqrt(Z * a), 1.0 - state.radius / a)
        mean_anomaly = eccentric_anomaly - r_dot_v / math.sqrt(Z * a)
    Q = np.cross(L_hat, P)

    n = np.arange(1, config.n_harmonics + 1)
    X, Y = _kepler_harmonics(n, ecc)
    strength = (2.0 * ALPHA**3 / 3.0) * a * (n * omega) ** 3
    # n M(t) = n w t + phi_n
    phi = n * (mean_anomaly - omega * state.t)
    s, c = np.sin(phi), np.cos(phi)

    modes = []
    for k in range(len(n)):
        # d^3/dt^3 turns X_n cos(nM) into X_n (nw)^3 sin(nM) and Y_n sin(nM) into -Y_n (nw)^3 cos(nM)
        p_scale, q_scale = strength[k] * X[k], strength[k] * Y[k]
        p_sign, q_sign = math.copysign(1.0, p_scale), math.copysign(1.0, q_scale)
        modes.append(
            Mode(omega=float(n[k] * omega), amp_cos=p_sign * s[k], amp_sin=p_sign * c[k],
                 scale=abs(float(p_scale)), polarization=tuple(P))
        )
        modes.append(
            Mode(omega=float(n[k] * omega), amp_cos=-q_sign * c[k], amp_sin=q_sign * s[k],
                 scale=abs(float(q_scale)), polarization=tuple(Q))
        )
    built = ModeSet.from_modes(modes, model=FieldModel.HARMONIC_DRIVE, rng=config.rng)
    logger.debug("Harmonic drive: a=%.4g e=%.4g, %d harmonics", a, ecc, len(n))
    return replace(
        built, slot=_readonly(np.repeat(n - 1, 2), dtype=np.int64), band=(float(omega), float(n[-1] * omega))
    )


# -------------------------------------------------------------------------
# Evaluation
# -------------------------------------------------------------------------

def _coefficients(modes: ModeSet, t: float, r) -> np.ndarray:
    phase = -modes.omega * t
    if modes.model == FieldModel.AXIAL_PLANE_WAVE:
        phase = phase + (modes.k_vec * np.asarray(r, dtype=float)).sum(axis=1)
    return modes.scale * (modes.amp_cos * np.cos(phase) - modes.amp_sin * np.sin(phase))


def eval_field(modes: ModeSet, t: float, r=_ORIGIN) -> FieldSample:
    """Direct summation of all modes at time ``t`` and position ``r``.

    Dipole-approximation models ignore ``r`` and return B = 0.
    """
    coef = _coefficients(modes, t, r)
    E = (coef[:, None] * modes.polarization).sum(axis=0)
    if modes.has_magnetic:
        B = (coef[:, None] * modes.b_polarization).sum(axis=0)
    else:
        B = np.zeros(3)
    return FieldSample(E=E, B=B, t=float(t))


def eval_field_series(modes: ModeSet, times, r=_ORIGIN) -> np.ndarray:
    """Electric field at many times, shape (len(times), 3); for statistics only."""
    times = np.asarray(times, dtype=float)
    phase = -np.outer(times, modes.omega)
    if modes.model == FieldModel.AXIAL_PLANE_WAVE:
        phase = phase + (modes.k_vec @ np.asarray(r, dtype=float))[None, :]
    coef = modes.scale * (modes.amp_cos * np.cos(phase) - modes.amp_sin * np.sin(phase))
    return coef @ modes.polarization


@dataclass(frozen=True)
class FieldCache:
    """Field values at knots with linear interpolation in between."""

    knots: np.ndarray
    E: np.ndarray
    B: np.ndarray

    @property
    def t_start(self) -> float:
        return float(self.knots[0])

    @property
    def t_end(self) -> float:
        return float(self.knots[-1])


def make_cache(modes: ModeSet, t_start: float, t_end: float, n_knots: int, r=_ORIGIN) -> FieldCache:
    """Evaluate the field exactly at ``n_knots`` equally spaced times on [t_start, t_end]."""
    if n_knots < 2:
        raise ValidationError(f"A field cache needs at least 2 knots, got {n_knots}")
    if not t_end > t_start:
        raise ValidationError(f"Cache window ({t_start}, {t_end}) is empty")
    knots = np.linspace(t_start, t_end, n_knots)
    samples = [eval_field(modes, float(t), r) for t in knots]
    return FieldCache(
        knots=_readonly(knots),
        E=_readonly([s.E for s in samples]),
        B=_readonly([s.B for s in samples]),
    )


def cache_eval(cache: FieldCache, t: float) -> FieldSample:
    """Linearly interpolated field; exact at knots."""
    knots = cache.knots
    if not knots[0] <= t <= knots[-1]:
        raise CacheRangeError(f"t={t!r} outside field cache window [{knots[0]!r}, {knots[-1]!r}]")
    i = int(np.searchsorted(knots, t, side="right")) - 1
    if i >= len(knots) - 1:
        return FieldSample(E=cache.E[-1].copy(), B=cache.B[-1].copy(), t=float(t))
    w = (t - knots[i]) / (knots[i + 1] - knots[i])
    E = cache.E[i] + w * (cache.E[i + 1] - cache.E[i])
    B = cache.B[i] + w * (cache.B[i + 1] - cache.B[i])
    return FieldSample(E=E, B=B, t=float(t))


# -------------------------------------------------------------------------
# Field statistics against the analytic oracles
# -------------------------------------------------------------------------

def field_statistics(
    config: SimConfig,
    n_realizations: int,
    taus,
    n_times: int = 128,
    band: Optional[tuple[float, float]] = None,
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Ensemble variance and autocorrelation of the synthesized field.

    Realization i uses seed ``config.seed + i``. Sample times are spread over
    one grid period 2 pi / dw.

    Args:
        config: Configuration selecting the model, mode budget and band
        n_realizations: Number of independent mode sets
        taus: Lags at which to estimate the autocorrelation
        n_times: Sample times per realization
        band: Active band; defaults to the cutoff grid span

    Returns:
        (variance table, autocorrelation table) as DataFrames with the
        empirical value, the oracle and their ratio.
    """
    band = band or config.cutoff.grid_span
    taus = np.asarray(taus, dtype=float)
    sums = np.zeros(3)
    lag_sums = np.zeros(len(taus))
    spacing = None
    for i in range(n_realizations):
        modes = sample_modes(replace(config, seed=config.seed + i), band)
        spacing = modes.spacing
        times = np.arange(n_times) * (2.0 * math.pi / spacing / n_times)
        E0 = eval_field_series(modes, times)
        sums += (E0**2).mean(axis=0)
        for k, tau in enumerate(taus):
            lag_sums[k] += (E0 * eval_field_series(modes, times + tau)).mean()

    oracle_variance = _DIPOLE_VARIANCE * analytic_band_energy(*band)
    empirical = sums / n_realizations
    variance = pd.DataFrame(
        {
            "component": ["x", "y", "z"],
            "empirical": empirical,
            "oracle": oracle_variance,
            "ratio": empirical / oracle_variance,
        }
    )
    # the planar dipole model has no z component
    if config.planar and config.field_model == FieldModel.DIPOLE_1D:
        variance = variance.iloc[:2]
        lag_sums = lag_sums * 1.5

    oracle_lags = np.array([autocorrelation_oracle(band, tau) for tau in taus])
    autocorrelation = pd.DataFrame(
        {
            "tau": taus,
            "empirical": lag_sums / n_realizations,
            "oracle": oracle_lags,
            "error_vs_zero_lag": (lag_sums / n_realizations - oracle_lags) / oracle_variance,
        }
    )
    return variance, autocorrelation
