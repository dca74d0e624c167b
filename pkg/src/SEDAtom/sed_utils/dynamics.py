# =============================================================================
# Equation of motion and Runge-Kutta integrators
# =============================================================================
# Non-relativistic Abraham-Lorentz equation in atomic units (m = e = 1):
#
#     a = -Z r/r^3  +  (2/3c^3) da/dt  -  (E + v x B)
#
# The third derivative in the radiation-reaction term is replaced by the time
# derivative of the Coulomb acceleration (order reduction), so every force is a
# function of (t, r, v) and the system stays second order.
#
# Accelerations are passed around as ``accel_fn(t, r, v) -> ndarray``.
# =============================================================================

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import SingularityError, StiffnessError
from .models import ForceTerm, SimConfig, State
from .units import ALPHA

AccelFn = Callable[[float, np.ndarray, np.ndarray], np.ndarray]

# Step-doubling controller constants
SAFETY = 0.9
MIN_SCALE = 0.2
MAX_SCALE = 5.0
RICHARDSON = 15.0  # 2^4 - 1 for a fourth-order method

RR_COEFFICIENT = 2.0 * ALPHA**3 / 3.0


@dataclass(frozen=True)
class ForceBreakdown:
    """Right-hand-side terms of the equation of motion (accelerations, m = 1)."""

    coulomb: np.ndarray
    rad_reaction: np.ndarray
    lorentz: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.coulomb + self.rad_reaction + self.lorentz


# -------------------------------------------------------------------------
# Force terms
# -------------------------------------------------------------------------

def _check_radius(r: np.ndarray, singular_radius: float, t: float = 0.0, v=None) -> float:
    radius = float(np.sqrt(r @ r))
    if radius <= singular_radius:
        state = None
        if radius > 0.0:
            state = State(t=t, r=r, v=v if v is not None else np.zeros(3))
        raise SingularityError(
            f"Electron reached r={radius:.3e} a.u. (singular radius {singular_radius:.3e})", state
        )
    return radius


def coulomb_force(r, Z: int = 1, singular_radius: float = 0.0) -> np.ndarray:
    """Coulomb attraction -Z r/|r|^3."""
    r = np.asarray(r, dtype=float)
    radius = _check_radius(r, singular_radius)
    return -Z * r / radius**3


def _rr_force(r: np.ndarray, v: np.ndarray, radius: float, Z: int) -> np.ndarray:
    r3 = radius**3
    return -RR_COEFFICIENT * Z * (v / r3 - 3.0 * float(r @ v) * r / (r3 * radius * radius))


def rr_force_approx(state: State, Z: int = 1, singular_radius: float = 0.0) -> np.ndarray:
    """Order-reduced radiation reaction (2/3c^3) d/dt(-Z r/r^3).

    Returns -(2 Z alpha^3/3) [v/r^3 - 3 (r.v) r/r^5].
    """
    radius = _check_radius(state.r, singular_radius, state.t, state.v)
    return _rr_force(state.r, state.v, radius, Z)


def lorentz_force(state: State, field, include_magnetic: bool = True) -> np.ndarray:
    """Force -(E + v x B) on the electron (charge -1)."""
    force = -np.asarray(field.E, dtype=float)
    if include_magnetic:
        force = force - np.cross(state.v, field.B)
    return force


def _accelerations(t, r, v, config: SimConfig, field_provider) -> ForceBreakdown:
    zero = np.zeros(3)
    coulomb = rad_reaction = lorentz = zero
    needs_radius = config.has(ForceTerm.COULOMB) or config.has(ForceTerm.RADIATION_REACTION)
    if needs_radius:
        radius = _check_radius(r, config.singular_radius, t, v)
        if config.has(ForceTerm.COULOMB):
            coulomb = -config.Z * r / radius**3
        if config.has(ForceTerm.RADIATION_REACTION):
            rad_reaction = _rr_force(r, v, radius, config.Z)
    electric = config.has(ForceTerm.FIELD_ELECTRIC)
    magnetic = config.has(ForceTerm.FIELD_MAGNETIC)
    if field_provider is not None and (electric or magnetic):
        sample = field_provider(t, r)
        lorentz = zero
        if electric:
            lorentz = lorentz - sample.E
        if magnetic:
            lorentz = lorentz - np.cross(v, sample.B)
    return ForceBreakdown(coulomb=coulomb, rad_reaction=rad_reaction, lorentz=lorentz)


def total_accel(state: State, config: SimConfig, field_provider=None) -> ForceBreakdown:
    """Sum the force terms enabled in ``config``.

    Args:
        state: Electron state
        config: Simulation configuration (force flags, Z, singular radius)
        field_provider: Callable (t, r) -> FieldSample, or None for no field

    Returns:
        ForceBreakdown whose ``total`` is the acceleration.
    """
    return _accelerations(state.t, state.r, state.v, config, field_provider)


def make_accel_fn(config: SimConfig, field_provider=None) -> AccelFn:
    """Bind ``config`` and ``field_provider`` into an ``accel_fn(t, r, v)``."""

    def accel_fn(t, r, v):
        return _accelerations(t, r, v, config, field_provider).total

    return accel_fn


# -------------------------------------------------------------------------
# Integrators
# -------------------------------------------------------------------------

def _rk4(t: float, r: np.ndarray, v: np.ndarray, dt: float, accel_fn: AccelFn):
    half = 0.5 * dt
    a1 = accel_fn(t, r, v)
    r2, v2 = r + half * v, v + half * a1
    a2 = accel_fn(t + half, r2, v2)
    r3, v3 = r + half * v2, v + half * a2
    a3 = accel_fn(t + half, r3, v3)
    r4, v4 = r + dt * v3, v + dt * a3
    a4 = accel_fn(t + dt, r4, v4)
    r_new = r + (dt / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
    v_new = v + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return r_new, v_new


def rk4_step(state: State, dt: float, accel_fn: AccelFn) -> State:
    """One classical fourth-order Runge-Kutta step of the (r, v) system."""
    if dt <= 0.0:
        raise ValueError(f"Step size must be positive, got {dt}")
    r_new, v_new = _rk4(state.t, state.r, state.v, dt, accel_fn)
    return State(t=state.t + dt, r=r_new, v=v_new)


def adaptive_step(
    state: State,
    tol: float,
    accel_fn: AccelFn,
    dt_trial: float,
    dt_min: float = 0.0,
    dt_max: Optional[float] = None,
):
    """Step-doubling RK4 with local Richardson extrapolation.

    One full step is compared with two half steps. The step is accepted when
    max|difference| over (r, v) is at most ``tol * (1 + |r|)``; the returned
    state is the two-half-step result corrected by difference/15. The next
    step size follows the 1/5-power rule with safety factor 0.9, clamped to
    [0.2, 5] times the step used.

    Args:
        state: Current state
        tol: Error tolerance (> 0)
        accel_fn: Acceleration function (t, r, v) -> ndarray
        dt_trial: First step size to try
        dt_min: Smallest allowed step; going below raises StiffnessError
        dt_max: Optional largest step

    Returns:
        Tuple (new_state, dt_used, dt_next).
    """
    if tol <= 0.0:
        raise ValueError(f"Tolerance must be positive, got {tol}")
    dt = dt_trial if dt_max is None else min(dt_trial, dt_max)
    t, r, v = state.t, state.r, state.v
    while True:
        if dt < dt_min:
            raise StiffnessError(f"Adaptive step {dt:.3e} fell below dt_min={dt_min:.3e} at t={t:.6e}", state)
        r_full, v_full = _rk4(t, r, v, dt, accel_fn)
        half = 0.5 * dt
        r_mid, v_mid = _rk4(t, r, v, half, accel_fn)
        r_two, v_two = _rk4(t + half, r_mid, v_mid, half, accel_fn)

        dr, dv = r_two - r_full, v_two - v_full
        error = max(float(np.max(np.abs(dr))), float(np.max(np.abs(dv))))
        allowed = tol * (1.0 + float(np.sqrt(r @ r)))

        if error == 0.0:
            scale = MAX_SCALE
        else:
            scale = min(MAX_SCALE, max(MIN_SCALE, SAFETY * (allowed / error) ** 0.2))

        if error <= allowed:
            new_state = State(t=t + dt, r=r_two + dr / RICHARDSON, v=v_two + dv / RICHARDSON)
            dt_next = dt * scale
            if dt_max is not None:
                dt_next = min(dt_next, dt_max)
            return new_state, dt, dt_next
        dt *= scale
