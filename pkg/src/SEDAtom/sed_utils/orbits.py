"""Osculating Kepler elements and the analytic Kepler propagator.

All quantities are in atomic units with the Coulomb parameter mu = Z.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import KeplerConvergenceError, SingularityError, ValidationError
from .models import State

KEPLER_TOLERANCE = 1e-14
KEPLER_MAX_ITERATIONS = 100


@dataclass(frozen=True)
class OrbitElements:
    """Osculating elements of the Coulomb orbit through one phase-space point.

    Attributes:
        Z: Nuclear charge
        energy: E = v^2/2 - Z/r
        L: Angular momentum r x v
        ecc_vector: Classical eccentricity vector (v x L)/Z - r_hat
        eccentricity: Norm of ``ecc_vector``
        A: Runge-Lenz vector (Z/a_eff) * ecc_vector (bound only)
        r_c: Semi-major axis Z/(2|E|) (bound only)
        a_eff: Effective momentum sqrt(-2E) (bound only)
        nu: Angle with sin(nu) = eccentricity (bound only)
        orbital_omega: Kepler frequency sqrt(Z)/r_c^(3/2) (bound only)
    """

    Z: int
    energy: float
    L: np.ndarray
    ecc_vector: np.ndarray
    eccentricity: float
    A: Optional[np.ndarray] = None
    r_c: Optional[float] = None
    a_eff: Optional[float] = None
    nu: Optional[float] = None
    orbital_omega: Optional[float] = None

    @property
    def bound(self) -> bool:
        return self.energy < 0.0

    @property
    def L_norm(self) -> float:
        return float(np.sqrt(self.L @ self.L))

    @property
    def eccentricity_from_energy(self) -> float:
        """Eccentricity from energy and angular momentum: sqrt(1 + 2 E L^2 / Z^2)."""
        return math.sqrt(max(0.0, 1.0 + 2.0 * self.energy * (self.L @ self.L) / self.Z**2))

    @property
    def period(self) -> Optional[float]:
        return None if self.orbital_omega is None else 2.0 * math.pi / self.orbital_omega


def elements_from_state(state: State, Z: int = 1, singular_radius: float = 0.0) -> OrbitElements:
    """Compute the osculating elements of ``state``.

    Args:
        state: Electron state
        Z: Nuclear charge
        singular_radius: States closer to the nucleus raise SingularityError

    Returns:
        OrbitElements; unbound states (E >= 0) leave r_c, a_eff, nu,
        orbital_omega and A undefined (None).
    """
    r, v = state.r, state.v
    radius = state.radius
    if radius <= singular_radius:
        raise SingularityError(f"Radius {radius:.3e} inside singular radius {singular_radius:.3e}", state)

    energy = 0.5 * float(v @ v) - Z / radius
    L = np.cross(r, v)
    ecc_vector = np.cross(v, L) / Z - r / radius
    eccentricity = float(np.sqrt(ecc_vector @ ecc_vector))

    if energy >= 0.0:
        return OrbitElements(Z=Z, energy=energy, L=L, ecc_vector=ecc_vector, eccentricity=eccentricity)

    a_eff = math.sqrt(-2.0 * energy)
    r_c = Z / (2.0 * -energy)
    return OrbitElements(
        Z=Z,
        energy=energy,
        L=L,
        ecc_vector=ecc_vector,
        eccentricity=eccentricity,
        A=(Z / a_eff) * ecc_vector,
        r_c=r_c,
        a_eff=a_eff,
        nu=math.asin(min(eccentricity, 1.0)),
        orbital_omega=math.sqrt(Z) / r_c**1.5,
    )


def orbit_radius(elements: OrbitElements, phi_r: float) -> float:
    """Radius on the osculating conic at angle ``phi_r`` from perihelion.

    r(phi) = (L^2/Z) / (1 + eccentricity * cos(phi))
    """
    denominator = 1.0 + elements.eccentricity * math.cos(phi_r)
    if denominator <= 0.0:
        raise ValidationError(f"Angle {phi_r} lies outside the conic (1 + e cos phi = {denominator:.3e})")
    return float(elements.L @ elements.L) / elements.Z / denominator


def _solve_kepler_difference(delta_m: float, e_cos: float, e_sin: float) -> float:
    """Solve x - e_cos*sin(x) + e_sin*(1 - cos(x)) = delta_m for x.

    Newton iteration safeguarded by bisection on the bracket
    [delta_m - 2, delta_m + 2], where the residual changes sign.
    """
    lo, hi = delta_m - 2.0, delta_m + 2.0
    x = delta_m
    for _ in range(KEPLER_MAX_ITERATIONS):
        s, c = math.sin(x), math.cos(x)
        residual = x - e_cos * s + e_sin * (1.0 - c) - delta_m
        if residual > 0.0:
            hi = x
        else:
            lo = x
        slope = 1.0 - e_cos * c + e_sin * s
        step = residual / slope
        x_new = x - step
        if not lo <= x_new <= hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < KEPLER_TOLERANCE:
            return x_new
        x = x_new
    raise KeplerConvergenceError(
        f"Kepler equation did not converge after {KEPLER_MAX_ITERATIONS} iterations (delta_m={delta_m})"
    )


def kepler_propagate(state: State, Z: int, dt: float) -> State:
    """Advance a bound state exactly along its Kepler ellipse by ``dt``.

    Uses the f and g functions in the eccentric-anomaly difference, which stay
    well defined for circular orbits.
    """
    elements = elements_from_state(state, Z)
    if not elements.bound:
        raise ValidationError("kepler_propagate requires a bound state (E < 0)")

    r0, v0 = state.r, state.v
    radius0 = state.radius
    a = elements.r_c
    n = elements.orbital_omega
    sqrt_za = math.sqrt(Z * a)

    e_cos = 1.0 - radius0 / a
    e_sin = float(r0 @ v0) / sqrt_za

    delta_m = math.remainder(n * dt, 2.0 * math.pi)
    x = _solve_kepler_difference(delta_m, e_cos, e_sin)
    dt_reduced = delta_m / n

    s, c = math.sin(x), math.cos(x)
    radius = a * (1.0 - e_cos * c + e_sin * s)
    f = 1.0 - (a / radius0) * (1.0 - c)
    g = dt_reduced + (s - x) / n
    f_dot = -sqrt_za * s / (radius * radius0)
    g_dot = 1.0 - (a / radius) * (1.0 - c)
    return State(t=state.t + dt, r=f * r0 + g * v0, v=f_dot * r0 + g_dot * v0)


def kepler_radial_cdf(r, a: float, eccentricity: float):
    """Fraction of one orbital period spent at radius below ``r``.

    With cos(E) = (1 - r/a)/e the time fraction is (E - e sin E)/pi.
    """
    r = np.asarray(r, dtype=float)
    cos_e = np.clip((1.0 - r / a) / eccentricity, -1.0, 1.0)
    anomaly = np.arccos(cos_e)
    cdf = (anomaly - eccentricity * np.sin(anomaly)) / math.pi
    return float(cdf) if cdf.ndim == 0 else cdf


def kepler_radial_density(r, a: float, eccentricity: float):
    """Time-in-radius density r / (pi a sqrt(a^2 e^2 - (r - a)^2)) on the open interval."""
    r = np.asarray(r, dtype=float)
    gap = (a * eccentricity) ** 2 - (r - a) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        density = np.where(gap > 0.0, r / (math.pi * a * np.sqrt(np.where(gap > 0.0, gap, 1.0))), 0.0)
    return float(density) if density.ndim == 0 else density
