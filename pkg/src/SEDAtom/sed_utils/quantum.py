"""Quantum-mechanical reference quantities for the hydrogenic ground state."""

import numpy as np
import scipy.stats

from .errors import ValidationError


def ground_state_radial_density(r, Z: int = 1):
    """Radial probability density P(r) = 4 Z^3 r^2 exp(-2 Z r) of the 1s state.

    Args:
        r: Radius or array of radii (a.u., >= 0)
        Z: Nuclear charge

    Returns:
        Density per unit radius, same shape as ``r``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValidationError("Radius must be non-negative")
    density = 4.0 * Z**3 * r**2 * np.exp(-2.0 * Z * r)
    return float(density) if density.ndim == 0 else density


def radial_cdf(r, Z: int = 1):
    """Closed-form CDF of P(r): 1 - exp(-2Zr)(1 + 2Zr + 2Z^2 r^2)."""
    r = np.asarray(r, dtype=float)
    x = 2.0 * Z * np.clip(r, 0.0, None)
    with np.errstate(invalid="ignore"):
        tail = np.where(np.isfinite(x), np.exp(-x) * (x + 0.5 * x**2), 0.0)
    cdf = -np.expm1(-x) - tail
    return float(cdf) if cdf.ndim == 0 else cdf


def ground_state_distribution(Z: int = 1):
    """Frozen scipy distribution identical to P(r): Gamma(shape 3, scale 1/(2Z))."""
    return scipy.stats.gamma(a=3.0, scale=1.0 / (2.0 * Z))


def mean_radius(Z: int = 1) -> float:
    """Expectation value <r> = 3/(2Z) of the 1s state."""
    return 1.5 / Z


def energy_level(n: int, Z: int = 1) -> float:
    """Hydrogenic level E_n = -Z^2/(2 n^2) in Hartree."""
    if n < 1:
        raise ValidationError(f"Principal quantum number must be >= 1, got {n}")
    return -(Z**2) / (2.0 * n**2)


def degeneracy(n: int) -> int:
    """Degeneracy n^2 of level n (spin not included)."""
    if n < 1:
        raise ValidationError(f"Principal quantum number must be >= 1, got {n}")
    return n * n
