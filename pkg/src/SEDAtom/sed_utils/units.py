"""Atomic units, CODATA constants and scaled (Bohr-unit) reporting.

Internally every quantity is in atomic units (hbar = m = e = 1, c = 1/alpha).
The "scaled" units used in reports divide out the nuclear charge so that the
quantum ground state reads E = -0.5 and r = 1 for every Z.
"""

from dataclasses import dataclass
from enum import Enum

from .errors import ValidationError


@dataclass(frozen=True)
class Constants:
    """Physical constants, CODATA 2018.

    Attributes:
        alpha: Fine-structure constant
        c_au: Speed of light in atomic units (1/alpha)
        au_time_si: Seconds per atomic unit of time
        au_length_si: Meters per Bohr radius
        au_energy_si: Joules per Hartree
    """

    alpha: float = 7.2973525693e-3
    au_time_si: float = 2.4188843265857e-17
    au_length_si: float = 5.29177210903e-11
    au_energy_si: float = 4.3597447222071e-18
    hbar: float = 1.0
    m: float = 1.0
    e: float = 1.0

    @property
    def c_au(self) -> float:
        return 1.0 / self.alpha


CONSTANTS = Constants()
ALPHA = CONSTANTS.alpha
C_AU = CONSTANTS.c_au
ANGSTROM_AU = 1.0e-10 / CONSTANTS.au_length_si
CM_AU = 1.0e-2 / CONSTANTS.au_length_si


class Dimension(str, Enum):
    LENGTH = "length"
    TIME = "time"
    ENERGY = "energy"


_SI_FACTORS = {
    Dimension.LENGTH: CONSTANTS.au_length_si,
    Dimension.TIME: CONSTANTS.au_time_si,
    Dimension.ENERGY: CONSTANTS.au_energy_si,
}


def _dimension(dimension) -> Dimension:
    try:
        return Dimension(dimension)
    except ValueError:
        raise ValidationError(
            f"Unknown dimension '{dimension}'. Expected one of {[d.value for d in Dimension]}"
        ) from None


def to_si(value: float, dimension) -> float:
    """Convert an atomic-unit value to SI (m, s or J)."""
    return value * _SI_FACTORS[_dimension(dimension)]


def from_si(value: float, dimension) -> float:
    """Convert an SI value (m, s or J) to atomic units."""
    return value / _SI_FACTORS[_dimension(dimension)]


def scaled_report(value: float, Z: int, kind) -> float:
    """Express an atomic-unit value in Z-scaled Bohr units.

    Energy is divided by Z^2, length multiplied by Z, and time divided by the
    Bohr time t0 = 1/Z^2.

    Args:
        value: Quantity in atomic units
        Z: Nuclear charge (>= 1)
        kind: "energy", "length" or "time"

    Returns:
        The scaled value.
    """
    if Z < 1:
        raise ValidationError(f"Nuclear charge must be >= 1, got {Z}")
    kind = _dimension(kind)
    if kind == Dimension.ENERGY:
        return value / Z**2
    if kind == Dimension.LENGTH:
        return value * Z
    return value * Z**2


def unscaled(value: float, Z: int, kind) -> float:
    """Inverse of :func:`scaled_report`."""
    kind = _dimension(kind)
    if kind == Dimension.ENERGY:
        return value * Z**2
    if kind == Dimension.LENGTH:
        return value / Z
    return value / Z**2
