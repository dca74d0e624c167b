import math

import numpy as np
import pytest

from SEDAtom.sed_utils import (
    CutoffKind,
    CutoffPolicy,
    DiagnosticsConfig,
    FieldModel,
    ForceTerm,
    InitialCondition,
    IntegratorKind,
    SimConfig,
    State,
)

COULOMB_ONLY = frozenset({ForceTerm.COULOMB})
COULOMB_RR = frozenset({ForceTerm.COULOMB, ForceTerm.RADIATION_REACTION})
WITH_FIELD = frozenset({ForceTerm.COULOMB, ForceTerm.RADIATION_REACTION, ForceTerm.FIELD_ELECTRIC})


def perihelion_state(a: float = 1.0, e: float = 0.5, Z: int = 1) -> State:
    """Bound state at perihelion of the ellipse with semi-major axis ``a`` and eccentricity ``e``."""
    r_p = a * (1.0 - e)
    v_p = math.sqrt(Z * (1.0 + e) / r_p)
    return State(t=0.0, r=(r_p, 0.0, 0.0), v=(0.0, v_p, 0.0))


@pytest.fixture
def kepler_config():
    """Coulomb-only configuration with fixed RK4."""
    return SimConfig(
        force_flags=COULOMB_ONLY,
        field_model=FieldModel.NONE,
        integrator=IntegratorKind.FIXED_RK4,
        steps_per_orbit=200,
        t_max=20.0,
        singular_radius=1e-6,
    )


@pytest.fixture
def field_config():
    """Small, fast dipole configuration with a moving cutoff."""
    return SimConfig(
        force_flags=WITH_FIELD,
        field_model=FieldModel.DIPOLE_1D,
        cutoff=CutoffPolicy(kind=CutoffKind.MOVING, multiple=2.5, floor=0.0, ceiling=10.0),
        n_modes=100,
        steps_per_orbit=100,
        field_updates_per_orbit=10,
        t_max=4.0 * 2.0 * math.pi,
        seed=7,
        initial_state=InitialCondition(kind="circular", r0=1.0),
        diagnostics=DiagnosticsConfig(trace_stride=5),
    )


@pytest.fixture
def fixed_band_config():
    """Dipole configuration over a fixed band (0.5, 5) a.u."""
    return SimConfig(
        field_model=FieldModel.DIPOLE_1D,
        cutoff=CutoffPolicy(kind=CutoffKind.FIXED, omega_min=0.5, omega_max=5.0),
        n_modes=200,
        seed=3,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def perihelion():
    return perihelion_state
