"""Spinor slow light: a two-component probe field in a double-tripod EIT medium.

The probe envelopes obey an effective one-dimensional Dirac equation whose
mass is the two-photon detuning.  This package computes its dispersion and
scattering in closed form, cross-checks them with an RK4 boundary-value
solver and a time-domain integrator, and simulates the full linearised
atom-field model the effective description is derived from.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AsymptoticRegimeViolated,
    CflViolation,
    ConfigError,
    DenominatorVanishes,
    NonZeroDelta,
    NotConverged,
    PhaseSingular,
    SingularBoundarySystem,
    SpinorLightError,
    SweepPointError,
    ZeroDetuning,
)
from .medium import MediumConfig  # noqa: E402
from .scattering import ScatterResult, scatter  # noqa: E402

__all__ = [
    "__version__",
    "MediumConfig",
    "ScatterResult",
    "scatter",
    "SpinorLightError",
    "ConfigError",
    "PhaseSingular",
    "ZeroDetuning",
    "NonZeroDelta",
    "DenominatorVanishes",
    "AsymptoticRegimeViolated",
    "SingularBoundarySystem",
    "CflViolation",
    "NotConverged",
    "SweepPointError",
]
