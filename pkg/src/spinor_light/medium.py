"""Physical configuration of the double-tripod medium and its derived quantities.

All frequencies (omega, delta, gamma, detunings) are angular, in rad/s or in
whatever inverse-time unit the caller uses consistently.  ``c`` may be
``math.inf`` for the strict slow-light limit.
"""
from __future__ import annotations

import dataclasses
import math
import numbers
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, PhaseSingular, ZeroDetuning
from .pauli_core import I2, SX, SY, SZ, KVector

DEFAULT_S_MIN = 1e-3

_FIELDS = ("omega", "phase_s", "delta", "gamma", "v0", "c", "length", "s_min", "hbar")


@dataclass(frozen=True)
class MediumConfig:
    """Validated, immutable medium parameters.

    Either ``v0`` is given directly or it is derived from the coupling-density
    product via ``v0 = c omega^2 / g2n`` (see :meth:`from_dict`).
    """

    omega: float
    phase_s: float
    delta: float = 0.0
    gamma: float = 0.0
    v0: float = 1.0
    c: float = math.inf
    length: float = 1.0
    s_min: float = DEFAULT_S_MIN
    hbar: float = 1.0

    def __post_init__(self):
        for name in _FIELDS:
            val = getattr(self, name)
            if not isinstance(val, numbers.Real) or isinstance(val, bool):
                raise ConfigError(f"{name} must be a real number, got {val!r}")
            object.__setattr__(self, name, float(val))
            if name != "c" and not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.omega <= 0:
            raise ConfigError("omega must be > 0")
        if self.gamma < 0:
            raise ConfigError("gamma must be >= 0")
        if self.v0 <= 0:
            raise ConfigError("v0 must be > 0")
        if not self.c > self.v0:
            raise ConfigError("c must exceed v0")
        if self.length < 0:
            raise ConfigError("length must be >= 0")
        if self.s_min < 0 or self.hbar <= 0:
            raise ConfigError("s_min must be >= 0 and hbar > 0")
        if abs(math.sin(self.phase_s)) < self.s_min:
            raise PhaseSingular(
                f"|sin S| = {abs(math.sin(self.phase_s)):.3g} below s_min = {self.s_min:g}; "
                "the Rabi matrix is not invertible")

    @property
    def g2n(self) -> float:
        return self.c * self.omega ** 2 / self.v0

    @property
    def slow_light_ratio(self) -> float:
        """v0 / c (zero in the strict slow-light limit)."""
        return self.v0 / self.c

    @property
    def sin_s(self) -> float:
        return math.sin(self.phase_s)

    @property
    def cos_s(self) -> float:
        # cos(pi/2) is 6e-17 in floating point; snap it so the S = pi/2
        # special cases come out exactly decoupled
        val = math.cos(self.phase_s)
        return 0.0 if abs(val) < 1e-15 else val

    def replace(self, **changes) -> "MediumConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = {name: getattr(self, name) for name in _FIELDS}
        if math.isinf(self.c):
            out["c"] = "inf"
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "MediumConfig":
        """Build from plain numbers; accepts ``g2n`` instead of ``v0``.

        ``gamma1``/``gamma2`` may be given but must be equal.
        """
        data = dict(data)
        g1, g2 = data.pop("gamma1", None), data.pop("gamma2", None)
        if g1 is not None or g2 is not None:
            if g1 is None or g2 is None or float(g1) != float(g2):
                raise ConfigError("unequal excited-state decay rates are not supported")
            if "gamma" in data and float(data["gamma"]) != float(g1):
                raise ConfigError("gamma disagrees with gamma1/gamma2")
            data["gamma"] = float(g1)
        if data.get("c") == "inf":
            data["c"] = math.inf
        if "g2n" in data:
            g2n = float(data.pop("g2n"))
            if "v0" in data:
                raise ConfigError("give either v0 or g2n, not both")
            if g2n <= 0:
                raise ConfigError("g2n must be > 0")
            c = float(data.get("c", math.inf))
            if math.isinf(c):
                raise ConfigError("g2n requires a finite c")
            data["v0"] = c * float(data["omega"]) ** 2 / g2n
        unknown = set(data) - set(_FIELDS)
        if unknown:
            raise ConfigError(f"unknown medium keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class DispersionPoint:
    dk: float
    omega_plus: float
    omega_minus: float


def rabi_matrix(cfg: MediumConfig) -> np.ndarray:
    """Control Rabi matrix ``(omega/sqrt 2)(I + e^{iS} sx)``."""
    return cfg.omega / math.sqrt(2.0) * (I2 + np.exp(1j * cfg.phase_s) * SX)


def detuning_matrix(cfg: MediumConfig) -> np.ndarray:
    """Two-photon detuning matrix ``diag(delta, -delta)``.

    This sign assignment is the one for which the closed form of
    :func:`d_tilde` equals ``rabi_matrix @ detuning_matrix @ inv(rabi_matrix)``.
    """
    return np.diag([cfg.delta, -cfg.delta]).astype(np.complex128)


def inv_group_velocity(cfg: MediumConfig) -> np.ndarray:
    """Inverse group-velocity matrix (with the leading sz), slow-light part only."""
    s = cfg.sin_s
    return (SZ - 1j * cfg.cos_s * SY) / (cfg.v0 * s * s)


def group_matrix(cfg: MediumConfig) -> np.ndarray:
    """Coefficient of the time derivative, ``sz/c + inv_group_velocity``.

    Equal to ``A sz - i B sy``; it squares to ``(A^2 - B^2) I``.
    """
    return SZ / cfg.c + inv_group_velocity(cfg)


def characteristic_speed(cfg: MediumConfig) -> float:
    """``1/sqrt(A^2 - B^2)``; tends to ``v0 |sin S|`` as v0/c -> 0."""
    s2 = cfg.sin_s ** 2
    a = 1.0 / cfg.c + 1.0 / (cfg.v0 * s2)
    b = cfg.cos_s / (cfg.v0 * s2)
    return 1.0 / math.sqrt((a - b) * (a + b))


def d_tilde(cfg: MediumConfig) -> np.ndarray:
    """``(delta / sin S)(i cos S sz + sy)``."""
    return cfg.delta / cfg.sin_s * (1j * cfg.cos_s * SZ + SY)


def effective_decay(cfg: MediumConfig) -> float:
    """Probe damping rate ``gamma delta^2 / omega^2``."""
    return cfg.gamma * cfg.delta ** 2 / cfg.omega ** 2


def effective_delta(cfg: MediumConfig) -> float:
    return math.hypot(cfg.delta, effective_decay(cfg))


def k_vector(cfg: MediumConfig, d_omega) -> KVector:
    """Spatial generator for a monochromatic probe detuned by ``d_omega``.

    ``d_omega`` may be complex (the lossy substitution uses that).
    """
    s = cfg.sin_s
    s2 = s * s
    d_omega = complex(d_omega)
    kx = cfg.delta / (cfg.v0 * s)
    ky = -d_omega * cfg.cos_s / (cfg.v0 * s2)
    kz = d_omega / cfg.c + d_omega / (cfg.v0 * s2)
    return KVector.from_components(kx, ky, kz)


def lossy_d_omega(cfg: MediumConfig, d_omega) -> complex:
    """Detuning with the damping folded in: ``d_omega + i gamma_eff``.

    With fields ~ exp(-i d_omega t) the damped equation is the lossless one at
    this complex argument.
    """
    return complex(d_omega) + 1j * effective_decay(cfg)


def lossy_k_vector(cfg: MediumConfig, d_omega) -> KVector:
    return k_vector(cfg, lossy_d_omega(cfg, d_omega))


def dispersion(cfg: MediumConfig, dk):
    """Slow-light Dirac branches ``+-sqrt(delta^2 + dk^2 v0^2 sin^2 S)``.

    ``dk`` may be a scalar or an array; the result fields follow its shape.
    """
    speed = cfg.v0 * abs(cfg.sin_s)
    dk_arr = np.asarray(dk, dtype=float)
    plus = np.hypot(cfg.delta, dk_arr * speed)
    if plus.ndim == 0:
        return DispersionPoint(float(dk_arr), float(plus), -float(plus))
    return DispersionPoint(dk_arr, plus, -plus)


def effective_mass(cfg: MediumConfig) -> float:
    """``hbar delta / (v0 sin S)^2`` (sign follows delta)."""
    return cfg.hbar * cfg.delta / (cfg.v0 * cfg.sin_s) ** 2


def compton_length(cfg: MediumConfig) -> float:
    """Tunnelling length ``v0 |sin S| / |delta|``."""
    if cfg.delta == 0:
        raise ZeroDetuning("Compton length is infinite at delta = 0")
    return cfg.v0 * abs(cfg.sin_s) / abs(cfg.delta)


def oscillation_period(cfg: MediumConfig) -> float:
    """Spacing in d_omega between transmission maxima at delta = 0: ``pi v0 |sin S| / L``."""
    if cfg.length == 0:
        raise ConfigError("oscillation period is undefined for L = 0")
    return math.pi * cfg.v0 * abs(cfg.sin_s) / cfg.length
