"""Closed-form reflection and transmission of a monochromatic probe.

The incident field enters component 1 at z = 0; the boundary conditions are
``E(0) = (1, R)`` and ``E(L) = (T, 0)``.  Eliminating the transfer matrix
``M = exp(i K.sigma L)`` gives ``R = -M21/M22`` and ``T = 1/M22``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import medium
from .errors import (
    AsymptoticRegimeViolated,
    DenominatorVanishes,
    NonZeroDelta,
    PhaseSingular,
    SweepPointError,
)
from .medium import MediumConfig
from .pauli_core import _cos_sinc
from .tables import SweepTable

AXES = ("length", "d_omega", "delta", "phase_s", "gamma")
VARIANTS = ("exact", "zero_delta", "gap_center", "lossy", "lossy_asymptotic")

# beyond this |Im(K L)| cos/sin are evaluated with the growing exponential divided out
_SCALED_BRANCH = 20.0
ASYMPTOTIC_MIN_EXPONENT = 5.0


@dataclass(frozen=True)
class ScatterResult:
    r: complex
    t: complex

    @property
    def r2(self) -> float:
        return abs(self.r) ** 2

    @property
    def t2(self) -> float:
        return abs(self.t) ** 2

    @property
    def unitarity_defect(self) -> float:
        return 1.0 - self.r2 - self.t2

    def to_dict(self) -> dict:
        return {"r_re": self.r.real, "r_im": self.r.imag, "t_re": self.t.real,
                "t_im": self.t.imag, "r2": self.r2, "t2": self.t2,
                "defect": self.unitarity_defect}


def scatter_k(k, length: float) -> ScatterResult:
    """R and T for a given generator; works for real and complex K."""
    x = k.k_len * length
    if abs(x.imag) <= _SCALED_BRANCH:
        cos_x, sinc_x = _cos_sinc(x)
        denom = cos_x - 1j * k.kz * length * sinc_x
        if abs(denom) < 1e-300:
            raise DenominatorVanishes("K cos(KL) - i Kz sin(KL) vanishes")
        return ScatterResult((k.kx + 1j * k.ky) * length * sinc_x / denom, 1.0 / denom)
    # evanescent and long: cos, sin ~ e^{|Im x|}/2, divide it out
    ay = abs(x.imag)
    ep = cmath.exp(1j * x - ay)
    em = cmath.exp(-1j * x - ay)
    cos_s = 0.5 * (ep + em)
    sin_s = (ep - em) / 2j
    denom = k.k_len * cos_s - 1j * k.kz * sin_s
    if abs(denom) < 1e-300:
        raise DenominatorVanishes("K cos(KL) - i Kz sin(KL) vanishes")
    return ScatterResult((k.kx + 1j * k.ky) * sin_s / denom, math.exp(-ay) * k.k_len / denom)


def scatter(cfg: MediumConfig, d_omega: float) -> ScatterResult:
    """General R/T keeping the 1/c term; losses enter via the complex detuning."""
    return scatter_k(medium.lossy_k_vector(cfg, d_omega), cfg.length)


def scatter_zero_delta(cfg: MediumConfig, d_omega: float) -> ScatterResult:
    """Slow-light closed form at delta = 0 (a mirrorless frequency filter)."""
    if cfg.delta != 0:
        raise NonZeroDelta(f"scatter_zero_delta needs delta = 0, got {cfg.delta}")
    abs_s = abs(cfg.sin_s)
    kl = d_omega * cfg.length / (cfg.v0 * abs_s)
    sin_kl, cos_kl = math.sin(kl), math.cos(kl)
    denom = abs_s * cos_kl - 1j * sin_kl
    return ScatterResult(-1j * cfg.cos_s * sin_kl / denom, abs_s / denom)


def _sech(x: float) -> float:
    e = math.exp(-abs(x))
    return 2.0 * e / (1.0 + e * e)


def scatter_gap_center(cfg: MediumConfig) -> ScatterResult:
    """Band-centre tunnelling, d_omega = 0: ``R = tanh(Kx L)``, ``T = sech(Kx L)``."""
    x = cfg.delta * cfg.length / (cfg.v0 * cfg.sin_s)
    return ScatterResult(complex(math.tanh(x)), complex(_sech(x)))


def _require_right_angle(cfg: MediumConfig, tol: float) -> None:
    if not (cfg.sin_s > 0 and abs(cfg.cos_s) <= tol):
        raise PhaseSingular(f"lossy closed forms are derived for S = pi/2, got S = {cfg.phase_s}")


def scatter_lossy_gap_center(cfg: MediumConfig, phase_tol: float = 1e-12) -> ScatterResult:
    """Lossy band-centre R/T at S = pi/2 in the slow-light limit."""
    _require_right_angle(cfg, phase_tol)
    g_eff = medium.effective_decay(cfg)
    d_eff = medium.effective_delta(cfg)
    if d_eff == 0.0:
        return ScatterResult(0j, 1 + 0j)
    x = cfg.length * d_eff / cfg.v0
    e2 = math.exp(-2.0 * x)
    # denominator d_eff cosh x + g_eff sinh x, times 2 e^{-x}
    denom = (d_eff + g_eff) + (d_eff - g_eff) * e2
    t = 2.0 * d_eff * math.exp(-x) / denom
    r = cfg.delta * (1.0 - e2) / denom
    return ScatterResult(complex(r), complex(t))


def scatter_lossy_asymptotic(cfg: MediumConfig, phase_tol: float = 1e-12) -> ScatterResult:
    """Long-sample limit of :func:`scatter_lossy_gap_center` (needs L d_eff / v0 >= 5)."""
    _require_right_angle(cfg, phase_tol)
    g_eff = medium.effective_decay(cfg)
    d_eff = medium.effective_delta(cfg)
    x = cfg.length * d_eff / cfg.v0
    if x < ASYMPTOTIC_MIN_EXPONENT:
        raise AsymptoticRegimeViolated(
            f"L d_eff / v0 = {x:.3g} < {ASYMPTOTIC_MIN_EXPONENT}; use scatter_lossy_gap_center")
    return ScatterResult(complex(cfg.delta / (d_eff + g_eff)),
                         complex(2.0 * d_eff / (d_eff + g_eff) * math.exp(-x)))


def scatter_variant(cfg: MediumConfig, d_omega: float, variant: str) -> ScatterResult:
    if variant == "exact":
        return scatter(cfg, d_omega)
    if variant == "zero_delta":
        return scatter_zero_delta(cfg, d_omega)
    if variant == "gap_center":
        return scatter_gap_center(cfg)
    if variant == "lossy":
        return scatter_lossy_gap_center(cfg)
    if variant == "lossy_asymptotic":
        return scatter_lossy_asymptotic(cfg)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def point_config(cfg: MediumConfig, axis: str, value: float, d_omega: float):
    """Apply one axis value; returns ``(cfg, d_omega)`` for that point."""
    if axis not in AXES:
        raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")
    if axis == "d_omega":
        return cfg, float(value)
    return cfg.replace(**{axis: float(value)}), d_omega


def validate_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a nonempty 1D sequence")
    if not np.all(np.isfinite(grid)):
        raise ValueError("grid must be finite")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return grid


def sweep(cfg: MediumConfig, axis: str, grid, variant: str = "exact",
          d_omega: float = 0.0) -> SweepTable:
    """Evaluate one closed form along an axis; a failing point raises SweepPointError."""
    grid = validate_grid(grid)
    if axis not in AXES:
        raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    r2 = np.empty(grid.size)
    t2 = np.empty(grid.size)
    for i, value in enumerate(grid):
        try:
            pcfg, dw = point_config(cfg, axis, value, d_omega)
            res = scatter_variant(pcfg, dw, variant)
        except Exception as exc:  # noqa: BLE001 - re-raised with the row index
            raise SweepPointError(i, exc) from exc
        r2[i], t2[i] = res.r2, res.t2
    return SweepTable(axis, grid, r2, t2)
