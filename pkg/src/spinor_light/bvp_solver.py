"""Frequency-domain oracle: RK4 integration of ``dE/dz = i K.sigma E``.

Nothing here touches the closed-form propagator; R and T come from the
numerically integrated transfer matrix and the two-point boundary conditions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels, medium
from .errors import ConfigError, SingularBoundarySystem
from .medium import MediumConfig
from .pauli_core import KVector, pauli_combination

MIN_STEPS = 16


@dataclass(frozen=True)
class BvpSolution:
    m_num: np.ndarray
    r: complex
    t: complex
    step_count: int
    estimated_error: float

    @property
    def r2(self) -> float:
        return abs(self.r) ** 2

    @property
    def t2(self) -> float:
        return abs(self.t) ** 2


def _check_steps(steps: int) -> int:
    steps = int(steps)
    if steps < MIN_STEPS:
        raise ConfigError(f"steps must be >= {MIN_STEPS}, got {steps}")
    return steps


def integrate_transfer_batch(ks, length, steps: int) -> np.ndarray:
    """RK4 transfer matrices for many generators at once; returns (N, 2, 2)."""
    steps = _check_steps(steps)
    gen = np.array([1j * pauli_combination(k) for k in ks], dtype=np.complex128).reshape(-1, 2, 2)
    h = np.broadcast_to(np.asarray(length, dtype=float), (gen.shape[0],)) / steps
    return kernels.rk4_transfer(gen, h, steps)


def integrate_transfer(k: KVector, length: float, steps: int) -> np.ndarray:
    """Classical fixed-step RK4 transfer matrix over ``[0, length]``."""
    return integrate_transfer_batch([k], length, steps)[0]


def boundary_solution(m):
    """Solve ``(T, 0) = M (1, R)`` for R and T."""
    m22 = m[1, 1]
    if abs(m22) < 1e-300:
        raise SingularBoundarySystem("M22 vanishes; boundary system singular")
    r = -m[1, 0] / m22
    return complex(r), complex(m[0, 0] + m[0, 1] * r)


def _solution(m_fine, m_coarse, steps) -> BvpSolution:
    r, t = boundary_solution(m_fine)
    # Richardson estimate for a 4th-order method
    err = float(np.max(np.abs(m_fine - m_coarse))) / 15.0
    return BvpSolution(m_fine, r, t, steps, err)


def solve_rt(cfg: MediumConfig, d_omega: float, steps: int = 4096) -> BvpSolution:
    """R/T from the integrated propagator; losses via the complex detuning."""
    return solve_rt_many([(cfg, d_omega)], steps)[0]


def solve_rt_many(points, steps: int = 4096) -> list[BvpSolution]:
    """Vectorised :func:`solve_rt` over ``[(cfg, d_omega), ...]``."""
    steps = _check_steps(steps)
    if steps % 2:
        raise ConfigError("steps must be even (the error estimate halves it)")
    ks = [medium.lossy_k_vector(cfg, dw) for cfg, dw in points]
    lengths = np.array([cfg.length for cfg, _ in points], dtype=float)
    fine = integrate_transfer_batch(ks, lengths, steps)
    coarse = integrate_transfer_batch(ks, lengths, steps // 2)
    return [_solution(f, c, steps) for f, c in zip(fine, coarse)]
