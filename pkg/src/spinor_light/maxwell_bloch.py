"""Full linearised atom-field model in the co-rotating (tilde) frame.

Variables per cell, in units where omega = c = 1:

* ``e = g E / omega``: probe Rabi spinor; component 1 moves right at c,
  component 2 left;
* ``psi_e = Phi_e / sqrt(n)``, ``psi_s = Phi_s / sqrt(n)``: excited and spin
  amplitudes normalised to the ground amplitude.

Equations::

    de/dt      = -sz de/dz + i g2n psi_e
    dpsi_e/dt  = -gamma psi_e + i W psi_s + i e
    dpsi_s/dt  = -i dhat psi_s + i W^H psi_e

with ``W`` the Rabi matrix, ``dhat`` the two-photon detuning matrix and
``g2n = c / v0`` in these units.  The ground amplitude is held at sqrt(n).
The 6x6 local block is integrated exactly (one matrix exponential per run);
the envelopes are shifted one cell per step at Courant number 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from . import kernels, medium
from .errors import CflViolation, ConfigError, NotConverged
from .medium import MediumConfig
from .pauli_core import I2, SZ, expm2
from .scattering import ScatterResult
from .timedomain import DEFAULT_RAMP_TRANSITS, DRIFT_TOLERANCE, PulseRecord, Drive, steady_from_record
from .tables import write_series_csv
from .bvp_solver import boundary_solution

LINEARIZATION_WARN = 0.1
MIN_SLOW_TRANSITS = 5.0
DEFAULT_TRANSITS = 10.0


# ---------------------------------------------------------------------------
# adiabatic-elimination maps
# ---------------------------------------------------------------------------

def adiabatic_coherence(cfg: MediumConfig, rabi_field) -> np.ndarray:
    """Spin coherence ``Phi_s/sqrt(n) = -W^{-1} (g E)`` with excited states eliminated."""
    w = medium.rabi_matrix(cfg)
    return -np.linalg.solve(w, np.asarray(rabi_field, dtype=np.complex128))


def excited_amplitude(cfg: MediumConfig, rabi_field, d_omega: float = 0.0) -> np.ndarray:
    """Leading excited amplitude ``Phi_e/sqrt(n) = (W^H)^{-1} (d_omega - dhat) W^{-1} (g E)``.

    Monochromatic fields ~ exp(-i d_omega t), so ``i d/dt -> d_omega``.
    """
    w = medium.rabi_matrix(cfg)
    inner = np.linalg.solve(w, np.asarray(rabi_field, dtype=np.complex128))
    inner = (d_omega * I2 - medium.detuning_matrix(cfg)) @ inner
    return np.linalg.solve(w.conj().T, inner)


# ---------------------------------------------------------------------------
# exact frequency-domain response of the full model
# ---------------------------------------------------------------------------

def susceptibility_generator(cfg: MediumConfig, d_omega: float) -> np.ndarray:
    """Exact spatial generator ``G`` of ``de/dz = G e`` for the full model at one frequency.

    Solving the atomic equations at ``exp(-i d_omega t)`` gives
    ``psi_e = -X e`` with ``X = [(d_omega + i gamma) - W (d_omega - dhat)^{-1} W^H]^{-1}``,
    so ``G = (i/c) sz (d_omega - g2n X)``.  No adiabatic approximation.
    """
    if math.isinf(cfg.c):
        raise ConfigError("the full model needs a finite c")
    w = medium.rabi_matrix(cfg)
    dhat = medium.detuning_matrix(cfg)
    inner = w @ np.linalg.solve(d_omega * I2 - dhat, w.conj().T)
    x = np.linalg.inv((d_omega + 1j * cfg.gamma) * I2 - inner)
    return (1j / cfg.c) * SZ @ (d_omega * I2 - cfg.g2n * x)


def linear_response(cfg: MediumConfig, d_omega: float) -> ScatterResult:
    """R and T of the full model at one frequency (frequency-domain, exact)."""
    m = expm2(susceptibility_generator(cfg, d_omega) * cfg.length)
    return ScatterResult(*boundary_solution(m))


# ---------------------------------------------------------------------------
# time-domain simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MbParams:
    """Dimensionless parameters (frequencies / omega, lengths / (c/omega))."""

    delta: float
    gamma: float
    phase_s: float
    g2n: float
    length: float

    @classmethod
    def from_config(cls, cfg: MediumConfig) -> "MbParams":
        if math.isinf(cfg.c):
            raise ConfigError("the full model needs a finite c")
        return cls(cfg.delta / cfg.omega, cfg.gamma / cfg.omega, cfg.phase_s,
                   cfg.c / cfg.v0, cfg.length * cfg.omega / cfg.c)

    def local_generator(self) -> np.ndarray:
        w = (I2 + np.exp(1j * self.phase_s) * np.array([[0, 1], [1, 0]])) / math.sqrt(2.0)
        dhat = np.diag([self.delta, -self.delta]).astype(np.complex128)
        a = np.zeros((6, 6), dtype=np.complex128)
        if self.g2n > 0:
            # g2n = 0 is read as g -> 0 at fixed E: the field and atoms decouple
            a[0:2, 2:4] = 1j * self.g2n * I2
            a[2:4, 0:2] = 1j * I2
        a[2:4, 2:4] = -self.gamma * I2
        a[2:4, 4:6] = 1j * w
        a[4:6, 2:4] = 1j * w.conj().T
        a[4:6, 4:6] = -1j * dhat
        return a


@dataclass
class MbGrid:
    """Cell grid of the full model; ``state[i] = (e1, e2, psi_e1, psi_e2, psi_s1, psi_s2)``."""

    z: np.ndarray
    state: np.ndarray
    time: float
    dt: float
    dz: float
    params: MbParams
    drive: Drive = field(default_factory=lambda: Drive(0.0))

    @property
    def field(self) -> np.ndarray:
        return self.state[:, 0:2]

    @property
    def phi_e(self) -> np.ndarray:
        return self.state[:, 2:4]

    @property
    def phi_s(self) -> np.ndarray:
        return self.state[:, 4:6]


@dataclass
class MbSteadyState:
    r2: float
    t2: float
    record: PulseRecord
    converged: bool
    drift: float
    diagnostics: dict
    grid: MbGrid
    snapshots: list = field(default_factory=list)


def make_mb_grid(cfg_or_params, n_z: int, *, dt: float | None = None,
                 drive: Drive | None = None) -> MbGrid:
    """Grid in dimensionless units; ``dt`` defaults to ``dz`` (Courant 1 at c = 1)."""
    params = cfg_or_params if isinstance(cfg_or_params, MbParams) else MbParams.from_config(
        cfg_or_params)
    if n_z < 2:
        raise ConfigError("n_z must be >= 2")
    if params.length <= 0:
        raise ConfigError("time-domain runs need L > 0")
    dz = params.length / n_z
    z = (np.arange(n_z) + 0.5) * dz
    state = np.zeros((n_z, 6), dtype=np.complex128)
    return MbGrid(z, state, 0.0, dz if dt is None else float(dt), dz, params, drive or Drive(0.0))


def _propagators(params: MbParams, dt: float):
    a = params.local_generator()
    return scipy.linalg.expm(a * dt), scipy.linalg.expm(a * (0.5 * dt))


def _mb_advance(grid: MbGrid, nsteps: int, props=None):
    nu = grid.dt / grid.dz
    if nu > 1 + 1e-12:
        raise CflViolation(f"c dt/dz = {nu:.6g} > 1")
    nu = 1.0 if abs(nu - 1.0) <= 1e-12 else nu
    pf, ph = props if props is not None else _propagators(grid.params, grid.dt)
    tm = grid.time + (np.arange(nsteps) + 0.5) * grid.dt
    weights = np.array([1.0 / grid.params.g2n] * 2 + [1.0] * 4) * grid.dz \
        if grid.params.g2n > 0 else np.array([1.0] * 6) * grid.dz
    out = kernels.advance(grid.state, pf, ph, np.eye(2), nu, grid.drive.left(tm),
                          grid.drive.right(tm), np.diag(weights))
    new = replace(grid, state=out[0], time=grid.time + nsteps * grid.dt)
    return new, tm, out


def step_mb(grid: MbGrid, cfg: MediumConfig | MbParams | None = None) -> MbGrid:
    """One Strang step (exact local 6x6 half-steps around a one-cell shift)."""
    if cfg is not None:
        params = cfg if isinstance(cfg, MbParams) else MbParams.from_config(cfg)
        grid = replace(grid, params=params)
    return _mb_advance(grid, 1)[0]


def run_mb_steady(cfg: MediumConfig, d_omega: float, n_z: int, t_max: float | None = None, *,
                  probe_rabi: float = 0.01, ramp_transits: float = DEFAULT_RAMP_TRANSITS,
                  snapshot_times=(), strict: bool = False) -> MbSteadyState:
    """CW-driven run of the full model to steady state.

    ``d_omega`` and ``t_max`` are in the units of ``cfg``; ``probe_rabi`` is
    the incident ``g E / omega``.  ``t_max`` defaults to the ramp plus ten slow
    transit times ``L / v_char``.
    """
    params = MbParams.from_config(cfg)
    v_char = medium.characteristic_speed(cfg) / cfg.c
    transit = params.length / v_char
    ramp = ramp_transits * transit
    t_end = ramp + DEFAULT_TRANSITS * transit if t_max is None else t_max * cfg.omega
    if t_end < MIN_SLOW_TRANSITS * cfg.length / cfg.v0 * cfg.omega * (1 - 1e-12):
        raise ConfigError(f"t_max must cover >= {MIN_SLOW_TRANSITS:g} slow transit times")
    drive = Drive(probe_rabi, d_omega / cfg.omega, ramp)
    grid = make_mb_grid(params, n_z, drive=drive)
    nsteps = int(math.ceil(t_end / grid.dt - 1e-9))
    props = _propagators(params, grid.dt)

    snap_steps = {min(max(int(round(t * cfg.omega / grid.dt)), 1), nsteps) for t in snapshot_times}
    parts, snaps, done = [], [], 0
    for stop in sorted(snap_steps | {nsteps}):
        grid, tm, out = _mb_advance(grid, stop - done, props)
        parts.append((tm, out))
        done = stop
        if stop in snap_steps:
            snaps.append((grid.time / cfg.omega, np.abs(grid.state).copy()))
    cat = lambda j: np.concatenate([p[1][j] for p in parts])  # noqa: E731
    tm = np.concatenate([p[0] for p in parts])
    trans, refl, norm, fin, fout, peak = (cat(j) for j in range(1, 7))
    record = PulseRecord(tm / cfg.omega, np.abs(trans) ** 2, np.abs(refl) ** 2, norm,
                         fin / grid.dt * cfg.omega, fout / grid.dt * cfg.omega,
                         grid.dt / cfg.omega)
    spt = int(round(transit / grid.dt))
    r2, t2, drift = steady_from_record(record.transmitted, record.reflected, spt, probe_rabi ** 2)

    window = max(int(0.2 * nsteps), 1)
    diagnostics = {
        "max_phi_e": float(peak[-window:, 2:4].max()),
        "max_phi_s": float(peak[-window:, 4:6].max()),
        "peak_phi_e": float(peak[:, 2:4].max()),
        "peak_phi_s": float(peak[:, 4:6].max()),
        "balance_per_transit": record.relative_balance_per_transit(spt),
        "steps": nsteps,
        "n_z": n_z,
    }
    diagnostics["linearization_ok"] = max(diagnostics["peak_phi_e"],
                                          diagnostics["peak_phi_s"]) < LINEARIZATION_WARN
    if not diagnostics["linearization_ok"]:
        warnings.warn("atomic amplitudes exceed 10% of sqrt(n); linearisation is doubtful",
                      RuntimeWarning, stacklevel=2)
    res = MbSteadyState(r2, t2, record, drift < DRIFT_TOLERANCE, drift, diagnostics, grid, snaps)
    if strict and not res.converged:
        raise NotConverged(f"relative drift {drift:.3g} per transit at t_max", result=res)
    return res


def write_mb_snapshots_csv(path, snapshots, z, length_unit: float = 1.0) -> None:
    """Long-format dump of |e|, |psi_e|, |psi_s| per cell at each snapshot time."""
    cols = {k: [] for k in ("time", "z", "abs_e1", "abs_e2", "abs_phi_e1", "abs_phi_e2",
                            "abs_phi_s1", "abs_phi_s2")}
    for t, mag in snapshots:
        cols["time"].append(np.full(z.size, t))
        cols["z"].append(z * length_unit)
        for j, name in enumerate(list(cols)[2:]):
            cols[name].append(mag[:, j])
    write_series_csv(path, {k: np.concatenate(v) for k, v in cols.items()})
