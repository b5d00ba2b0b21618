"""Time-domain integration of the effective two-component equation.

Two forms are supported:

* ``dirac``: the slow-light Dirac equation at S = pi/2,
  ``dE/dt = -v0 sz dE/dz - i delta sy E - gamma_eff E``;
* ``general``: ``M dE/dt + dE/dz = -C sx E - lam sz E`` for any admissible S,
  with ``M = A sz - i B sy``, ``C = delta/(v0 sin S)`` and the loss rate
  ``lam = gamma v0 C^2 / omega^2``.

Since ``M^2 = (A^2 - B^2) I`` and ``A > |B|`` whenever sin S != 0, the general
system is strictly hyperbolic with speeds ``+-1/sqrt(A^2 - B^2)``.  It is
advanced in the eigenbasis of M, where the two characteristic variables
simply move right and left.  In the Dirac form that basis is the identity.

Each step is Strang split: exact local half-step, upwind advection (an exact
one-cell shift at Courant number 1), exact local half-step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels, medium
from .errors import CflViolation, ConfigError, NotConverged
from .medium import MediumConfig
from .pauli_core import SX, SY, SZ, I2, expm2
from .tables import write_series_csv

STEADY_WINDOW = 0.2
DRIFT_TOLERANCE = 1e-4
MIN_TRANSITS = 10.0
DEFAULT_RAMP_TRANSITS = 5.0
_CFL_SLACK = 1e-12


@dataclass(frozen=True)
class Drive:
    """CW input ``amplitude * ramp(t) * exp(-i d_omega t)`` on component 1 at z = 0.

    ``ramp`` rises as sin^2 over ``ramp_time``; component 2 enters at z = L
    with ``right_amplitude`` (zero for the scattering set-up).
    """

    amplitude: complex = 1.0
    d_omega: float = 0.0
    ramp_time: float = 0.0
    right_amplitude: complex = 0.0

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        if self.ramp_time <= 0:
            return np.ones_like(t)
        u = np.clip(t / self.ramp_time, 0.0, 1.0)
        return np.sin(0.5 * np.pi * u) ** 2

    def left(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * self.envelope(t) * np.exp(-1j * self.d_omega * t)

    def right(self, t):
        t = np.asarray(t, dtype=float)
        return self.right_amplitude * self.envelope(t) * np.exp(-1j * self.d_omega * t)


@dataclass
class FieldGrid:
    """Cell-centred field on [0, L]: ``field[i] = (E1, E2)`` at ``z[i]``."""

    z: np.ndarray
    field: np.ndarray
    time: float
    dt: float
    dz: float
    drive: Drive = field(default_factory=lambda: Drive(0.0))

    @property
    def n_z(self) -> int:
        return self.z.size

    def copy(self) -> "FieldGrid":
        return replace(self, z=self.z.copy(), field=self.field.copy())


@dataclass
class PulseRecord:
    """Boundary fluxes and stored norm, one sample per step.

    ``times`` are the mid-step instants at which boundary values are taken;
    ``norm`` is the integral of |E|^2 after the step.
    """

    times: np.ndarray
    transmitted: np.ndarray
    reflected: np.ndarray
    norm: np.ndarray
    influx: np.ndarray
    outflux: np.ndarray
    dt: float
    initial_norm: float = 0.0

    def balance_residual(self) -> np.ndarray:
        """Per-step ``dN - (in - out) dt``; zero for a lossless exact-shift run."""
        prev = np.concatenate(([self.initial_norm], self.norm[:-1]))
        return (self.norm - prev) - (self.influx - self.outflux) * self.dt

    def relative_balance_per_transit(self, steps_per_transit: int) -> float:
        """Worst over transits of |sum residual| / total inflow."""
        res = self.balance_residual()
        inflow = self.influx * self.dt
        worst = 0.0
        n = max(int(steps_per_transit), 1)
        for start in range(0, res.size, n):
            total_in = float(np.sum(inflow[start:start + n]))
            if total_in > 0:
                worst = max(worst, abs(float(np.sum(res[start:start + n]))) / total_in)
        return worst

    def to_csv(self, path) -> None:
        write_series_csv(path, {"time": self.times, "transmitted": self.transmitted,
                                "reflected": self.reflected, "norm": self.norm})


@dataclass
class SteadyState:
    r2: float
    t2: float
    record: PulseRecord
    converged: bool
    drift: float
    grid: FieldGrid
    snapshots: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# scheme set-up
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Scheme:
    speed: float
    basis: np.ndarray      # columns: right- and left-moving eigenvectors in E space
    generator: np.ndarray  # local d/dt in the characteristic basis

    def propagators(self, dt):
        return expm2(self.generator * dt), expm2(self.generator * (0.5 * dt))


def _require_dirac_phase(cfg: MediumConfig) -> None:
    if not (cfg.sin_s > 0 and cfg.cos_s == 0.0):
        raise ConfigError(f"the Dirac form needs S = pi/2, got S = {cfg.phase_s}")


def dirac_scheme(cfg: MediumConfig) -> _Scheme:
    _require_dirac_phase(cfg)
    gen = -1j * cfg.delta * SY - medium.effective_decay(cfg) * I2
    return _Scheme(cfg.v0, I2.copy(), gen)


def general_scheme(cfg: MediumConfig) -> _Scheme:
    m = medium.group_matrix(cfg)
    a = m[0, 0].real
    b = m[1, 0].real
    mu = math.sqrt((a - b) * (a + b))
    right = np.array([a + mu, b], dtype=np.complex128)
    left = np.array([b, a + mu], dtype=np.complex128)
    basis = np.column_stack([right / np.linalg.norm(right), left / np.linalg.norm(left)])
    m_inv = m / (mu * mu)
    coupling = cfg.delta / (cfg.v0 * cfg.sin_s)
    loss = cfg.gamma * cfg.v0 * coupling ** 2 / cfg.omega ** 2
    local_e = -m_inv @ (coupling * SX + loss * SZ)
    gen = np.linalg.solve(basis, local_e @ basis)
    return _Scheme(1.0 / mu, basis, gen)


def scheme_for(cfg: MediumConfig, kind: str) -> _Scheme:
    if kind == "dirac":
        return dirac_scheme(cfg)
    if kind == "general":
        return general_scheme(cfg)
    if kind == "auto":
        if cfg.sin_s > 0 and cfg.cos_s == 0.0 and math.isinf(cfg.c):
            return dirac_scheme(cfg)
        return general_scheme(cfg)
    raise ValueError(f"unknown scheme {kind!r}")


def make_grid(cfg: MediumConfig, n_z: int, *, kind: str = "auto", courant: float = 1.0,
              drive: Drive | None = None, field0=None) -> FieldGrid:
    """Uniform cell grid with ``dt = courant * dz / speed``; no drive unless one is given."""
    if n_z < 2:
        raise ConfigError("n_z must be >= 2")
    if cfg.length <= 0:
        raise ConfigError("time-domain runs need L > 0")
    if not 0 < courant <= 1:
        raise CflViolation(f"Courant number {courant} outside (0, 1]")
    sch = scheme_for(cfg, kind)
    dz = cfg.length / n_z
    z = (np.arange(n_z) + 0.5) * dz
    fld = np.zeros((n_z, 2), dtype=np.complex128) if field0 is None else np.array(
        field0, dtype=np.complex128).reshape(n_z, 2)
    return FieldGrid(z, fld, 0.0, courant * dz / sch.speed, dz, drive or Drive(0.0))


def _courant(grid: FieldGrid, speed: float) -> float:
    nu = speed * grid.dt / grid.dz
    if nu > 1 + _CFL_SLACK:
        raise CflViolation(f"v dt/dz = {nu:.6g} > 1")
    # snap so Courant 1 is an exact shift
    return 1.0 if abs(nu - 1.0) <= _CFL_SLACK else nu


def _drive_arrays(drive: Drive, t0: float, dt: float, nsteps: int):
    tm = t0 + (np.arange(nsteps) + 0.5) * dt
    return tm, drive.left(tm), drive.right(tm)


def _advance(grid: FieldGrid, sch: _Scheme, nsteps: int, qform=None):
    nu = _courant(grid, sch.speed)
    pf, ph = sch.propagators(grid.dt)
    tm, dl, dr = _drive_arrays(grid.drive, grid.time, grid.dt, nsteps)
    w = np.linalg.solve(sch.basis, grid.field.T).T
    out = kernels.advance(w, pf, ph, sch.basis, nu, dl, dr, qform)
    w = out[0]
    new = replace(grid, field=(sch.basis @ w.T).T.copy(), time=grid.time + nsteps * grid.dt)
    return new, tm, out


def step_dirac(grid: FieldGrid, cfg: MediumConfig) -> FieldGrid:
    """One Strang step of the S = pi/2 Dirac equation (returns a new grid)."""
    return _advance(grid, dirac_scheme(cfg), 1)[0]


def step_general(grid: FieldGrid, cfg: MediumConfig) -> FieldGrid:
    """One Strang step of the general-S equation in characteristic variables."""
    return _advance(grid, general_scheme(cfg), 1)[0]


def steady_from_record(trans2, refl2, steps_per_transit: int, amp2: float):
    """Final-window means and the relative drift between the last two transits."""
    n = trans2.size
    window = max(int(STEADY_WINDOW * n), 1)
    t2 = float(np.mean(trans2[-window:])) / amp2
    r2 = float(np.mean(refl2[-window:])) / amp2
    spt = max(int(steps_per_transit), 1)
    if n < 2 * spt:
        return r2, t2, math.inf
    last_t = np.mean(trans2[-spt:]) / amp2
    prev_t = np.mean(trans2[-2 * spt:-spt]) / amp2
    last_r = np.mean(refl2[-spt:]) / amp2
    prev_r = np.mean(refl2[-2 * spt:-spt]) / amp2
    scale = max(last_t + last_r, 1e-300)
    drift = max(abs(last_t - prev_t), abs(last_r - prev_r)) / scale
    return r2, t2, float(drift)


def run_to_steady_state(cfg: MediumConfig, d_omega: float, n_z: int,
                        t_max: float | None = None, *, kind: str = "auto",
                        courant: float = 1.0, ramp_transits: float = DEFAULT_RAMP_TRANSITS,
                        amplitude: float = 1.0, snapshot_times=(),
                        strict: bool = False) -> SteadyState:
    """Drive CW from the left and return time-averaged output fluxes.

    ``t_max`` defaults to ramp plus ten transit times.  When the drift over the
    last transit exceeds 1e-4 the result is flagged (or NotConverged raised
    with ``strict``).
    """
    sch = scheme_for(cfg, kind)
    transit = cfg.length / sch.speed
    ramp = ramp_transits * transit
    if t_max is None:
        t_max = ramp + MIN_TRANSITS * transit
    if t_max < MIN_TRANSITS * transit * (1 - 1e-12):
        raise ConfigError(f"t_max must cover >= {MIN_TRANSITS:g} transit times ({transit:.4g} each)")
    drive = Drive(amplitude, d_omega, ramp)
    grid = make_grid(cfg, n_z, kind=kind, courant=courant, drive=drive)
    nsteps = int(math.ceil(t_max / grid.dt - 1e-9))
    qform = sch.basis.conj().T @ sch.basis * grid.dz

    snap_steps = {min(max(int(round(t / grid.dt)), 1), nsteps) for t in snapshot_times}
    parts, snaps, done = [], [], 0
    for stop in sorted(snap_steps | {nsteps}):
        grid, tm, out = _advance(grid, sch, stop - done, qform)
        parts.append((tm, out))
        done = stop
        if stop in snap_steps:
            snaps.append((grid.time, np.abs(grid.field[:, 0]), np.abs(grid.field[:, 1])))
    tm = np.concatenate([p[0] for p in parts])
    trans = np.concatenate([p[1][1] for p in parts])
    refl = np.concatenate([p[1][2] for p in parts])
    norm = np.concatenate([p[1][3] for p in parts])
    fin = np.concatenate([p[1][4] for p in parts]) / grid.dt
    fout = np.concatenate([p[1][5] for p in parts]) / grid.dt
    record = PulseRecord(tm, np.abs(trans) ** 2, np.abs(refl) ** 2, norm, fin, fout, grid.dt)
    spt = int(round(transit / grid.dt))
    r2, t2, drift = steady_from_record(record.transmitted, record.reflected, spt,
                                       abs(amplitude) ** 2)
    res = SteadyState(r2, t2, record, drift < DRIFT_TOLERANCE, drift, grid, snaps)
    if strict and not res.converged:
        raise NotConverged(f"relative drift {drift:.3g} per transit at t_max", result=res)
    return res


def write_snapshots_csv(path, snapshots, z) -> None:
    """Long-format dump: one row per (time, z) with |E1| and |E2|."""
    times, zs, a1, a2 = [], [], [], []
    for t, e1, e2 in snapshots:
        times.append(np.full(z.size, t))
        zs.append(z)
        a1.append(e1)
        a2.append(e2)
    write_series_csv(path, {"time": np.concatenate(times), "z": np.concatenate(zs),
                            "abs_e1": np.concatenate(a1), "abs_e2": np.concatenate(a2)})
