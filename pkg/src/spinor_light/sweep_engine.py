"""Parameter scans over every solver backend.

A :class:`SweepPlan` names a base configuration, one axis with its grid and a
backend.  Points are independent, so they are farmed out to a thread pool
(the numba kernels release the GIL) and gathered back in grid order; the
output therefore never depends on the worker count.  A failing point becomes
a NaN row whose status says why, and the run carries on.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, kernels, maxwell_bloch, scattering, timedomain
from . import bvp_solver as bvp
from .errors import ConfigError, SpinorLightError
from .medium import MediumConfig
from .tables import SweepTable

BACKENDS = ("scatter", "bvp", "timedomain", "mb")
WORKERS_ENV = "SPINOR_LIGHT_WORKERS"

# settings each backend understands, with defaults
BACKEND_SETTINGS = {
    "scatter": {},
    "bvp": {"steps": 4096},
    "timedomain": {"n_z": 2048, "t_max": None, "kind": "auto", "courant": 1.0},
    "mb": {"n_z": 512, "t_max": None, "probe_rabi": 0.01},
}


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1")
    return n


def parse_backend(spec: str) -> tuple[str, str]:
    """``"scatter:lossy"`` -> ``("scatter", "lossy")``; variants only apply to scatter."""
    name, _, variant = spec.partition(":")
    if name not in BACKENDS:
        raise ConfigError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if variant and name != "scatter":
        raise ConfigError(f"backend {name!r} takes no variant")
    variant = variant or "exact"
    if variant not in scattering.VARIANTS:
        raise ConfigError(f"unknown variant {variant!r}; expected one of {scattering.VARIANTS}")
    return name, variant


@dataclass(frozen=True)
class SweepPlan:
    cfg: MediumConfig
    axis: str
    grid: tuple
    backend: str = "scatter"
    variant: str = "exact"
    d_omega: float = 0.0
    settings: dict = field(default_factory=dict)

    def __post_init__(self):
        try:
            grid = scattering.validate_grid(self.grid)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "grid", tuple(float(x) for x in grid))
        if self.axis not in scattering.AXES:
            raise ConfigError(f"unknown axis {self.axis!r}; expected one of {scattering.AXES}")
        name, variant = parse_backend(self.backend)
        if ":" in self.backend:
            object.__setattr__(self, "backend", name)
            object.__setattr__(self, "variant", variant)
        elif self.variant not in scattering.VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        elif self.variant != "exact" and name != "scatter":
            raise ConfigError(f"backend {name!r} takes no variant")
        known = BACKEND_SETTINGS[self.backend]
        extra = set(self.settings) - set(known)
        if extra:
            raise ConfigError(f"unknown settings for {self.backend}: {sorted(extra)}")
        object.__setattr__(self, "settings", {**known, **self.settings})

    def with_backend(self, spec: str) -> "SweepPlan":
        name, variant = parse_backend(spec)
        known = BACKEND_SETTINGS[name]
        settings = {k: v for k, v in self.settings.items() if k in known}
        return SweepPlan(self.cfg, self.axis, self.grid, name, variant, self.d_omega, settings)

    def to_dict(self) -> dict:
        return {"config": self.cfg.to_dict(), "axis": self.axis, "grid": list(self.grid),
                "backend": self.backend, "variant": self.variant, "d_omega": self.d_omega,
                "settings": dict(self.settings)}

    @classmethod
    def from_dict(cls, d: dict) -> "SweepPlan":
        return cls(MediumConfig.from_dict(d["config"]), d["axis"], tuple(d["grid"]),
                   d.get("backend", "scatter"), d.get("variant", "exact"),
                   float(d.get("d_omega", 0.0)), dict(d.get("settings", {})))


@dataclass(frozen=True)
class PointResult:
    r2: float
    t2: float
    status: str = "ok"


def evaluate_point(plan: SweepPlan, value: float) -> PointResult:
    """One grid point on the plan's backend (errors propagate)."""
    cfg, dw = scattering.point_config(plan.cfg, plan.axis, value, plan.d_omega)
    s = plan.settings
    if plan.backend == "scatter":
        res = scattering.scatter_variant(cfg, dw, plan.variant)
        return PointResult(res.r2, res.t2)
    if plan.backend == "bvp":
        res = bvp.solve_rt(cfg, dw, steps=s["steps"])
        return PointResult(res.r2, res.t2)
    if plan.backend == "timedomain":
        res = timedomain.run_to_steady_state(cfg, dw, s["n_z"], s["t_max"], kind=s["kind"],
                                             courant=s["courant"])
    else:
        res = maxwell_bloch.run_mb_steady(cfg, dw, s["n_z"], s["t_max"],
                                          probe_rabi=s["probe_rabi"])
    return PointResult(res.r2, res.t2, "ok" if res.converged else "not_converged")


def _safe_point(plan: SweepPlan, value: float) -> PointResult:
    try:
        return evaluate_point(plan, value)
    except (SpinorLightError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return PointResult(math.nan, math.nan, f"error: {type(exc).__name__}: {exc}")


@dataclass
class RunManifest:
    plan: dict
    kernel_backend: str
    version: str
    wall_time: float
    workers: int
    points: list

    @property
    def ok(self) -> bool:
        return all(p["status"] == "ok" for p in self.points)

    def to_dict(self) -> dict:
        return {"plan": self.plan, "kernel_backend": self.kernel_backend,
                "version": self.version, "wall_time": self.wall_time,
                "workers": self.workers, "points": self.points}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        return cls(d["plan"], d["kernel_backend"], d["version"], float(d["wall_time"]),
                   int(d["workers"]), list(d["points"]))

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls.from_dict(json.loads(text))

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())


@dataclass
class SweepRun:
    table: SweepTable
    manifest: RunManifest


def run_sweep(plan: SweepPlan, workers: int | None = None) -> SweepRun:
    """Evaluate every grid point; rows come back in grid order for any worker count."""
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    start = time.perf_counter()
    if workers == 1 or len(plan.grid) == 1:
        results = [_safe_point(plan, v) for v in plan.grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda v: _safe_point(plan, v), plan.grid))
    wall = time.perf_counter() - start
    table = SweepTable(plan.axis, np.array(plan.grid), [p.r2 for p in results],
                       [p.t2 for p in results], [p.status for p in results])
    points = [{"index": i, "value": v, "status": p.status}
              for i, (v, p) in enumerate(zip(plan.grid, results))]
    manifest = RunManifest(plan.to_dict(), kernels.kernel_backend(), __version__, wall,
                           workers, points)
    return SweepRun(table, manifest)


def rerun_manifest(manifest: RunManifest | dict, workers: int | None = None) -> SweepRun:
    if isinstance(manifest, dict):
        manifest = RunManifest.from_dict(manifest)
    return run_sweep(SweepPlan.from_dict(manifest.plan), workers)


@dataclass
class ComparisonReport:
    axis: str
    values: np.ndarray
    a: SweepTable
    b: SweepTable
    backend_a: str
    backend_b: str
    tolerance: float

    @property
    def abs_dev(self) -> np.ndarray:
        """Per point, the larger of the |r2| and |t2| differences."""
        return np.maximum(np.abs(self.a.r2 - self.b.r2), np.abs(self.a.t2 - self.b.t2))

    @property
    def rel_dev(self) -> np.ndarray:
        scale = np.maximum(np.maximum(np.abs(self.b.r2), np.abs(self.b.t2)), 1e-300)
        return self.abs_dev / scale

    @property
    def max_dev(self) -> float:
        d = self.abs_dev
        return math.inf if np.any(np.isnan(d)) else float(np.max(d))

    @property
    def mean_dev(self) -> float:
        return float(np.mean(self.abs_dev))

    @property
    def passed(self) -> bool:
        return self.max_dev <= self.tolerance

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{self.backend_a} vs {self.backend_b}: max {self.max_dev:.3e}, "
                f"mean {self.mean_dev:.3e}, tol {self.tolerance:.1e} -> {verdict}")

    def to_dict(self) -> dict:
        return {"axis": self.axis, "backend_a": self.backend_a, "backend_b": self.backend_b,
                "tolerance": self.tolerance, "max_dev": self.max_dev, "mean_dev": self.mean_dev,
                "passed": self.passed,
                "points": [{"value": float(v), "a_r2": float(ar), "a_t2": float(at),
                            "b_r2": float(br), "b_t2": float(bt), "abs_dev": float(d),
                            "rel_dev": float(rd)}
                           for v, ar, at, br, bt, d, rd in zip(
                               self.values, self.a.r2, self.a.t2, self.b.r2, self.b.t2,
                               self.abs_dev, self.rel_dev)]}


def compare_backends(plan: SweepPlan, backend_a: str, backend_b: str, tolerance: float,
                     workers: int | None = None) -> ComparisonReport:
    """Run the plan on two backends (``name`` or ``scatter:variant``) and diff r2/t2."""
    a = run_sweep(plan.with_backend(backend_a), workers).table
    b = run_sweep(plan.with_backend(backend_b), workers).table
    return ComparisonReport(plan.axis, np.array(plan.grid), a, b, backend_a, backend_b,
                            float(tolerance))
