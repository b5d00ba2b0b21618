"""Time the hot kernels with numba and with the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--quick] [--repeat N]

The backend is read from SPINOR_LIGHT_KERNELS on every call, so both paths
are timed in one process.  The first numba call (compilation) is excluded.
"""
import argparse
import math
import os
import time

import numpy as np

from spinor_light import kernels, maxwell_bloch, medium, timedomain
from spinor_light import bvp_solver as bvp
from spinor_light.medium import MediumConfig


def _points(n, seed=7):
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(n):
        cfg = MediumConfig(omega=1.0, phase_s=rng.uniform(0.2, 2.9), delta=rng.uniform(-1, 1),
                           v0=rng.uniform(0.5, 2.0), length=rng.uniform(0.1, 3.0))
        pts.append((cfg, rng.uniform(-2, 2)))
    return pts


def cases(quick):
    pts = _points(50 if quick else 1000)
    steps = 512 if quick else 4096
    dirac = MediumConfig(omega=1.0, phase_s=math.pi / 2, delta=1.0, v0=1.0)
    dirac = dirac.replace(length=medium.compton_length(dirac))
    n_z = 256 if quick else 2048
    mb_cfg = MediumConfig(omega=1.0, phase_s=math.pi / 2, delta=0.05, v0=0.01, c=1.0)
    mb_cfg = mb_cfg.replace(length=medium.compton_length(mb_cfg))

    def rk4():
        sols = bvp.solve_rt_many(pts, steps)
        return np.array([[s.r2, s.t2] for s in sols])

    def advance():
        res = timedomain.run_to_steady_state(dirac, 0.0, n_z, kind="dirac")
        return np.array([res.r2, res.t2])

    def mb():
        res = maxwell_bloch.run_mb_steady(mb_cfg, 0.025, 50 if quick else 200)
        return np.array([res.r2, res.t2])

    return {f"rk4_transfer ({len(pts)} pts x {steps} steps)": rk4,
            f"advance dirac (n_z={n_z})": advance,
            f"maxwell-bloch steady (n_z={50 if quick else 200})": mb}


def _time(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="small sizes (smoke test)")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    saved = os.environ.get(kernels.ENV_FLAG)
    rows = []
    try:
        for name, fn in cases(args.quick).items():
            timings = {}
            outs = {}
            for backend in ("numba", "numpy"):
                os.environ[kernels.ENV_FLAG] = backend
                fn()  # warm-up, includes compilation for numba
                timings[backend], outs[backend] = _time(fn, args.repeat)
            diff = float(np.max(np.abs(outs["numba"] - outs["numpy"])))
            rows.append((name, timings["numba"], timings["numpy"], diff))
    finally:
        if saved is None:
            os.environ.pop(kernels.ENV_FLAG, None)
        else:
            os.environ[kernels.ENV_FLAG] = saved
    print(f"{'case':48s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s} {'max diff':>9s}")
    for name, tn, tp, diff in rows:
        print(f"{name:48s} {tn:10.4f} {tp:10.4f} {tp / tn:8.1f} {diff:9.1e}")
    return rows


if __name__ == "__main__":
    main()
