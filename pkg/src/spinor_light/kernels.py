"""Hot inner loops, each with a numba and a pure-numpy implementation.

The implementation is picked per call from the ``SPINOR_LIGHT_KERNELS``
environment variable (``numba`` or ``numpy``); numba is the default when it
imports.  Both paths compute the same arithmetic but in different order, so
they agree to rounding, not bit-for-bit.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba

    njit = numba.njit(cache=True, nogil=True)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None
    njit = lambda f: f  # noqa: E731
    HAVE_NUMBA = False

ENV_FLAG = "SPINOR_LIGHT_KERNELS"


def kernel_backend() -> str:
    """Return ``"numba"`` or ``"numpy"`` according to the env flag."""
    choice = os.environ.get(ENV_FLAG, "numba").strip().lower()
    if choice not in ("numba", "numpy"):
        raise ValueError(f"{ENV_FLAG} must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numba" and not HAVE_NUMBA:
        return "numpy"
    return choice


# ---------------------------------------------------------------------------
# RK4 integration of Y' = G Y, Y(0) = I, for a batch of constant 2x2 generators
# ---------------------------------------------------------------------------

@njit
def _rk4_transfer_numba(gen, h, steps):
    n = gen.shape[0]
    out = np.empty((n, 2, 2), dtype=np.complex128)
    for p in range(n):
        g00 = gen[p, 0, 0]
        g01 = gen[p, 0, 1]
        g10 = gen[p, 1, 0]
        g11 = gen[p, 1, 1]
        hp = h[p]
        y00 = 1.0 + 0j
        y01 = 0j
        y10 = 0j
        y11 = 1.0 + 0j
        for _ in range(steps):
            a00 = g00 * y00 + g01 * y10
            a01 = g00 * y01 + g01 * y11
            a10 = g10 * y00 + g11 * y10
            a11 = g10 * y01 + g11 * y11

            t00 = y00 + 0.5 * hp * a00
            t01 = y01 + 0.5 * hp * a01
            t10 = y10 + 0.5 * hp * a10
            t11 = y11 + 0.5 * hp * a11
            b00 = g00 * t00 + g01 * t10
            b01 = g00 * t01 + g01 * t11
            b10 = g10 * t00 + g11 * t10
            b11 = g10 * t01 + g11 * t11

            t00 = y00 + 0.5 * hp * b00
            t01 = y01 + 0.5 * hp * b01
            t10 = y10 + 0.5 * hp * b10
            t11 = y11 + 0.5 * hp * b11
            c00 = g00 * t00 + g01 * t10
            c01 = g00 * t01 + g01 * t11
            c10 = g10 * t00 + g11 * t10
            c11 = g10 * t01 + g11 * t11

            t00 = y00 + hp * c00
            t01 = y01 + hp * c01
            t10 = y10 + hp * c10
            t11 = y11 + hp * c11
            d00 = g00 * t00 + g01 * t10
            d01 = g00 * t01 + g01 * t11
            d10 = g10 * t00 + g11 * t10
            d11 = g10 * t01 + g11 * t11

            y00 = y00 + hp / 6.0 * (a00 + 2.0 * b00 + 2.0 * c00 + d00)
            y01 = y01 + hp / 6.0 * (a01 + 2.0 * b01 + 2.0 * c01 + d01)
            y10 = y10 + hp / 6.0 * (a10 + 2.0 * b10 + 2.0 * c10 + d10)
            y11 = y11 + hp / 6.0 * (a11 + 2.0 * b11 + 2.0 * c11 + d11)
        out[p, 0, 0] = y00
        out[p, 0, 1] = y01
        out[p, 1, 0] = y10
        out[p, 1, 1] = y11
    return out


def _rk4_transfer_numpy(gen, h, steps):
    y = np.broadcast_to(np.eye(2, dtype=np.complex128), gen.shape).copy()
    hh = h[:, None, None]
    for _ in range(steps):
        k1 = gen @ y
        k2 = gen @ (y + 0.5 * hh * k1)
        k3 = gen @ (y + 0.5 * hh * k2)
        k4 = gen @ (y + hh * k3)
        y = y + hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def rk4_transfer(gen, h, steps):
    """Classical RK4 for ``Y' = G Y`` from ``Y = I`` over ``steps`` steps of size ``h``.

    ``gen`` has shape (N, 2, 2), ``h`` shape (N,).  Returns (N, 2, 2).
    """
    gen = np.ascontiguousarray(gen, dtype=np.complex128)
    h = np.ascontiguousarray(h, dtype=np.float64)
    if kernel_backend() == "numba":
        return _rk4_transfer_numba(gen, h, int(steps))
    return _rk4_transfer_numpy(gen, h, int(steps))


# ---------------------------------------------------------------------------
# Split-step advance of counter-propagating components on a 1D cell grid
# ---------------------------------------------------------------------------
#
# State y has shape (n, m).  Component 0 moves right, component 1 moves left
# (first-order upwind at Courant number nu; an exact shift when nu == 1), all
# m components are mixed by a constant local propagator.  Each step is
#     local half-step -> advection -> local half-step
# and consecutive half-steps are fused into full steps.
#
# Boundary values live in a rotated basis: the physical field at a face is
# bv @ (y0, y1).  The left face fixes physical component 0 to drive_l[k], the
# right face fixes physical component 1 to drive_r[k]; the incoming
# characteristic is solved from that and the outgoing one.

@njit
def _advance_numba(y, pf, ph, bv, nu, drive_l, drive_r, qform, qdiag):
    n = y.shape[0]
    m = y.shape[1]
    nsteps = drive_l.shape[0]
    trans = np.empty(nsteps, dtype=np.complex128)
    refl = np.empty(nsteps, dtype=np.complex128)
    norm = np.empty(nsteps, dtype=np.float64)
    flux_in = np.empty(nsteps, dtype=np.float64)
    flux_out = np.empty(nsteps, dtype=np.float64)
    peak = np.zeros((nsteps, m), dtype=np.float64)
    tmp = np.empty(m, dtype=np.complex128)
    if nsteps == 0:
        return y, trans, refl, norm, flux_in, flux_out, peak

    for i in range(n):
        for a in range(m):
            s = 0j
            for b in range(m):
                s += ph[a, b] * y[i, b]
            tmp[a] = s
        for a in range(m):
            y[i, a] = tmp[a]

    for k in range(nsteps):
        w2_out = y[0, 1]
        w1_out = y[n - 1, 0]
        w1_in = (drive_l[k] - bv[0, 1] * w2_out) / bv[0, 0]
        w2_in = (drive_r[k] - bv[1, 0] * w1_out) / bv[1, 1]
        refl[k] = bv[1, 0] * w1_in + bv[1, 1] * w2_out
        trans[k] = bv[0, 0] * w1_out + bv[0, 1] * w2_in
        flux_in[k] = nu * (qform[0, 0].real * abs(w1_in) ** 2 + qform[1, 1].real * abs(w2_in) ** 2)
        flux_out[k] = nu * (qform[0, 0].real * abs(w1_out) ** 2 + qform[1, 1].real * abs(w2_out) ** 2)

        for i in range(n - 1, 0, -1):
            y[i, 0] = y[i, 0] - nu * (y[i, 0] - y[i - 1, 0])
        y[0, 0] = y[0, 0] - nu * (y[0, 0] - w1_in)
        for i in range(n - 1):
            y[i, 1] = y[i, 1] - nu * (y[i, 1] - y[i + 1, 1])
        y[n - 1, 1] = y[n - 1, 1] - nu * (y[n - 1, 1] - w2_in)

        p = pf if k < nsteps - 1 else ph
        acc = 0.0
        for i in range(n):
            for a in range(m):
                s = 0j
                for b in range(m):
                    s += p[a, b] * y[i, b]
                tmp[a] = s
            for a in range(m):
                y[i, a] = tmp[a]
                v = abs(tmp[a])
                if v > peak[k, a]:
                    peak[k, a] = v
            if qdiag:
                for a in range(m):
                    acc += qform[a, a].real * (tmp[a].real ** 2 + tmp[a].imag ** 2)
            else:
                for a in range(m):
                    for b in range(m):
                        acc += (tmp[a].conjugate() * qform[a, b] * tmp[b]).real
        norm[k] = acc
    return y, trans, refl, norm, flux_in, flux_out, peak


def _advance_numpy(y, pf, ph, bv, nu, drive_l, drive_r, qform, qdiag):
    nsteps = drive_l.shape[0]
    m = y.shape[1]
    trans = np.empty(nsteps, dtype=np.complex128)
    refl = np.empty(nsteps, dtype=np.complex128)
    norm = np.empty(nsteps, dtype=np.float64)
    flux_in = np.empty(nsteps, dtype=np.float64)
    flux_out = np.empty(nsteps, dtype=np.float64)
    peak = np.zeros((nsteps, m), dtype=np.float64)
    if nsteps == 0:
        return y, trans, refl, norm, flux_in, flux_out, peak
    q0 = qform[0, 0].real
    q1 = qform[1, 1].real
    qd = np.real(np.diag(qform))
    pf_t = pf.T.copy()
    y = y @ ph.T
    for k in range(nsteps):
        w2_out = y[0, 1]
        w1_out = y[-1, 0]
        w1_in = (drive_l[k] - bv[0, 1] * w2_out) / bv[0, 0]
        w2_in = (drive_r[k] - bv[1, 0] * w1_out) / bv[1, 1]
        refl[k] = bv[1, 0] * w1_in + bv[1, 1] * w2_out
        trans[k] = bv[0, 0] * w1_out + bv[0, 1] * w2_in
        flux_in[k] = nu * (q0 * abs(w1_in) ** 2 + q1 * abs(w2_in) ** 2)
        flux_out[k] = nu * (q0 * abs(w1_out) ** 2 + q1 * abs(w2_out) ** 2)

        c0 = y[:, 0]
        up0 = np.concatenate(([w1_in], c0[:-1]))
        c1 = y[:, 1]
        up1 = np.concatenate((c1[1:], [w2_in]))
        y[:, 0] = c0 - nu * (c0 - up0)
        y[:, 1] = c1 - nu * (c1 - up1)

        y = y @ (pf_t if k < nsteps - 1 else ph.T)
        mag = np.abs(y)
        peak[k] = mag.max(axis=0)
        if qdiag:
            norm[k] = float(np.sum((mag ** 2) * qd))
        else:
            norm[k] = float(np.real(np.einsum("ia,ab,ib->", y.conj(), qform, y)))
    return y, trans, refl, norm, flux_in, flux_out, peak


def advance(y, pf, ph, bv, nu, drive_l, drive_r, qform=None):
    """Run ``len(drive_l)`` split steps in place-style; returns the new state and records.

    Returns ``(y, trans, refl, norm, flux_in, flux_out, peak)`` where ``trans``
    and ``refl`` are the physical exit fields at the right (component 0) and
    left (component 1) faces, ``norm`` is ``sum_i y_i^H Q y_i`` after each step,
    ``flux_in``/``flux_out`` the boundary fluxes in units of one cell per step
    (weighted by Q's diagonal), and ``peak`` the per-component max |y|.
    """
    y = np.ascontiguousarray(y, dtype=np.complex128).copy()
    m = y.shape[1]
    pf = np.ascontiguousarray(pf, dtype=np.complex128)
    ph = np.ascontiguousarray(ph, dtype=np.complex128)
    bv = np.ascontiguousarray(bv, dtype=np.complex128)
    drive_l = np.ascontiguousarray(drive_l, dtype=np.complex128)
    drive_r = np.ascontiguousarray(drive_r, dtype=np.complex128)
    if qform is None:
        qform = np.eye(m, dtype=np.complex128)
    qform = np.ascontiguousarray(qform, dtype=np.complex128)
    qdiag = bool(np.all(qform == np.diag(np.diag(qform))))
    args = (y, pf, ph, bv, float(nu), drive_l, drive_r, qform, qdiag)
    if kernel_backend() == "numba":
        return _advance_numba(*args)
    return _advance_numpy(*args)
