import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinor_light import medium, scattering
from spinor_light.errors import (
    AsymptoticRegimeViolated, NonZeroDelta, PhaseSingular, SweepPointError,
)
from spinor_light.medium import MediumConfig
from spinor_light.pauli_core import transfer_matrix
from oracles import k_components, rt_from_ode

phases = st.floats(0.05, math.pi - 0.05).flatmap(lambda s: st.sampled_from([s, -s]))


def cfg_(**kw):
    base = dict(omega=1.0, phase_s=math.pi / 2, v0=1.0, length=1.0)
    base.update(kw)
    return MediumConfig(**base)


@given(phases, st.floats(-2, 2), st.floats(-3, 3), st.floats(0.01, 30), st.floats(0.1, 3))
def test_unitarity_and_boundary_identity(s, delta, dw, length, v0):
    cfg = cfg_(phase_s=s, delta=delta, length=length, v0=v0, c=v0 * 100)
    res = scattering.scatter(cfg, dw)
    assert abs(res.unitarity_defect) < 1e-10
    k = medium.k_vector(cfg, dw)
    if abs((k.k_len * length).imag) < 15:
        m = transfer_matrix(k, length)
        out = m @ np.array([1.0, res.r])
        assert abs(out[0] - res.t) < 1e-10 * max(1, np.max(np.abs(m)))
        assert abs(out[1]) < 1e-10 * max(1, np.max(np.abs(m)))
    # branch invariance
    flipped = scattering.scatter_k(k.flipped(), length)
    assert abs(flipped.r - res.r) < 1e-12 and abs(flipped.t - res.t) < 1e-12


@pytest.mark.parametrize("s,delta,dw,length", [(1.0, 0.5, 0.2, 2.0), (math.pi / 3, 0.0, 1.3, 4.0),
                                               (2.5, -1.0, 1.7, 0.7), (-0.9, 0.3, -0.8, 1.5)])
def test_against_adaptive_ode(s, delta, dw, length):
    cfg = cfg_(phase_s=s, delta=delta, length=length, c=30.0)
    r, t = rt_from_ode(*k_components(1.0, s, delta, 1.0, 30.0, dw), length)
    res = scattering.scatter(cfg, dw)
    assert abs(res.r - r) < 1e-9 and abs(res.t - t) < 1e-9


def test_examples_from_the_theory():
    res = scattering.scatter(cfg_(delta=0.0), 2.3)
    assert res.r == 0 and abs(res.t) == pytest.approx(1.0)
    res = scattering.scatter(cfg_(delta=1.0), 0.0)
    assert res.r.real == pytest.approx(math.tanh(1.0), abs=1e-12)
    assert res.t.real == pytest.approx(1 / math.cosh(1.0), abs=1e-12)
    # S = pi/4, K L = pi/2 in the slow-light limit
    s = math.pi / 4
    dw = math.pi / 2 * abs(math.sin(s))
    res = scattering.scatter(cfg_(phase_s=s), dw)
    assert res.t2 == pytest.approx(0.5, abs=1e-12) and res.r2 == pytest.approx(0.5, abs=1e-12)


def test_zero_delta_variant():
    with pytest.raises(NonZeroDelta):
        scattering.scatter_zero_delta(cfg_(delta=0.1), 1.0)
    for s in (math.pi / 3, math.pi / 4, math.pi / 6, 2.0, -1.0):
        cfg = cfg_(phase_s=s, length=2.7)
        for dw in (0.3, 1.1, -2.0):
            a = scattering.scatter_zero_delta(cfg, dw)
            b = scattering.scatter(cfg, dw)
            assert abs(a.r - b.r) < 1e-12 and abs(a.t - b.t) < 1e-12
    # full transfer at d_omega L = pi j v0 |sin S|
    s = math.pi / 3
    for j in range(1, 5):
        res = scattering.scatter_zero_delta(cfg_(phase_s=s, length=j * math.pi * math.sin(s)), 1.0)
        assert res.t2 == pytest.approx(1.0, abs=1e-12)
    assert scattering.scatter_zero_delta(cfg_(), 0.7).r == 0
    # maximum |R| = |cos S| at K L = pi/2
    s = math.pi / 6
    res = scattering.scatter_zero_delta(cfg_(phase_s=s, length=math.pi / 2 * math.sin(s)), 1.0)
    assert abs(res.r) == pytest.approx(math.cos(s), abs=1e-12)


def test_zero_delta_slow_light_limit_of_full():
    cfg = cfg_(phase_s=1.0, length=3.0, c=1e4)
    a = scattering.scatter_zero_delta(cfg, 0.9)
    b = scattering.scatter(cfg, 0.9)
    assert abs(a.t2 - b.t2) / b.t2 < 1e-3  # 1/c correction is O(v0/c)
    cfg = cfg.replace(c=1e12)
    b = scattering.scatter(cfg, 0.9)
    assert abs(a.t - b.t) / abs(b.t) < 1e-8


def test_gap_center():
    assert scattering.scatter_gap_center(cfg_(delta=1.0, length=0.0)).t == 1
    lengths = np.linspace(0, 8, 50)
    t2 = [scattering.scatter_gap_center(cfg_(delta=1.0, length=x)).t2 for x in lengths]
    assert np.all(np.diff(t2) < 0)
    res = scattering.scatter_gap_center(cfg_(delta=1.0, length=1.0))
    assert res.t2 == pytest.approx(1 / math.cosh(1) ** 2, abs=1e-14)
    assert res.r2 + res.t2 == pytest.approx(1.0, abs=1e-15)
    far = scattering.scatter_gap_center(cfg_(delta=1.0, length=1e4))
    assert far.r2 == 1.0 and far.t2 == 0.0
    for s in (0.4, 2.2, -1.3):
        cfg = cfg_(phase_s=s, delta=0.6, length=1.7)
        a, b = scattering.scatter_gap_center(cfg), scattering.scatter(cfg, 0.0)
        assert abs(a.r - b.r) < 1e-10 and abs(a.t - b.t) < 1e-10


def test_no_overflow_for_long_samples():
    res = scattering.scatter(cfg_(delta=1.0, length=5000.0, phase_s=0.7, c=100.0), 0.3)
    assert np.isfinite(res.r) and np.isfinite(res.t)
    assert res.r2 == pytest.approx(1.0) and res.t2 < 1e-300


def test_lossy_gap_center():
    with pytest.raises(PhaseSingular):
        scattering.scatter_lossy_gap_center(cfg_(phase_s=1.0, gamma=1.0, delta=0.1))
    for length in (0.2, 1.0, 3.0):
        c = cfg_(delta=0.7, length=length)
        a, b = scattering.scatter_lossy_gap_center(c), scattering.scatter_gap_center(c)
        assert abs(a.r - b.r) < 1e-15 and abs(a.t - b.t) < 1e-15
    cfg = cfg_(omega=2.0, delta=0.5, gamma=3.0, length=1.3)
    ge = medium.effective_decay(cfg)
    de = math.hypot(0.5, ge)
    x = 1.3 * de
    res = scattering.scatter_lossy_gap_center(cfg)
    assert res.t.real == pytest.approx(de / (de * math.cosh(x) + ge * math.sinh(x)), rel=1e-13)
    assert res.r.real == pytest.approx(0.5 * math.sinh(x) / (de * math.cosh(x) + ge * math.sinh(x)),
                                       rel=1e-13)
    assert res.unitarity_defect > 0
    # general substitution path agrees at d_omega = 0
    gen = scattering.scatter(cfg, 0.0)
    assert abs(abs(gen.r) - abs(res.r)) < 1e-12 and abs(abs(gen.t) - abs(res.t)) < 1e-12
    # weak loss: R close to 1 - delta gamma / omega^2
    cfg = cfg_(omega=1.0, delta=1e-2, gamma=1e-3, length=1e4)
    res = scattering.scatter_lossy_gap_center(cfg)
    assert abs(res.r) == pytest.approx(1 - 1e-2 * 1e-3, abs=1e-9)


def test_lossy_asymptotic():
    with pytest.raises(AsymptoticRegimeViolated):
        scattering.scatter_lossy_asymptotic(cfg_(delta=1.0, length=1.0))
    res = scattering.scatter_lossy_asymptotic(cfg_(delta=1.0, length=10.0))
    assert res.t.real == pytest.approx(2 * math.exp(-10)) and res.r.real == pytest.approx(1.0)
    # gamma_eff = delta
    cfg = cfg_(omega=1.0, delta=0.5, gamma=2.0, length=100.0)
    assert medium.effective_decay(cfg) == pytest.approx(0.5)
    assert scattering.scatter_lossy_asymptotic(cfg).r.real == pytest.approx(1 / (1 + math.sqrt(2)))
    cfg = cfg_(omega=1.0, delta=0.1, gamma=1000.0, length=100.0)
    ge = medium.effective_decay(cfg)
    assert scattering.scatter_lossy_asymptotic(cfg).r.real == pytest.approx(0.1 / (2 * ge), rel=1e-3)
    for length in (5.0, 8.0, 12.0):
        cfg = cfg_(omega=1.0, delta=0.4, gamma=3.0, length=length / math.hypot(0.4, 0.48))
        x = length
        a = scattering.scatter_lossy_asymptotic(cfg)
        b = scattering.scatter_lossy_gap_center(cfg)
        assert abs(a.r - b.r) / abs(b.r) < 10 * math.exp(-2 * x)
        assert abs(a.t - b.t) / abs(b.t) < 10 * math.exp(-2 * x)


@given(st.floats(1e-3, 100), st.floats(0.01, 50), st.floats(-2, 2))
def test_lossy_is_subunitary(gamma, length, dw):
    cfg = cfg_(delta=0.5, gamma=gamma, length=length)
    assert scattering.scatter(cfg, dw).unitarity_defect >= -1e-10
    assert scattering.scatter_lossy_gap_center(cfg).unitarity_defect >= -1e-10


def test_sweep_rows_equal_single_calls():
    cfg = cfg_(phase_s=1.0, delta=0.4, c=10.0)
    grid = np.linspace(0.1, 3, 7)
    table = scattering.sweep(cfg, "length", grid, "exact", d_omega=0.3)
    assert len(table) == 7
    for v, r2, t2, d in table.rows():
        res = scattering.scatter(cfg.replace(length=v), 0.3)
        assert (r2, t2) == (res.r2, res.t2)
    one = scattering.sweep(cfg, "d_omega", [0.7])
    assert one.t2[0] == scattering.scatter(cfg, 0.7).t2


def test_fig5a_sweep_range():
    cfg = cfg_(phase_s=math.pi / 3, delta=0.0)
    table = scattering.sweep(cfg, "length", np.linspace(0, 12, 2401), "zero_delta", d_omega=1.0)
    assert table.t2.max() == pytest.approx(1.0)
    assert table.t2.min() == pytest.approx(0.75, abs=1e-5)
    assert table.t2.min() >= 0.75 - 1e-12


def test_sweep_errors():
    cfg = cfg_(delta=0.1)
    with pytest.raises(ValueError):
        scattering.sweep(cfg, "length", [])
    with pytest.raises(ValueError):
        scattering.sweep(cfg, "length", [1.0, 0.5])
    with pytest.raises(ValueError):
        scattering.sweep(cfg, "bogus", [1.0])
    with pytest.raises(SweepPointError) as info:
        scattering.sweep(cfg, "length", [1.0, 2.0], "zero_delta")
    assert info.value.index == 0
    with pytest.raises(SweepPointError) as info:
        scattering.sweep(cfg, "phase_s", [1.0, 1.5, 3.14159265])
    assert info.value.index == 2


def test_fig6_crossing():
    from scipy.optimize import brentq

    cfg = cfg_(delta=1.0)
    x = brentq(lambda L: (lambda r: r.r2 - r.t2)(scattering.scatter_gap_center(cfg.replace(length=L))),
               0.1, 2.0, xtol=1e-14)
    assert x == pytest.approx(math.atanh(1 / math.sqrt(2)), abs=1e-9)
