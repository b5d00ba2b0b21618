import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from spinor_light import medium
from spinor_light.errors import ConfigError, PhaseSingular, ZeroDetuning
from spinor_light.medium import MediumConfig
from spinor_light.pauli_core import I2, SX, SY, SZ
from oracles import k_components

phases = st.floats(0.05, math.pi - 0.05).flatmap(
    lambda s: st.sampled_from([s, -s]))


def cfg_(**kw):
    base = dict(omega=1.0, phase_s=math.pi / 2)
    base.update(kw)
    return MediumConfig(**base)


# -- configuration -------------------------------------------------------------

@pytest.mark.parametrize("bad", [dict(omega=0), dict(omega=-1), dict(gamma=-0.1), dict(v0=0),
                                 dict(c=0.5, v0=1.0), dict(length=-1)])
def test_invalid_configs(bad):
    with pytest.raises(ConfigError):
        cfg_(**bad)


def test_phase_guard():
    with pytest.raises(PhaseSingular):
        cfg_(phase_s=0.0)
    with pytest.raises(PhaseSingular):
        cfg_(phase_s=math.pi + 1e-5)
    cfg_(phase_s=2e-3)
    with pytest.raises(PhaseSingular):
        cfg_(phase_s=2e-3, s_min=1e-2)


def test_g2n_and_slow_light_ratio():
    cfg = MediumConfig.from_dict({"omega": 2.0, "phase_s": 1.0, "g2n": 400.0, "c": 100.0})
    assert cfg.v0 == pytest.approx(100.0 * 4.0 / 400.0)
    assert cfg.g2n == pytest.approx(400.0)
    assert cfg.slow_light_ratio == pytest.approx(0.01)
    assert cfg_().slow_light_ratio == 0.0


def test_from_dict_rejects():
    with pytest.raises(ConfigError):
        MediumConfig.from_dict({"omega": 1, "phase_s": 1, "g2n": 1})  # needs finite c
    with pytest.raises(ConfigError):
        MediumConfig.from_dict({"omega": 1, "phase_s": 1, "gamma1": 1, "gamma2": 2})
    with pytest.raises(ConfigError):
        MediumConfig.from_dict({"omega": 1, "phase_s": 1, "mystery": 2})


def test_dict_roundtrip():
    for c in (math.inf, 30.0):
        cfg = cfg_(delta=0.3, gamma=0.1, c=c, length=2.0)
        assert MediumConfig.from_dict(cfg.to_dict()) == cfg


# -- matrices ------------------------------------------------------------------

def test_rabi_matrix_entries_and_det():
    s = 0.7
    cfg = cfg_(omega=1.3, phase_s=s)
    w = medium.rabi_matrix(cfg)
    assert np.allclose(np.abs(w), 1.3 / math.sqrt(2))
    assert np.allclose(medium.rabi_matrix(cfg_(omega=1.3)), 1.3 / math.sqrt(2) * (I2 + 1j * SX))
    # symbolic determinant
    om, ss = sp.symbols("Omega S", positive=True)
    wm = om / sp.sqrt(2) * (sp.eye(2) + sp.exp(sp.I * ss) * sp.Matrix([[0, 1], [1, 0]]))
    assert sp.simplify(wm.det() - om ** 2 / 2 * (1 - sp.exp(2 * sp.I * ss))) == 0
    det = complex(wm.det().subs({om: 1.3, ss: s}))
    assert abs(np.linalg.det(w) - det) < 1e-14


def test_rabi_inverse_symbolic_at_right_angle():
    om = sp.symbols("Omega", positive=True)
    wm = om / sp.sqrt(2) * (sp.eye(2) + sp.I * sp.Matrix([[0, 1], [1, 0]]))
    inv = sp.simplify(wm.inv())
    # (I - i sx) / (sqrt 2 Omega)
    assert sp.simplify(inv - (sp.eye(2) - sp.I * sp.Matrix([[0, 1], [1, 0]])) / (sp.sqrt(2) * om)) \
        == sp.zeros(2)
    got = np.linalg.inv(medium.rabi_matrix(cfg_(omega=2.0)))
    assert np.allclose(got, np.array(inv.subs(om, 2.0), dtype=complex))


def test_inv_group_velocity_examples():
    # the returned matrix carries the leading sz
    assert np.allclose(medium.inv_group_velocity(cfg_(v0=3.0)), SZ / 3.0)
    # S = pi/4: sin^2 = 1/2, cos = sqrt2/2
    got = medium.inv_group_velocity(cfg_(v0=3.0, phase_s=math.pi / 4))
    assert np.allclose(got, (2 / 3.0) * (SZ - 1j * math.sqrt(2) / 2 * SY))


@given(phases, st.floats(0.2, 5), st.floats(0.1, 3))
def test_inv_group_velocity_matrix_product(s, omega, v0):
    c = 50.0
    cfg = MediumConfig(omega=omega, phase_s=s, v0=v0, c=c)
    w = medium.rabi_matrix(cfg)
    ref = (cfg.g2n / c) * SZ @ np.linalg.inv(w.conj().T) @ np.linalg.inv(w)
    assert np.max(np.abs(medium.inv_group_velocity(cfg) - ref)) < 1e-10 * np.max(np.abs(ref))


def test_d_tilde_examples():
    assert np.allclose(medium.d_tilde(cfg_(delta=0.0, phase_s=1.0)), 0)
    assert np.allclose(medium.d_tilde(cfg_(delta=0.4)), 0.4 * SY)


@given(phases, st.floats(-3, 3))
def test_d_tilde_matrix_product(s, delta):
    cfg = cfg_(phase_s=s, delta=delta)
    w = medium.rabi_matrix(cfg)
    # detuning_matrix is diag(delta, -delta); see the decisions log for the sign
    ref = w @ medium.detuning_matrix(cfg) @ np.linalg.inv(w)
    assert np.max(np.abs(medium.d_tilde(cfg) - ref)) < 1e-10 * max(1, abs(delta) / abs(math.sin(s)))


def test_group_matrix_square_is_scalar():
    cfg = cfg_(phase_s=0.8, v0=0.5, c=10.0)
    m = medium.group_matrix(cfg)
    a = 1 / 10.0 + 1 / (0.5 * math.sin(0.8) ** 2)
    b = math.cos(0.8) / (0.5 * math.sin(0.8) ** 2)
    assert np.allclose(m @ m, (a * a - b * b) * I2)
    assert medium.characteristic_speed(cfg) == pytest.approx(1 / math.sqrt(a * a - b * b))
    # slow-light limit
    assert medium.characteristic_speed(cfg_(phase_s=0.8, v0=0.5)) == pytest.approx(
        0.5 * math.sin(0.8))


# -- K-vector ------------------------------------------------------------------

def test_k_vector_trivial_cases():
    k = medium.k_vector(cfg_(), 0.0)
    assert (k.kx, k.ky, k.kz) == (0, 0, 0)
    k = medium.k_vector(cfg_(delta=0.5, v0=2.0, phase_s=-math.pi / 2), 0.0)
    assert k.kx == pytest.approx(-0.25)
    assert abs(k.k_len) == pytest.approx(0.25) and k.k_len.real == pytest.approx(0)


def test_k_vector_experimental_point():
    s, v0, dw = math.pi / 4, 17.0, 2 * math.pi * 1e4
    k = medium.k_vector(cfg_(phase_s=s, v0=v0), dw)
    # hand evaluation: sin^2 = 1/2, cos = sqrt2/2
    assert k.kx == 0
    assert k.ky.real == pytest.approx(-dw * (math.sqrt(2) / 2) / (17.0 * 0.5), rel=1e-14)
    assert k.kz.real == pytest.approx(dw / (17.0 * 0.5), rel=1e-14)
    assert abs(k.k_len) == pytest.approx(dw / (17.0 * math.sqrt(0.5)), rel=1e-12)


@given(phases, st.floats(-2, 2), st.floats(0.1, 3), st.floats(-3, 3))
def test_k_vector_components(s, delta, v0, dw):
    cfg = MediumConfig(omega=1.0, phase_s=s, delta=delta, v0=v0, c=40.0)
    k = medium.k_vector(cfg, dw)
    ref = k_components(1.0, s, delta, v0, 40.0, dw)
    assert np.allclose([k.kx, k.ky, k.kz], ref, rtol=1e-13, atol=1e-13)


def test_slow_light_k_length():
    cfg = cfg_(phase_s=1.1, delta=0.3, v0=0.7)
    dw = 0.8
    k = medium.k_vector(cfg, dw)
    assert abs(k.k_len) == pytest.approx(math.sqrt(dw ** 2 - 0.3 ** 2) / (0.7 * abs(math.sin(1.1))))


def test_lossy_k_vector():
    cfg = cfg_(phase_s=1.0, delta=0.3, gamma=0.0)
    assert medium.lossy_k_vector(cfg, 0.4) == medium.k_vector(cfg, 0.4)
    cfg = cfg_(phase_s=1.0, delta=0.0, gamma=2.0)
    assert medium.lossy_k_vector(cfg, 0.4) == medium.k_vector(cfg, 0.4)
    cfg = cfg_(phase_s=1.0, delta=0.3, gamma=2.0, omega=1.5)
    g_eff = 2.0 * 0.09 / 2.25
    # decaying probe: Im(d_omega') > 0 for exp(-i d_omega t); see the decisions log
    assert medium.lossy_k_vector(cfg, 0.4) == medium.k_vector(cfg, 0.4 + 1j * g_eff)


# -- derived scalars -------------------------------------------------------------

def test_dispersion():
    cfg = cfg_(phase_s=0.6, delta=-0.4, v0=2.0)
    p = medium.dispersion(cfg, 0.0)
    assert (p.omega_plus, p.omega_minus) == (0.4, -0.4)
    p0 = medium.dispersion(cfg_(phase_s=0.6, v0=2.0), 1.5)
    assert p0.omega_plus == pytest.approx(2.0 * math.sin(0.6) * 1.5)
    dk = np.linspace(-30, 30, 301)
    p = medium.dispersion(cfg, dk)
    speed = 2.0 * math.sin(0.6)
    assert np.all(p.omega_plus ** 2 - 0.16 - dk ** 2 * speed ** 2 <= 1e-12 * p.omega_plus ** 2)
    assert np.array_equal(p.omega_plus, -p.omega_minus)
    big = np.array([10.0, 100.0, 1000.0, 10000.0]) / speed
    gap = medium.dispersion(cfg, big).omega_plus - speed * big
    assert np.all(np.diff(gap) < 0) and np.all(gap > 0)


def test_mass_and_compton():
    cfg = cfg_(phase_s=math.pi / 3, delta=0.5, v0=2.0, hbar=1.1)
    m = medium.effective_mass(cfg)
    assert medium.effective_mass(cfg.replace(delta=-0.5)) == -m
    assert medium.effective_mass(cfg.replace(delta=0.0)) == 0.0
    lam = medium.compton_length(cfg)
    assert lam == pytest.approx(1.1 / (m * 2.0 * abs(math.sin(math.pi / 3))))
    assert lam * 0.5 == pytest.approx(2.0 * abs(math.sin(math.pi / 3)))
    assert medium.compton_length(cfg.replace(delta=1.0)) == pytest.approx(lam / 2)
    right = cfg.replace(phase_s=math.pi / 2)
    assert medium.compton_length(cfg.replace(phase_s=math.pi / 6)) == pytest.approx(
        medium.compton_length(right) / 2)
    with pytest.raises(ZeroDetuning):
        medium.compton_length(cfg.replace(delta=0.0))


def test_compton_length_experiment():
    cfg = cfg_(v0=17.0, delta=17.0 / 3e-4)
    assert medium.compton_length(cfg) == pytest.approx(3e-4)


def test_effective_decay():
    assert medium.effective_decay(cfg_(delta=0.3)) == 0.0
    assert medium.effective_decay(cfg_(gamma=1.0)) == 0.0
    assert medium.effective_decay(cfg_(omega=2.0, gamma=2.0, delta=0.2)) == pytest.approx(0.02)
    cfg = cfg_(omega=2.0, gamma=2.0, delta=0.2)
    assert medium.effective_delta(cfg) == pytest.approx(math.hypot(0.2, 0.02))


def test_oscillation_period():
    cfg = cfg_(phase_s=math.pi / 4, v0=17.0, length=3e-4)
    assert medium.oscillation_period(cfg) == pytest.approx(math.pi * 17 * math.sqrt(0.5) / 3e-4)
