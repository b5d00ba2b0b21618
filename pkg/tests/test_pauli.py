import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinor_light.pauli_core import (
    I2, SX, SY, SZ, KVector, eigenpairs, expm2, mat2, pauli_combination, pauli_compose,
    pauli_decompose, spinor, transfer_matrix,
)
from oracles import charpoly_eigvals, series_expm

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)
kvecs = st.builds(KVector.from_components, cplx, cplx, cplx)


def test_pauli_algebra():
    assert np.allclose(SX @ SY, 1j * SZ)
    assert np.allclose(SY @ SZ, 1j * SX)
    for s in (SX, SY, SZ):
        assert np.allclose(s @ s, I2)


@given(cplx, cplx, cplx, cplx)
def test_decompose_roundtrip(a, b, c, d):
    m = mat2(a, b, c, d)
    assert np.allclose(pauli_compose(*pauli_decompose(m)), m, atol=1e-13)


def test_spinor_shape():
    v = spinor(1, 2j)
    assert v.shape == (2,) and v.dtype == np.complex128


def test_combination_zero_and_diagonal():
    assert np.array_equal(pauli_combination(KVector.from_components(0, 0, 0)), np.zeros((2, 2)))
    k = KVector.from_components(0, 0, 1.7)
    assert np.allclose(pauli_combination(k), 1.7 * SZ)
    assert sorted(np.linalg.eigvals(pauli_combination(k)).real) == pytest.approx([-1.7, 1.7])


@given(kvecs)
def test_combination_traceless_with_eigs_pm_k(k):
    m = pauli_combination(k)
    assert abs(np.trace(m)) < 1e-14
    lam = charpoly_eigvals(m)
    scale = max(1.0, abs(k.k_len))
    assert min(abs(lam[0] - k.k_len), abs(lam[0] + k.k_len)) < 1e-10 * scale
    assert abs(lam[0] + lam[1]) < 1e-10 * scale


@given(kvecs)
def test_k_len_consistency(k):
    assert abs(k.k_len ** 2 - (k.kz ** 2 - k.kx ** 2 - k.ky ** 2)) < 1e-12 * max(1, abs(k.k_len) ** 2)


def test_transfer_identity_and_half_period():
    assert np.allclose(transfer_matrix(KVector.from_components(0, 0, 0), 3.3), I2)
    m = transfer_matrix(KVector.from_components(0, 0, 2.0), math.pi / 2)
    assert np.allclose(m, -I2, atol=1e-15)


@given(kvecs, st.floats(-2, 2))
def test_transfer_matches_series_exponential(k, z):
    ref = series_expm(1j * pauli_combination(k) * z)
    got = transfer_matrix(k, z)
    assert np.max(np.abs(got - ref)) < 1e-12 * max(1.0, np.max(np.abs(ref)))


@given(kvecs, st.floats(-2, 2), st.floats(-2, 2))
def test_transfer_group_properties(k, z1, z2):
    m1, m2 = transfer_matrix(k, z1), transfer_matrix(k, z2)
    scale = max(1.0, np.max(np.abs(m1)) * np.max(np.abs(m2)))
    assert abs(np.linalg.det(m1) - 1) < 1e-12 * scale
    assert np.max(np.abs(transfer_matrix(k, z1 + z2) - m2 @ m1)) < 1e-12 * scale
    assert np.max(np.abs(m1 @ transfer_matrix(k, -z1) - I2)) < 1e-12 * scale


@given(kvecs, st.floats(-2, 2))
def test_branch_independence(k, z):
    a = transfer_matrix(k, z)
    b = transfer_matrix(k.flipped(), z)
    assert np.max(np.abs(a - b)) <= 1e-15 * max(1.0, np.max(np.abs(a)))


def test_band_edge_series_is_smooth():
    # K -> 0 with nonzero components: sinc limit, no 0/0
    k = KVector.from_components(1.0, 0.0, 1.0 + 1e-9)
    ref = series_expm(1j * pauli_combination(k) * 0.7)
    assert np.allclose(transfer_matrix(k, 0.7), ref, atol=1e-12)


def test_eigenpairs_examples():
    (l1, v1), (l2, v2) = eigenpairs(SZ)
    assert (l1, l2) == (1, -1)
    assert np.allclose(v1, [1, 0]) and np.allclose(v2, [0, 1])
    (l1, v1), (l2, v2) = eigenpairs(SX)
    assert (l1, l2) == (1, -1)
    assert np.allclose(v1, np.array([1, 1]) / math.sqrt(2))
    assert np.allclose(abs(v2), np.array([1, 1]) / math.sqrt(2))
    assert abs(np.vdot(v1, v2)) < 1e-15


def test_eigenpairs_degenerate_identity():
    pairs = eigenpairs(2.5 * I2)
    assert [p[0] for p in pairs] == [2.5, 2.5]
    assert abs(np.vdot(pairs[0][1], pairs[1][1])) < 1e-15


@given(kvecs)
def test_eigenpairs_residual(k):
    m = pauli_combination(k)
    scale = max(1.0, np.max(np.abs(m)))
    for lam, v in eigenpairs(m):
        assert abs(np.linalg.norm(v) - 1) < 1e-14
        assert np.max(np.abs(m @ v - lam * v)) < 1e-12 * scale


@given(cplx, cplx, cplx, cplx)
def test_expm2_matches_series(a, b, c, d):
    m = mat2(a, b, c, d) * 0.5
    ref = series_expm(m)
    assert np.max(np.abs(expm2(m) - ref)) < 1e-11 * max(1.0, np.max(np.abs(ref)))


def test_expm2_nilpotent():
    n = mat2(0, 1, 0, 0)
    assert np.allclose(expm2(n), I2 + n)
    assert np.allclose(expm2(n + 0.3 * I2), cmath.exp(0.3) * (I2 + n))
