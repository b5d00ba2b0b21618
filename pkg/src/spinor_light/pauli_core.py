"""Complex 2x2 algebra over the Pauli basis.

Spinors are length-2 complex arrays and matrices are (2, 2) complex arrays;
there are no wrapper classes around them.  The one structured type is
:class:`KVector`, the complex generator ``(Kx, Ky, Kz)`` of spatial
propagation, whose Pauli combination is ``i Kx sx + i Ky sy + Kz sz``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# Below this |K z| the sinc factor switches to its Taylor series.
SINC_SERIES_THRESHOLD = 1e-6


def spinor(c1, c2) -> np.ndarray:
    return np.array([c1, c2], dtype=np.complex128)


def mat2(a11, a12, a21, a22) -> np.ndarray:
    return np.array([[a11, a12], [a21, a22]], dtype=np.complex128)


def pauli_compose(c0, cx, cy, cz) -> np.ndarray:
    """Return ``c0 I + cx sx + cy sy + cz sz``."""
    return c0 * I2 + cx * SX + cy * SY + cz * SZ


def pauli_decompose(m) -> tuple[complex, complex, complex, complex]:
    """Coefficients ``(c0, cx, cy, cz)`` with ``m = c0 I + cx sx + cy sy + cz sz``."""
    m = np.asarray(m, dtype=np.complex128)
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    return (complex((a + d) / 2), complex((b + c) / 2),
            complex(1j * (b - c) / 2), complex((a - d) / 2))


@dataclass(frozen=True)
class KVector:
    """Complex triple (kx, ky, kz) in inverse length, plus ``k_len``.

    ``k_len`` is the principal square root of ``kz^2 - kx^2 - ky^2``.  Only
    even functions of it are ever used, so the branch does not matter.
    """

    kx: complex
    ky: complex
    kz: complex
    k_len: complex

    @classmethod
    def from_components(cls, kx, ky, kz) -> "KVector":
        kx, ky, kz = complex(kx), complex(ky), complex(kz)
        return cls(kx, ky, kz, cmath.sqrt(kz * kz - kx * kx - ky * ky))

    @property
    def k_squared(self) -> complex:
        return self.kz * self.kz - self.kx * self.kx - self.ky * self.ky

    def flipped(self) -> "KVector":
        """Same vector with the other square-root branch."""
        return KVector(self.kx, self.ky, self.kz, -self.k_len)


def pauli_combination(k: KVector) -> np.ndarray:
    """``K.sigma = i kx sx + i ky sy + kz sz``; traceless with eigenvalues ``+-k_len``."""
    return mat2(k.kz, 1j * k.kx + k.ky, 1j * k.kx - k.ky, -k.kz)


def _cos_sinc(x: complex) -> tuple[complex, complex]:
    # sinc(x) = sin(x)/x with the 0/0 at the band edge removed
    if abs(x) < SINC_SERIES_THRESHOLD:
        x2 = x * x
        return cmath.cos(x), 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return cmath.cos(x), cmath.sin(x) / x


def transfer_matrix(k: KVector, z: float) -> np.ndarray:
    """Propagator ``exp(i K.sigma z) = cos(Kz) I + i K.sigma z sinc(Kz)``.

    Negative ``z`` gives the inverse propagator.  ``det = 1`` always.
    """
    cos_kz, sinc_kz = _cos_sinc(k.k_len * z)
    return cos_kz * I2 + (1j * z * sinc_kz) * pauli_combination(k)


def eigenpairs(m) -> list[tuple[complex, np.ndarray]]:
    """Eigenvalues and unit eigenvectors of a 2x2 matrix.

    Eigenvalues are ``tr/2 + s`` then ``tr/2 - s`` with ``s`` the principal
    root of the discriminant.  Each eigenvector is scaled so its largest
    component is real and positive.  A multiple of the identity yields the
    standard basis; a defective matrix yields its single eigenvector twice.
    """
    m = np.asarray(m, dtype=np.complex128)
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    half_tr = (a + d) / 2
    s = cmath.sqrt(((a - d) / 2) ** 2 + b * c)
    scale = max(abs(a), abs(b), abs(c), abs(d), 1e-300)
    pairs = []
    for lam in (half_tr + s, half_tr - s):
        v1 = np.array([b, lam - a])
        v2 = np.array([lam - d, c])
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        if np.linalg.norm(v) <= 1e-14 * scale:
            v = np.array([1.0, 0.0]) if not pairs else np.array([0.0, 1.0])
        v = np.asarray(v, dtype=np.complex128)
        v = v / np.linalg.norm(v)
        j = int(np.argmax(np.abs(v) + np.array([1e-12, 0.0])))
        v = v * (abs(v[j]) / v[j])
        pairs.append((complex(lam), v))
    return pairs


def expm2(a) -> np.ndarray:
    """Closed-form exponential of any 2x2 matrix.

    Splits off the trace, ``a = c0 I + N`` with ``N^2 = q^2 I``, so that
    ``exp(a) = e^{c0} (cosh q I + N sinh(q)/q)``.
    """
    a = np.asarray(a, dtype=np.complex128)
    c0 = (a[0, 0] + a[1, 1]) / 2
    n = a - c0 * I2
    q = cmath.sqrt(n[0, 0] * n[0, 0] + n[0, 1] * n[1, 0])
    if abs(q) < SINC_SERIES_THRESHOLD:
        q2 = q * q
        shc = 1.0 + q2 / 6.0 + q2 * q2 / 120.0
    else:
        shc = cmath.sinh(q) / q
    return cmath.exp(c0) * (cmath.cosh(q) * I2 + shc * n)
