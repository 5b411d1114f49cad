"""Geometry of su(d), the traceless Hermitian d x d matrices.

Elements of su(d) are plain complex ``(d, d)`` arrays.  The inner product is
the Hilbert-Schmidt product rescaled by ``1 / (d (d - 1))`` so that the Bloch
vector ``B = d P - 1`` of any pure state ``P`` has unit norm.  Density
matrices correspond to Bloch vectors through ``rho = (1 + B) / d``; the Bloch
body is the set of ``B`` with ``B >= -1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

SPHERE_TOL = 1e-9
MEMBERSHIP_TOL = 1e-9


def _as_square(B) -> np.ndarray:
    B = np.asarray(B, dtype=complex)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {B.shape}")
    if B.shape[0] < 2:
        raise ValueError("dimension must be at least 2")
    return B


def hermitian_part(B) -> np.ndarray:
    B = np.asarray(B, dtype=complex)
    return (B + B.conj().T) / 2


def is_su(B, tol: float = 1e-10) -> bool:
    """True if ``B`` is Hermitian and traceless to within ``tol``."""
    B = _as_square(B)
    scale = max(1.0, np.max(np.abs(B)))
    return bool(np.max(np.abs(B - B.conj().T)) <= tol * scale and abs(np.trace(B)) <= tol * scale * B.shape[0])


def inner(B1, B2) -> float:
    B1, B2 = _as_square(B1), _as_square(B2)
    if B1.shape != B2.shape:
        raise ValueError(f"dimension mismatch: {B1.shape} vs {B2.shape}")
    d = B1.shape[0]
    # Tr(B1 B2) without forming the product
    tr = np.sum(B1 * B2.T)
    scale = max(1.0, np.abs(B1).max() * np.abs(B2).max() * d)
    if abs(tr.imag) > 1e-9 * scale:
        raise ValueError(f"Tr(B1 B2) has imaginary part {tr.imag:.3e}; inputs are not Hermitian")
    return float(tr.real) / (d * (d - 1))


def norm(B) -> float:
    return float(np.sqrt(max(inner(B, B), 0.0)))


def _require_unit(B, tol: float = SPHERE_TOL) -> np.ndarray:
    B = _as_square(B)
    n = norm(B)
    if abs(n - 1) > tol:
        raise ValueError(f"element is not on the outer sphere (norm {n:.12g})")
    return B


class EigenExtremes(NamedTuple):
    m_minus: float
    m_plus: float


def eigen_extremes(B) -> EigenExtremes:
    """``(m_minus, m_plus)`` with ``-m_minus <= B <= m_plus`` tight."""
    B = _as_square(B)
    if not np.any(B):
        raise ValueError("eigen_extremes is undefined for the zero matrix")
    w = np.linalg.eigvalsh(hermitian_part(B))
    return EigenExtremes(float(-w[0]), float(w[-1]))


def scaling_membership(B, x: float, tol: float = MEMBERSHIP_TOL) -> bool:
    """Whether ``x * B`` lies in the Bloch body, for ``B`` on the outer sphere."""
    B = _require_unit(B)
    m = eigen_extremes(B)
    return bool(-1.0 / m.m_plus - tol <= x <= 1.0 / m.m_minus + tol)


def is_bloch_vector(B, tol: float = MEMBERSHIP_TOL) -> bool:
    B = _as_square(B)
    return is_su(B) and bool(np.linalg.eigvalsh(hermitian_part(B))[0] >= -1 - tol)


class Verdict(enum.Enum):
    PURE_PLUS = "PurePlus"
    PURE_MINUS = "PureMinus"
    INTERIOR = "Interior"


@dataclass(frozen=True)
class TraceCubeClass:
    value: float
    bound: float
    verdict: Verdict
    # only for d == 2, where both signs of B are pure at once
    also_pure_minus: bool = False


def trace_cube_bound(d: int) -> int:
    return d * (d - 1) * (d - 2)


def classify_by_trace_cube(B, tol: float | None = None) -> TraceCubeClass:
    """Decide purity of ``B`` or ``-B`` from ``Tr(B^3)`` alone.

    On the outer sphere ``|Tr(B^3)| <= d(d-1)(d-2)``; the upper bound is met
    exactly by pure-state Bloch vectors and the lower one by their negatives.
    The default tolerance on the bound is ``1e-8 * d**3``.
    """
    B = _require_unit(B)
    d = B.shape[0]
    tol = 1e-8 * d**3 if tol is None else tol
    tr = np.trace(B @ B @ B)
    if abs(tr.imag) > tol:
        raise ValueError(f"Tr(B^3) has imaginary part {tr.imag:.3e}")
    value = float(tr.real)
    bound = float(trace_cube_bound(d))
    if abs(value - bound) <= tol:
        return TraceCubeClass(value, bound, Verdict.PURE_PLUS, also_pure_minus=(d == 2))
    if abs(value + bound) <= tol:
        return TraceCubeClass(value, bound, Verdict.PURE_MINUS)
    return TraceCubeClass(value, bound, Verdict.INTERIOR)


def density_to_bloch(rho, tol: float = 1e-10) -> np.ndarray:
    rho = _as_square(rho)
    d = rho.shape[0]
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"density matrix has trace {np.trace(rho).real:.12g}, expected 1")
    if np.linalg.eigvalsh(hermitian_part(rho))[0] < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return d * rho - np.eye(d)


def bloch_to_density(B, tol: float = 1e-10) -> np.ndarray:
    B = _as_square(B)
    d = B.shape[0]
    if not is_su(B, tol):
        raise ValueError("input is not a traceless Hermitian matrix")
    if np.linalg.eigvalsh(hermitian_part(B))[0] < -1 - tol:
        raise ValueError("input lies outside the Bloch body (smallest eigenvalue < -1)")
    return (np.eye(d) + B) / d


def shrink_factor(Bs: Sequence) -> float:
    """Largest common scale ``kappa`` keeping every unit-norm ``B_r`` in the Bloch body."""
    if len(Bs) == 0:
        raise ValueError("shrink_factor needs at least one element")
    return float(min(1.0 / eigen_extremes(_require_unit(B)).m_minus for B in Bs))


@lru_cache(maxsize=None)
def _gell_mann(d: int) -> np.ndarray:
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1
            mats.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[j, k], m[k, j] = -1j, 1j
            mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        mats.append(np.diag(np.sqrt(2.0 / (l * (l + 1))) * diag).astype(complex))
    # standard Gell-Mann matrices have Tr(G^2) = 2; rescale to unit norm here
    out = np.array(mats) * np.sqrt(d * (d - 1) / 2.0)
    out.setflags(write=False)
    return out


def gell_mann_basis(d: int) -> np.ndarray:
    """Orthonormal basis of su(d) under :func:`inner`, shape ``(d*d - 1, d, d)``.

    Order: for each ``j < k`` the symmetric then antisymmetric off-diagonal
    element, followed by the ``d - 1`` diagonal elements
    ``diag(1, ..., 1, -l, 0, ..., 0)`` for ``l = 1 .. d - 1``.
    """
    return _gell_mann(int(d))


def from_coordinates(x, d: int) -> np.ndarray:
    """Element of su(d) with orthonormal coordinates ``x`` (last axis)."""
    return np.tensordot(np.asarray(x, dtype=float), gell_mann_basis(d), axes=(-1, 0))


def to_coordinates(B) -> np.ndarray:
    B = _as_square(B)
    d = B.shape[0]
    G = gell_mann_basis(d)
    return np.einsum("kij,ji->k", G, B).real / (d * (d - 1))


def random_unit_bloch(d: int, rng: np.random.Generator) -> np.ndarray:
    """Rotation-invariant random element of the outer sphere."""
    x = rng.standard_normal(d * d - 1)
    return from_coordinates(x / np.linalg.norm(x), d)
