"""Parity operator, Wigner POVM and discrete Wigner function (odd d only)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .povm import Povm, Reconstruction, _check_density
from .wh_group import GroupContext, as_context, expand, symplectic

IMAG_TOL = 1e-12


def _require_odd(ctx) -> GroupContext:
    ctx = as_context(ctx)
    if ctx.d % 2 == 0:
        raise ValueError(f"the parity construction needs odd dimension, got d = {ctx.d}")
    return ctx


def parity_operator(ctx) -> np.ndarray:
    """``U = (1/d) sum_q D_q``; acts as ``U|r> = |-r mod d>``."""
    ctx = _require_odd(ctx)
    U = ctx.operators.sum(axis=(0, 1)) / ctx.d
    return (U + U.conj().T) / 2


def displaced_parities(ctx) -> np.ndarray:
    """``U_p = D_p U D_p^dagger`` for every reduced ``p``, shape ``(d, d, d, d)``."""
    ctx = _require_odd(ctx)
    D = ctx.operators
    return D @ parity_operator(ctx) @ np.conj(np.swapaxes(D, -1, -2))


def wigner_povm(ctx) -> Povm:
    """Wigner POVM ``E_p = (1 + U_p) / (d (d + 1))``, ordered row-major in ``p``.

    Equivalently ``(1 + B_p / sqrt(d+1)) / d^2`` with ``B`` the zero-phase
    generating vector; efficiency ``1/sqrt(d+1)``, rank ``(d+1)/2``.
    """
    ctx = _require_odd(ctx)
    d = ctx.d
    Up = displaced_parities(ctx).reshape(d * d, d, d)
    return Povm((np.eye(d)[None] + Up) / (d * (d + 1)))


@dataclass
class WignerFunction:
    values: np.ndarray  # real (d, d), indexed [p1, p2]

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"Wigner values must have shape (d, d), got {v.shape}")
        if np.iscomplexobj(v):
            if np.max(np.abs(v.imag)) > IMAG_TOL:
                raise ValueError("Wigner function must be real")
            v = v.real
        self.values = v.astype(float)

    @property
    def d(self) -> int:
        return self.values.shape[0]

    def total(self) -> float:
        return float(self.values.sum())


def wigner_function(ctx, rho=None, probabilities=None) -> WignerFunction:
    """``W_p = Tr(U_p rho) / d`` from a state, or ``(d+1) p - 1/d`` from Wigner-POVM outcomes.

    Exactly one of ``rho`` and ``probabilities`` must be given.
    """
    ctx = _require_odd(ctx)
    d = ctx.d
    if (rho is None) == (probabilities is None):
        raise ValueError("pass exactly one of rho or probabilities")
    if rho is not None:
        rho = _check_density(rho, d)
        W = np.einsum("abij,ji->ab", displaced_parities(ctx), rho) / d
        if np.max(np.abs(W.imag)) > IMAG_TOL:
            raise ValueError(f"Wigner values have imaginary residue {np.max(np.abs(W.imag)):.3e}")
        return WignerFunction(W.real)
    probs = np.asarray(probabilities, dtype=float)
    if probs.shape != (d * d,):
        raise ValueError(f"expected {d * d} probabilities, got shape {probs.shape}")
    if abs(probs.sum() - 1) > 1e-9:
        raise ValueError(f"probabilities sum to {probs.sum():.12g}, expected 1")
    return WignerFunction(((d + 1) * probs - 1.0 / d).reshape(d, d))


def _fourier_kernel(ctx: GroupContext, sign_: int) -> np.ndarray:
    d = ctx.d
    p1, p2 = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    P1, P2 = p1[:, :, None, None], p2[:, :, None, None]
    Q1, Q2 = p1[None, None], p2[None, None]
    return ctx.tau_pow(sign_ * 2 * symplectic((P1, P2), (Q1, Q2)))


def wigner_from_coefficients(rho_q, ctx) -> WignerFunction:
    """Symplectic Fourier transform ``W_p = (1/d) sum_q tau^(-2<p,q>) rho_q``."""
    ctx = _require_odd(ctx)
    W = np.einsum("abxy,xy->ab", _fourier_kernel(ctx, -1), np.asarray(rho_q)) / ctx.d
    if np.max(np.abs(W.imag)) > 1e-10:
        raise ValueError("coefficients do not describe a Hermitian operator")
    return WignerFunction(W.real)


def state_from_wigner(W: WignerFunction) -> Reconstruction:
    """Invert the Fourier transform: ``rho_q = (1/d) sum_p tau^(2<p,q>) W_p``, ``rho = sum_q rho_q D_q``.

    Arbitrary real tables can land outside state space; check ``is_psd``.
    """
    ctx = _require_odd(W.d)
    d = ctx.d
    # kernel[p, q] = tau^(2<p,q>); sum over p
    rho_q = np.einsum("abxy,ab->xy", _fourier_kernel(ctx, 1), W.values) / d
    rho = np.einsum("xy,xyij->ij", rho_q, ctx.operators)
    rho = (rho + rho.conj().T) / 2
    return Reconstruction(rho=rho, min_eigenvalue=float(np.linalg.eigvalsh(rho)[0]))


def wigner_coefficients(rho, ctx) -> np.ndarray:
    """Expansion coefficients ``rho_q = Tr(D_q^dagger rho) / d``."""
    return expand(rho, ctx)
